"""Random instance generators shared by the test modules."""

from __future__ import annotations

import random

import numpy as np

from surjunct.alphabets import Alphabet, linear_rule
from surjunct.ca import CellularAutomaton, compose
from surjunct.group_ring import GroupRingMatrix, delta, gr_mul, unit
from surjunct.groups import FreeAbelianGroup, ball, cyclic, symmetric

Z = FreeAbelianGroup(1)
Z2 = FreeAbelianGroup(2)


def random_matrix(rng: random.Random, p: int, n: int) -> np.ndarray:
    return np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)


def random_ring_element(rng: random.Random, G, p: int, n: int, radius: int = 2, density: float = 0.4) -> GroupRingMatrix:
    """Coefficients drawn independently on a random part of ball(radius)."""
    sites = [g for g in ball(G, radius) if rng.random() < density]
    return GroupRingMatrix.build(G, p, n, {g: random_matrix(rng, p, n) for g in sites})


def _elementary(rng: random.Random, G, p: int, n: int, radius: int) -> GroupRingMatrix:
    """A unit of Mat_n(F_p[G]): a scaled translate, or I + delta_g E_ij with i != j."""
    g = rng.choice(list(ball(G, radius)))
    if n == 1 or rng.random() < 0.3:
        D = np.diag([rng.randrange(1, p) for _ in range(n)])
        return delta(G, p, n, g, D)
    i, j = rng.sample(range(n), 2)
    E = np.zeros((n, n), dtype=np.int64)
    E[i, j] = rng.randrange(1, p)
    return unit(G, p, n) + delta(G, p, n, g, E)


def random_unit(rng: random.Random, G, p: int, n: int, radius: int = 1, factors: int = 2) -> GroupRingMatrix:
    """Product of elementary units; invertible by construction."""
    out = unit(G, p, n)
    for _ in range(factors):
        out = gr_mul(out, _elementary(rng, G, p, n, radius))
    return out


def random_linear_ca_on_z(rng: random.Random, structured: bool = False) -> CellularAutomaton:
    """Linear CA on Z with memory inside ball(2).

    Plain samples draw every memory matrix uniformly; structured samples are
    products of two elementary units with memory in ball(1), which makes
    bijective automata common.
    """
    p, n = rng.choice([2, 3]), rng.choice([1, 2])
    A = Alphabet.vector_space(p, n)
    if structured:
        alpha = random_unit(rng, Z, p, n, radius=1, factors=2)
        mats = dict(alpha.terms) or {(0,): np.zeros((n, n), dtype=np.int64)}
        return CellularAutomaton(Z, linear_rule(Z, A, mats))
    sites = [(k,) for k in range(-2, 3) if rng.random() < 0.5] or [(0,)]
    return CellularAutomaton(Z, linear_rule(Z, A, {g: random_matrix(rng, p, n) for g in sites}))


def compose_many(*cas: CellularAutomaton) -> CellularAutomaton:
    out = cas[-1]
    for ca in reversed(cas[:-1]):
        out = compose(ca, out)
    return out


FINITE_SMALL = {
    "Z/2": cyclic(2),
    "Z/3": cyclic(3),
    "Z/4": cyclic(4),
    "Z/5": cyclic(5),
    "Z/6": cyclic(6),
    "S3": symmetric(3),
}
