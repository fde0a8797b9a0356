"""Shared machinery: algebraic views of rules and bounded preimage searches."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .. import ff
from ..alphabets import all_patterns
from ..ca import CellularAutomaton, Pattern, WindowMap, as_algebraic
from ..errors import CapExceeded, NotAGroupOrLinearCA
from ..groups import FiniteSubset, FreeAbelianGroup

SEARCH_BUDGET = 2_000_000


def require_algebraic(ca: CellularAutomaton) -> CellularAutomaton:
    alg = as_algebraic(ca)
    if alg is None:
        raise NotAGroupOrLinearCA("decider needs a group or linear cellular automaton")
    return alg


def is_scalar_laurent(ca: CellularAutomaton) -> bool:
    """Linear CA with alphabet F_p on Z^d, i.e. multiplication by one Laurent polynomial."""
    return (
        ca.rule.body == "linear"
        and ca.alphabet.n == 1
        and isinstance(ca.universe, FreeAbelianGroup)
    )


def site_endomorphisms(ca: CellularAutomaton) -> list[np.ndarray]:
    """Per-memory-site maps A -> A whose product gives the local rule."""
    rule = ca.rule
    if rule.body == "hom":
        return [np.asarray(phi, dtype=np.int64) for phi in rule.data]
    A = rule.alphabet
    V = A.vectors
    return [A.encode((V @ M.T) % A.p) for M in rule.matrices]


def pattern_from_vector(ca: CellularAutomaton, window: FiniteSubset, vec) -> Pattern:
    A = ca.alphabet
    letters = A.encode(np.asarray(vec, dtype=np.int64).reshape(len(window), A.n))
    return Pattern(window, tuple(int(v) for v in letters))


def block_columns(positions: Sequence[int], n: int) -> list[int]:
    return [pos * n + k for pos in positions for k in range(n)]


def hom_search(
    wm: WindowMap,
    free: Sequence[int],
    goal: Sequence[int] | None = None,
    nonzero_at: int | None = None,
    nonzero_any: bool = False,
    budget: int = SEARCH_BUDGET,
) -> tuple[int, ...] | None:
    """Lexicographically least assignment of the ``free`` source positions
    (all other positions fixed to the identity letter) whose image under the
    window map equals ``goal`` (identity everywhere by default).

    ``nonzero_at`` forces a non-identity letter at that source position;
    ``nonzero_any`` rejects the all-identity assignment.  Outputs are checked
    as soon as their last free input is assigned.
    """
    ca = wm.ca
    A = ca.alphabet
    e = A.identity
    mul = A.mul_table
    phis = site_endomorphisms(ca)
    gather = wm.gather
    free = sorted(free)
    step = {pos: k for k, pos in enumerate(free)}
    ntarget = len(wm.target)
    goal = [e] * ntarget if goal is None else list(goal)
    values = [e] * len(wm.source)

    def output(i: int) -> int:
        acc = e
        for j, pos in enumerate(gather[i]):
            acc = mul[acc, phis[j][values[pos]]]
        return int(acc)

    ready: list[list[int]] = [[] for _ in free]
    for i in range(ntarget):
        ks = [step[pos] for pos in gather[i] if pos in step]
        if ks:
            ready[max(ks)].append(i)
        elif goal[i] != output(i):
            return None
    nodes = 0

    def dfs(k: int) -> bool:
        nonlocal nodes
        if k == len(free):
            return not nonzero_any or any(values[pos] != e for pos in free)
        pos = free[k]
        for a in range(A.size):
            if a == e and pos == nonzero_at:
                continue
            nodes += 1
            if nodes > budget:
                raise CapExceeded(f"search budget {budget} exhausted")
            values[pos] = a
            if all(output(i) == goal[i] for i in ready[k]) and dfs(k + 1):
                return True
        values[pos] = e
        return False

    if dfs(0):
        return tuple(values)
    return None


def linear_restricted_solve(
    wm: WindowMap, free: Sequence[int], rhs_letters: Sequence[int], p: int
) -> np.ndarray | None:
    """Lexicographically least coefficient vector on the free source
    positions with ``W x = rhs``; other positions are held at zero."""
    n = wm.ca.alphabet.n
    cols = block_columns(free, n)
    W = wm.matrix[:, cols]
    rhs = wm.ca.alphabet.decode(np.asarray(rhs_letters, dtype=np.int64)).reshape(-1)
    return ff.solve_lexmin(W, rhs, p)


def enumerate_images(ca: CellularAutomaton, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """All configurations of a finite universe and their images."""
    G, A = ca.universe, ca.alphabet
    if A.size**G.order > cap:
        raise CapExceeded(f"{A.size}^{G.order} configurations exceed cap {cap}")
    X = all_patterns(A.size, G.order)
    return X, ca.apply_finite(X)
