import json
import random
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import random_ring_element, random_unit  # noqa: E402

from surjunct import ff  # noqa: E402
from surjunct.alphabets import Alphabet, hom_rule, linear_rule, shift_rule  # noqa: E402
from surjunct.ca import CellularAutomaton, compose, full_matrix, window_map  # noqa: E402
from surjunct.errors import IncompatibleOperands, NotLinear, PreconditionFailed, RaggedInput  # noqa: E402
from surjunct.group_ring import (  # noqa: E402
    GroupRingMatrix,
    LaurentForm,
    delta,
    find_left_inverse,
    flatten,
    from_laurent,
    gr_add,
    gr_mul,
    gr_scale,
    matrix_product,
    phi,
    phi_inv,
    regular_representation,
    to_laurent,
    unflatten,
    unit,
    verify_stable_finiteness_instance,
    zero,
)
from surjunct.groups import FreeAbelianGroup, FreeGroup, ball, cyclic, product_set, symmetric  # noqa: E402

Z, Z2, F = FreeAbelianGroup(1), FreeAbelianGroup(2), FreeGroup(2)
C2 = cyclic(2)
N_MAT = [[0, 1], [0, 0]]


def one_plus_x():
    return GroupRingMatrix.build(Z, 2, 1, {(0,): [[1]], (1,): [[1]]})


def ixn():
    return GroupRingMatrix.build(Z, 2, 2, {(0,): np.eye(2, dtype=int), (1,): N_MAT})


# arithmetic examples ----------------------------------------------------------


def test_unit_law_and_pruning():
    beta = GroupRingMatrix.build(Z, 3, 2, {(1,): [[1, 2], [0, 0]], (2,): [[3, 3], [3, 3]]})
    assert beta.support.keys() == {(1,)}
    assert gr_mul(unit(Z, 3, 2), beta) == beta == gr_mul(beta, unit(Z, 3, 2))


def test_one_plus_t_squared_vanishes():
    t = GroupRingMatrix.build(C2, 2, 1, {0: [[1]], 1: [[1]]})
    assert gr_mul(t, t).is_zero()


def test_ixn_squares_to_one():
    assert gr_mul(ixn(), ixn()) == unit(Z, 2, 2)


def test_operands_must_match():
    with pytest.raises(IncompatibleOperands):
        gr_mul(unit(Z, 2, 1), unit(Z, 3, 1))
    with pytest.raises(IncompatibleOperands):
        gr_add(unit(Z, 2, 1), unit(Z, 2, 2))


def test_json_round_trip():
    for alpha in (ixn(), random_ring_element(random.Random(1), symmetric(3), 3, 2), delta(F, 2, 1, (1, -2))):
        data = json.loads(json.dumps(alpha.to_json()))
        assert GroupRingMatrix.from_json(data) == alpha
    with pytest.raises(RaggedInput):
        GroupRingMatrix.from_json({"universe": {"kind": "free_abelian", "rank": 1}, "p": 2, "n": 2, "support": [[[0], [1, 0, 1]]]})


# phi and its inverse ------------------------------------------------------------


def test_phi_examples():
    for G in (Z, symmetric(3), F):
        assert phi(unit(G, 2, 2)).rule.is_identity()
    xor = linear_rule(Z, Alphabet.vector_space(2), {(0,): [[1]], (1,): [[1]]})
    assert phi(one_plus_x()).rule == xor
    for g in ((1,), (-2,)):
        assert phi(delta(Z, 3, 1, g)).rule.equivalent(shift_rule(Z, Alphabet.vector_space(3), g))


def test_phi_inv_examples():
    A = Alphabet.vector_space(2, 2)
    ident = CellularAutomaton(Z, linear_rule(Z, A, {(0,): np.eye(2, dtype=int)}))
    assert phi_inv(ident) == unit(Z, 2, 2)
    xor = CellularAutomaton(Z, linear_rule(Z, Alphabet.vector_space(2), {(0,): [[1]], (1,): [[1]]}))
    assert phi_inv(xor) == one_plus_x()
    sparse = CellularAutomaton(Z, linear_rule(Z, A, {(0,): N_MAT, (2,): [[0, 0], [0, 0]]}))
    assert set(phi_inv(sparse).support) == {(0,)}
    with pytest.raises(NotLinear):
        phi_inv(CellularAutomaton(Z, hom_rule(Z, Alphabet.from_group(symmetric(3)), {(0,): tuple(range(6))})))


@pytest.mark.parametrize("G", [cyclic(6), symmetric(3), Z, Z2, F], ids=str)
def test_phi_round_trip(G):
    rng = random.Random(2)
    for _ in range(50):
        alpha = random_ring_element(rng, G, rng.choice([2, 3]), rng.choice([1, 2]), radius=1)
        assert phi_inv(phi(alpha)) == alpha


@pytest.mark.parametrize("G", [cyclic(6), symmetric(3), Z, Z2], ids=str)
def test_phi_is_multiplicative(G):
    rng = random.Random(3)
    for _ in range(40):
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        a, b = random_ring_element(rng, G, p, n), random_ring_element(rng, G, p, n)
        assert phi(gr_mul(a, b)).rule.equivalent(compose(phi(a), phi(b)).rule)
        # and on an explicit window of radius 3
        E = ball(G, 3)
        mid = product_set(G, E, phi(a).memory)
        src = product_set(G, mid, phi(b).memory)
        lhs = window_map(phi(gr_mul(a, b)), E, source=src).matrix
        rhs = window_map(phi(a), E).matrix @ window_map(phi(b), mid, source=src).matrix % p
        assert np.array_equal(lhs, rhs)


# ring axioms -----------------------------------------------------------------------

RING_UNIVERSES = [cyclic(6), symmetric(3), Z, Z2, F]


@pytest.mark.parametrize("G", RING_UNIVERSES, ids=str)
def test_ring_axioms(G):
    rng = random.Random(4)
    radius = 1 if isinstance(G, FreeGroup) else 2
    for _ in range(1000):
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        a, b, c = (random_ring_element(rng, G, p, n, radius=radius, density=0.3) for _ in range(3))
        assert gr_mul(gr_mul(a, b), c) == gr_mul(a, gr_mul(b, c))
        assert gr_mul(a, gr_add(b, c)) == gr_add(gr_mul(a, b), gr_mul(a, c))
        assert gr_mul(gr_add(a, b), c) == gr_add(gr_mul(a, c), gr_mul(b, c))
        one = unit(G, p, n)
        assert gr_mul(one, a) == a == gr_mul(a, one)
        assert gr_add(a, zero(G, p, n)) == a
        assert gr_add(a, gr_scale(a, -1)).is_zero()


# flatten ---------------------------------------------------------------------------


def test_flatten_examples():
    d1 = unit(Z, 2, 1)
    z = zero(Z, 2, 1)
    assert flatten([[d1, z], [z, d1]]) == unit(Z, 2, 2)
    x = delta(Z, 2, 1, (1,))
    assert flatten([[x, z], [z, x]]) == delta(Z, 2, 2, (1,))
    with pytest.raises(RaggedInput):
        flatten([[d1, z]])


@pytest.mark.parametrize("G", [Z, symmetric(3)], ids=str)
def test_flatten_is_a_ring_isomorphism(G):
    rng = random.Random(5)
    for _ in range(50):
        X = [[random_ring_element(rng, G, 3, 1) for _ in range(2)] for _ in range(2)]
        Y = [[random_ring_element(rng, G, 3, 1) for _ in range(2)] for _ in range(2)]
        assert gr_mul(flatten(X), flatten(Y)) == flatten(matrix_product(X, Y))
        assert unflatten(flatten(X)) == X


# Laurent view ---------------------------------------------------------------------


def test_laurent_round_trip_and_rendering():
    assert str(to_laurent(ixn())) == "[1, x; 0, 1]"
    assert str(to_laurent(one_plus_x())) == "[1+x]"
    form = LaurentForm(2, 3, (({(0, 0): 1, (-1, 2): 2},),))
    assert str(form) == "[2x^-1y^2+1]"
    assert to_laurent(from_laurent(form)) == form
    with pytest.raises(IncompatibleOperands):
        to_laurent(unit(C2, 2, 1))


# left inverses and stable finiteness --------------------------------------------


def test_left_inverse_examples():
    for g in ((2,), (-1,)):
        alpha = delta(Z, 3, 2, g)
        assert find_left_inverse(alpha, 1 if abs(g[0]) > 1 else 0) is None
        assert find_left_inverse(alpha, abs(g[0])) == delta(Z, 3, 2, (-g[0],))
    for R in range(4):
        assert find_left_inverse(one_plus_x(), R) is None
    assert find_left_inverse(ixn(), 1) == ixn()


def test_left_inverse_in_a_local_group_ring():
    # F_3[Z/3] is local: (1+t)^3 = 1 + t^3 = 2, so (1+t)^-1 = 2 (1+t)^2 = 2 + t + 2t^2
    C3 = cyclic(3)
    alpha = GroupRingMatrix.build(C3, 3, 1, {0: [[1]], 1: [[1]]})
    beta = find_left_inverse(alpha, 1)
    assert beta == GroupRingMatrix.build(C3, 3, 1, {0: [[2]], 1: [[1]], 2: [[2]]})
    assert gr_mul(alpha, beta) == unit(C3, 3, 1)


def test_stable_finiteness_examples():
    assert verify_stable_finiteness_instance(unit(Z, 2, 1), unit(Z, 2, 1)).yes
    t = delta(C2, 2, 1, 1)
    assert verify_stable_finiteness_instance(t, t).yes
    v = verify_stable_finiteness_instance(ixn(), ixn())
    assert v.yes and v.transcript["phi_check"] == "CertifiedYes"
    with pytest.raises(PreconditionFailed):
        verify_stable_finiteness_instance(one_plus_x(), unit(Z, 2, 1))


@pytest.mark.parametrize("G", [cyclic(5), symmetric(3), Z, Z2], ids=str)
def test_found_left_inverses_are_two_sided(G):
    rng = random.Random(6)
    for _ in range(30):
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        alpha = random_unit(rng, G, p, n, radius=1, factors=3)
        beta = find_left_inverse(alpha, 3)
        assert beta is not None
        assert verify_stable_finiteness_instance(alpha, beta).yes


# regular representation -------------------------------------------------------------


def test_regular_representation_examples():
    alpha = GroupRingMatrix.build(C2, 2, 1, {0: [[1]], 1: [[1]]})
    M = regular_representation(alpha)
    assert M.tolist() == [[1, 1], [1, 1]]
    assert ff.rank(M, 2) == 1
    S3 = symmetric(3)
    assert np.array_equal(regular_representation(unit(S3, 3, 2)), np.eye(12, dtype=int))


@pytest.mark.parametrize("G", [cyclic(3), symmetric(3)], ids=str)
def test_regular_representation_is_multiplicative(G):
    rng = random.Random(7)
    for _ in range(100):
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        a, b = random_ring_element(rng, G, p, n), random_ring_element(rng, G, p, n)
        assert np.array_equal(regular_representation(gr_mul(a, b)), regular_representation(a) @ regular_representation(b) % p)
        assert np.array_equal(regular_representation(a), full_matrix(phi(a)))
