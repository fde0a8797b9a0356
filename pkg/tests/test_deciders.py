import itertools
import json
import random

import numpy as np
import pytest

from surjunct.alphabets import (
    Alphabet,
    enumerate_hom_rules,
    identity_rule,
    linear_rule,
    random_linear_rule,
    rule_from_json,
    shift_rule,
    table_rule,
)
from surjunct.ca import (
    CellularAutomaton,
    Pattern,
    all_configurations,
    config_indices,
    periodic_action,
    window_map,
)
from surjunct.deciders import (
    UNKNOWN,
    YES,
    Verdict,
    certify_injective,
    check_surjective_finite,
    direct_finiteness_check,
    exact_1d,
    goe_search,
    kernel_window,
    post_surjectivity,
    pre_injectivity,
    refute_injective,
    surjunctivity_sweep,
    synthesize_inverse,
)
from surjunct.errors import (
    NotAGroupOrLinearCA,
    PreconditionFailed,
    UnsupportedCombination,
    UnsupportedUniverse,
)
from surjunct.groups import FreeAbelianGroup, FreeGroup, cyclic, hnf_lattices, symmetric

Z, Z2 = FreeAbelianGroup(1), FreeAbelianGroup(2)
F2 = Alphabet.vector_space(2, 1)
F2_2 = Alphabet.vector_space(2, 2)
Z2A = Alphabet.from_group(cyclic(2))
I_MAT, N_MAT = [[1, 0], [0, 1]], [[0, 1], [0, 0]]

XOR = CellularAutomaton(Z, linear_rule(Z, F2, {(0,): [[1]], (1,): [[1]]}))
IXN = CellularAutomaton(Z, linear_rule(Z, F2_2, {(0,): I_MAT, (1,): N_MAT}))
SHIFT = CellularAutomaton(Z, shift_rule(Z, F2, (1,)))
SHIFT_BACK = CellularAutomaton(Z, shift_rule(Z, F2, (-1,)))
ADD_Z2 = CellularAutomaton(cyclic(2), table_rule(cyclic(2), Z2A, [0, 1], [0, 1, 1, 0]))


def _pair(witness):
    return [tuple(p["values"]) for p in witness["pair"]]


# kernel windows and injectivity certificates ------------------------------------


def test_kernel_window_examples():
    ident = CellularAutomaton(Z, identity_rule(Z, F2))
    assert kernel_window(ident, 0).empty
    for n in range(4):
        rep = kernel_window(XOR, n)
        assert not rep.empty
        E = XOR.window(n)
        wm = window_map(XOR, E)
        # the lex-least sample and the all-ones pattern both lie in V_n
        for values in (rep.sample.values, (1,) * len(wm.source)):
            assert rep.sample.window == wm.source
            assert all(v == 0 for v in wm.apply(values))
            assert values[wm.source.index((0,))] == 1
    assert kernel_window(IXN, 1).empty


def test_certify_injective_examples():
    v = certify_injective(SHIFT)
    assert (v.status, v.radius) == (YES, 0)
    v = certify_injective(IXN)
    assert v.yes and v.radius <= 2
    assert [c["empty"] for c in v.transcript["confirmed"]] == [True, True, True]
    v = certify_injective(XOR, max_n=4)
    assert (v.status, v.radius) == (UNKNOWN, 4)


def test_certify_injective_on_finite_universe_finds_kernel():
    v = certify_injective(ADD_Z2)
    assert v.no
    x = Pattern.from_json(cyclic(2), v.witness["kernel_element"])
    assert x.values == (1, 1)


def test_certify_rejects_plain_rules():
    plain = CellularAutomaton(Z, table_rule(Z, F2, [(0,), (1,)], [1, 1, 1, 0]))
    with pytest.raises(NotAGroupOrLinearCA):
        certify_injective(plain)


def test_refute_injective_examples():
    v = refute_injective(ADD_Z2)
    assert v.no and _pair(v.witness) == [(0, 0), (1, 1)]
    v = refute_injective(XOR, bound=1)
    assert v.no and v.witness == {"lattice": [[1]], "pair": [[0], [1]]}
    assert refute_injective(SHIFT, bound=6).unknown
    with pytest.raises(UnsupportedUniverse):
        refute_injective(CellularAutomaton(FreeGroup(2), shift_rule(FreeGroup(2), F2, (1,))))


# surjectivity ---------------------------------------------------------------


def test_goe_examples():
    v = goe_search(XOR, [(0,), (1,), (2,)])
    assert v.unknown and v.transcript["window_consistent"]
    q = periodic_action(XOR, [[3]]).ca
    v = goe_search(q, range(3))
    assert v.no and v.witness["orphan"]["values"] == [0, 0, 1]
    X = all_configurations(q.universe, q.alphabet)
    image = {tuple(r) for r in q.apply_finite(X).tolist()}
    assert (0, 0, 1) not in image
    assert goe_search(CellularAutomaton(Z, identity_rule(Z, F2)), [(0,), (1,)]).unknown


def test_goe_on_plain_rules_uses_enumeration():
    # a.b + 1 over F_2 is not surjective; the orphan is checked by enumeration
    plain = CellularAutomaton(Z, table_rule(Z, F2, [(0,), (1,)], [1, 1, 1, 0]))
    v = goe_search(plain, [(0,), (1,), (2,)])
    assert v.no
    orphan = v.witness["orphan"]["values"]
    wm = window_map(plain, [(0,), (1,), (2,)])
    assert tuple(orphan) not in {tuple(r) for r in wm.dense().tolist()}


def test_check_surjective_finite_examples():
    assert check_surjective_finite(CellularAutomaton(cyclic(4), identity_rule(cyclic(4), F2))).yes
    v = check_surjective_finite(ADD_Z2)
    assert v.no and v.witness["orphan"]["values"] == [0, 1]
    assert check_surjective_finite(CellularAutomaton(cyclic(3), shift_rule(cyclic(3), Z2A, 1))).yes


# inverses -------------------------------------------------------------------


def test_inverse_examples():
    v = synthesize_inverse(SHIFT)
    assert v.yes and v.radius == 1
    inv = rule_from_json(Z, v.witness["inverse"])
    assert inv.equivalent(SHIFT_BACK.rule)
    v = synthesize_inverse(IXN)
    assert v.yes and v.radius == 1
    inv = rule_from_json(Z, v.witness["inverse"])
    assert inv.coefficient((0,)) == tuple(map(tuple, I_MAT))
    assert inv.coefficient((1,)) == tuple(map(tuple, N_MAT))
    assert inv.coefficient((-1,)) == ((0, 0), (0, 0))
    v = synthesize_inverse(XOR, max_radius=3)
    assert (v.status, v.radius) == (UNKNOWN, 3)


def test_group_inverse_on_finite_universe():
    G = symmetric(3)
    A = Alphabet.from_group(cyclic(3))
    for rule in enumerate_hom_rules(G, A, [1]):
        ca = CellularAutomaton(G, rule)
        bij = check_surjective_finite(ca).yes
        v = synthesize_inverse(ca, max_radius=2)
        assert v.yes == bij
        if v.yes:
            sigma = CellularAutomaton(G, rule_from_json(G, v.witness["inverse"], A))
            assert direct_finiteness_check(sigma, ca).yes


def test_direct_finiteness_examples():
    ident = CellularAutomaton(Z, identity_rule(Z, F2))
    assert direct_finiteness_check(ident, ident).yes
    assert direct_finiteness_check(SHIFT_BACK, SHIFT).yes
    assert direct_finiteness_check(IXN, IXN).yes
    with pytest.raises(PreconditionFailed):
        direct_finiteness_check(SHIFT, SHIFT)


# asymptotic notions --------------------------------------------------------------


def test_pre_injectivity_examples():
    v = pre_injectivity(XOR)
    assert v.yes and "laurent_support" in v.witness
    v = pre_injectivity(ADD_Z2)
    assert v.no and _pair(v.witness) == [(0, 0), (1, 1)]
    assert pre_injectivity(CellularAutomaton(Z, identity_rule(Z, F2))).yes


def test_pre_injectivity_finds_finite_kernel_elements():
    # the nilpotent rule c -> N c kills e_1 placed at a single site
    ca = CellularAutomaton(Z, linear_rule(Z, F2_2, {(0,): N_MAT}))
    v = pre_injectivity(ca)
    assert v.no
    zero, w = (Pattern.from_json(Z, p) for p in v.witness["pair"])
    assert any(w.values) and not any(zero.values)


def test_pre_injectivity_rejects_plain_rules_on_infinite_universes():
    plain = CellularAutomaton(Z, table_rule(Z, F2, [(0,), (1,)], [1, 1, 1, 0]))
    with pytest.raises(UnsupportedCombination):
        pre_injectivity(plain)


def test_post_surjectivity_examples():
    v = post_surjectivity(SHIFT)
    assert v.yes and v.radius == 1
    v = post_surjectivity(XOR)
    assert v.no and v.witness["laurent_support"] == [[0], [1]]
    v = post_surjectivity(IXN)
    assert v.yes and v.radius == 1
    by_letter = {item["letter"]: item["preimage"] for item in v.witness["preimages"]}
    # e_1 = letter 2 is fixed; e_2 = letter 1 needs a correction at -1 because
    # tau(c)(g) = c(g) + N c(g+1)
    assert by_letter[2] == {"window": [[0]], "values": [2]}
    assert by_letter[1] == {"window": [[-1], [0], [1]], "values": [2, 1, 0]}


def test_post_surjectivity_rejects_plain_rules_on_infinite_universes():
    plain = CellularAutomaton(Z, table_rule(Z, F2, [(0,), (1,)], [1, 1, 1, 0]))
    with pytest.raises(NotAGroupOrLinearCA):
        post_surjectivity(plain)


def _finite_cases():
    rng = random.Random(11)
    out = []
    for G in (cyclic(3), cyclic(4), symmetric(3)):
        for A in (Z2A, Alphabet.from_group(cyclic(3)), F2_2, Alphabet.plain(2)):
            if A.size**G.order > 1 << 12:
                continue
            for _ in range(3):
                M = rng.sample(range(G.order), 2)
                if A.kind == "set":
                    rule = table_rule(G, A, M, [rng.randrange(2) for _ in range(4)])
                elif A.kind == "vector":
                    rule = random_linear_rule(G, 2, 2, M, rng.randrange(10**6))
                else:
                    rule = rng.choice(list(enumerate_hom_rules(G, A, M)))
                out.append(CellularAutomaton(G, rule))
    return out


@pytest.mark.parametrize("ca", _finite_cases(), ids=repr)
def test_finite_equivalences(ca):
    X = all_configurations(ca.universe, ca.alphabet)
    bij = len(np.unique(config_indices(ca.apply_finite(X), ca.alphabet.size))) == len(X)
    assert pre_injectivity(ca).yes == bij
    assert post_surjectivity(ca).yes == bij
    assert refute_injective(ca).no == (not bij)
    assert check_surjective_finite(ca).yes == bij


# exact one-dimensional oracle ----------------------------------------------------


def test_exact_1d_examples():
    r = exact_1d(CellularAutomaton(Z, identity_rule(Z, F2)))
    assert (r.injective, r.surjective) == (True, True)
    rule90 = CellularAutomaton(Z, linear_rule(Z, F2, {(-1,): [[1]], (1,): [[1]]}))
    r = exact_1d(rule90)
    assert (r.injective, r.surjective) == (False, True)
    r = exact_1d(XOR)
    assert (r.injective, r.surjective) == (False, True)


def _eca(number: int) -> CellularAutomaton:
    table = [(number >> i) & 1 for i in range(8)]
    return CellularAutomaton(Z, table_rule(Z, Alphabet.plain(2), [(-1,), (0,), (1,)], table))


def _has_orphan(ca, max_len: int) -> bool:
    for L in range(1, max_len + 1):
        E = [(k,) for k in range(L)]
        image = window_map(ca, E).image_indices()
        if len(image) < 2**L:
            return True
    return False


def _periodic_collision(ca, bound: int) -> bool:
    for lattice in hnf_lattices(1, bound):
        q = periodic_action(ca, lattice).ca
        X = all_configurations(q.universe, q.alphabet)
        if len(np.unique(config_indices(q.apply_finite(X), 2))) < len(X):
            return True
    return False


def test_exact_1d_on_all_elementary_automata():
    injective, surjective = set(), set()
    for number in range(256):
        ca = _eca(number)
        r = exact_1d(ca)
        if r.injective:
            injective.add(number)
        if r.surjective:
            surjective.add(number)
        # one-sided brute-force checks
        assert r.surjective != _has_orphan(ca, 10), number
        if _periodic_collision(ca, 6):
            assert not r.injective, number
    # identity, complement, the two shifts and their complements
    assert injective == {15, 51, 85, 170, 204, 240}
    assert injective <= surjective
    assert {30, 45, 90, 105, 150} <= surjective


def test_exact_1d_handles_gapped_memory():
    # memory {-2, 0, 2} with a zero centre: F_2 rule on the even sublattice only
    ca = CellularAutomaton(Z, linear_rule(Z, F2_2, {(-2,): [[0, 1], [1, 0]], (2,): [[1, 1], [1, 1]]}))
    r = exact_1d(ca)
    assert (r.injective, r.surjective) == (True, True)
    assert synthesize_inverse(ca, max_radius=6).radius == 6


def test_exact_1d_agrees_with_kernel_deciders_on_hom_rules():
    for A in (Z2A, Alphabet.from_group(cyclic(3)), Alphabet.from_group(symmetric(3))):
        for rule in enumerate_hom_rules(Z, A, [(0,), (1,)]):
            ca = CellularAutomaton(Z, rule)
            r = exact_1d(ca)
            cert = certify_injective(ca, max_n=3, confirm=0)
            ref = refute_injective(ca, bound=4)
            assert not (cert.yes and not r.injective)
            assert not (ref.no and r.injective)
            assert not (r.injective and not r.surjective)


def test_exact_1d_needs_z():
    with pytest.raises(UnsupportedUniverse):
        exact_1d(ADD_Z2)


# cross-oracle invariants ---------------------------------------------------------


def _random_linear_cases(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        mem = [(k,) for k in range(-1, 2) if rng.random() < 0.6] or [(0,)]
        out.append(CellularAutomaton(Z, random_linear_rule(Z, p, n, mem, rng.randrange(10**6))))
    return out


@pytest.mark.parametrize("ca", _random_linear_cases(25, 1), ids=repr)
def test_certified_injectivity_is_sound(ca):
    v = certify_injective(ca)
    if not v.yes:
        return
    assert kernel_window(ca, v.witness["n"]).empty
    for lattice in hnf_lattices(1, 6):
        q = periodic_action(ca, lattice).ca
        X = all_configurations(q.universe, q.alphabet)
        assert len(np.unique(config_indices(q.apply_finite(X), q.alphabet.size))) == len(X)


@pytest.mark.parametrize("ca", _random_linear_cases(25, 2), ids=repr)
def test_inverse_certificates_compose(ca):
    v = synthesize_inverse(ca, max_radius=3)
    if not v.yes:
        return
    eta = CellularAutomaton(Z, rule_from_json(Z, v.witness["inverse"]))
    assert direct_finiteness_check(eta, ca).yes
    assert direct_finiteness_check(ca, eta).yes
    # a left inverse never fails post-surjectivity, and here its search succeeds
    assert post_surjectivity(eta).yes
    assert post_surjectivity(ca).yes


def test_monotone_evidence_on_z2():
    ca = CellularAutomaton(Z2, linear_rule(Z2, F2_2, {(0, 0): I_MAT, (1, 0): N_MAT, (0, 1): N_MAT}))
    v = certify_injective(ca, max_n=3, confirm=2)
    assert v.yes
    n = v.witness["n"]
    assert all(kernel_window(ca, m).empty for m in range(n, n + 3))


# sweeps ------------------------------------------------------------------------


def test_sweep_examples():
    v = surjunctivity_sweep(cyclic(3), Z2A, [0, 1])
    assert v.yes
    assert v.witness["summary"] == "4 rules, 2 injective, 2 surjective-among-injective, 0 violations"
    v = surjunctivity_sweep(cyclic(2), Z2A, [0])
    assert v.witness["counts"]["rules"] == 2 and v.witness["counts"]["injective"] == 1
    S3 = symmetric(3)
    t = next(g for g in range(1, 6) if S3.mul(g, g) == 0)
    v = surjunctivity_sweep(S3, Z2A, [0, t])
    assert v.yes and v.witness["counts"]["violations"] == 0


def test_sweep_on_z_is_exact_through_de_bruijn_graphs():
    v = surjunctivity_sweep(Z, Alphabet.from_group(cyclic(3)), [(0,), (1,)])
    assert v.yes and v.witness["counts"]["undecided"] == 0
    assert v.witness["counts"]["rules"] == 9


def test_sweep_rejects_free_groups():
    with pytest.raises(UnsupportedUniverse):
        surjunctivity_sweep(FreeGroup(2), Z2A, [()])


# verdict records -------------------------------------------------------------------


def test_verdict_json_round_trip():
    v = certify_injective(IXN)
    data = json.loads(json.dumps(v.to_json()))
    assert Verdict.from_json(data).to_json() == v.to_json()
    assert v.exit_code == 0
    with pytest.raises(ValueError):
        Verdict("x", "Maybe")


def test_witness_selection_is_reproducible():
    runs = [json.dumps(refute_injective(c).to_json(), sort_keys=True) for c in (ADD_Z2, ADD_Z2)]
    assert runs[0] == runs[1]
    q = periodic_action(XOR, [[3]]).ca
    assert goe_search(q, range(3)).witness == goe_search(q, range(3)).witness


def test_lex_least_collision_pairs():
    G = cyclic(3)
    for rule in itertools.islice(enumerate_hom_rules(G, Z2A, [0, 1]), 4):
        ca = CellularAutomaton(G, rule)
        v = refute_injective(ca)
        if not v.no:
            continue
        a, b = _pair(v.witness)
        X = all_configurations(G, Z2A)
        Y = ca.apply_finite(X)
        idx = config_indices(Y, 2)
        # the first configuration (lexicographically) sharing an image with another
        for i in range(len(X)):
            twins = np.flatnonzero(idx == idx[i])
            if len(twins) > 1:
                assert (a, b) == (tuple(X[twins[0]]), tuple(X[twins[1]]))
                break
