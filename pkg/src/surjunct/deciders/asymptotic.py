"""Pre-injectivity and post-surjectivity through finitely supported witnesses.

Pre-injective means distinct asymptotic configurations (equal outside a
finite set) have distinct images.  For group and linear automata this is the
absence of a nontrivial finitely supported kernel element.
"""

from __future__ import annotations

from .. import ff
from ..alphabets import TABLE_CAP
from ..ca import CellularAutomaton, Pattern, as_algebraic, window_map
from ..errors import CapExceeded, NotAGroupOrLinearCA, UnsupportedCombination
from ..groups import ball, minimal_radius, product_set
from ._common import (
    SEARCH_BUDGET,
    block_columns,
    hom_search,
    is_scalar_laurent,
    linear_restricted_solve,
    pattern_from_vector,
)
from .injectivity import _finite_collision, certify_injective
from .surjectivity import check_surjective_finite
from .verdict import NO, UNKNOWN, YES, Verdict


def _laurent_support(ca: CellularAutomaton) -> list:
    G = ca.universe
    return [G.element_to_json(g) for g in ca.rule.support()]


def _supported_kernel_element(ca: CellularAutomaton, r: int, budget: int) -> Pattern | None:
    """Least nonzero w supported in ball(r) with tau(w) = e everywhere."""
    G = ca.universe
    S = ball(G, r)
    T = product_set(G, S, ca.memory)  # tau(w) vanishes off S M^{-1} = S M
    wm = window_map(ca, T)
    free = [wm.source.index(g) for g in S]
    if ca.rule.body == "linear":
        A = ca.alphabet
        W = wm.matrix[:, block_columns(free, A.n)]
        null = ff.nullspace(W, A.p)
        vec = ff.lexmin_nonzero_on(null, range(W.shape[1]), A.p)
        return None if vec is None else pattern_from_vector(ca, S, vec)
    vals = hom_search(wm, free, nonzero_any=True, budget=budget)
    return None if vals is None else Pattern(S, tuple(vals[i] for i in free))


def pre_injectivity(
    ca: CellularAutomaton, support_radius: int = 3, budget: int = SEARCH_BUDGET, cap: int = TABLE_CAP
) -> Verdict:
    G = ca.universe
    params = {"support_radius": support_radius}
    alg = as_algebraic(ca)
    if G.is_finite:
        # every pair of configurations is asymptotic: pre-injective = injective
        pair = _finite_collision(alg or ca, cap)
        if pair is None:
            return Verdict("pre_injectivity", YES, witness={"method": "exhaustive"}, transcript={"finite_universe": True}, parameters=params)
        return Verdict(
            "pre_injectivity",
            NO,
            witness={"pair": [pair[0].to_json(), pair[1].to_json()]},
            transcript={"finite_universe": True},
            parameters=params,
        )
    if alg is None:
        raise UnsupportedCombination("pre-injectivity of plain automata is only decided on finite universes")
    if is_scalar_laurent(alg):
        support = _laurent_support(alg)
        if support:
            return Verdict(
                "pre_injectivity",
                YES,
                witness={"laurent_support": support},
                transcript={"oracle": "Laurent polynomial ring over a field has no zero divisors"},
                parameters=params,
            )
    transcript: dict = {}
    try:
        inj = certify_injective(alg, max_n=min(support_radius, 3), confirm=0, budget=budget)
    except CapExceeded:
        inj = None
    if inj is not None and inj.yes:
        return Verdict(
            "pre_injectivity",
            YES,
            radius=inj.radius,
            witness=inj.witness,
            transcript={"route": "injectivity certificate", "kernel_windows": inj.transcript["checked"]},
            parameters=params,
        )
    searched = []
    for r in range(support_radius + 1):
        try:
            w = _supported_kernel_element(alg, r, budget)
        except CapExceeded:
            transcript["budget_exhausted_at"] = r
            break
        searched.append(r)
        if w is not None:
            zero = Pattern(w.window, (alg.alphabet.identity,) * len(w.window))
            return Verdict(
                "pre_injectivity",
                NO,
                radius=r,
                witness={"pair": [zero.to_json(), w.to_json()]},
                transcript={"route": "finitely supported kernel element", "searched": searched},
                parameters=params,
            )
    transcript["searched"] = searched
    return Verdict("pre_injectivity", UNKNOWN, radius=support_radius, transcript=transcript, parameters=params)


def _deviation_letters(ca: CellularAutomaton) -> list[int]:
    """Letters a whose single-site deviations d_a generate all finitely
    supported configurations (a basis for vector alphabets)."""
    A = ca.alphabet
    if ca.rule.body == "linear":
        return [A.letter(tuple(int(i == k) for i in range(A.n))) for k in range(A.n)]
    return [a for a in range(A.size) if a != A.identity]


def _deviation_preimage(ca: CellularAutomaton, a: int, S, budget: int) -> Pattern | None:
    """Least w supported in S with tau(w) = d_a."""
    G = ca.universe
    A = ca.alphabet
    T = product_set(G, S, ca.memory)
    wm = window_map(ca, T)
    free = [wm.source.index(g) for g in S]
    goal = [a if g == G.identity else A.identity for g in T]
    if ca.rule.body == "linear":
        vec = linear_restricted_solve(wm, free, goal, A.p)
        return None if vec is None else pattern_from_vector(ca, S, vec)
    vals = hom_search(wm, free, goal=goal, budget=budget)
    return None if vals is None else Pattern(S, tuple(vals[i] for i in free))


def post_surjectivity(
    ca: CellularAutomaton,
    deviation_radius: int = 0,
    search_radius: int = 3,
    budget: int = SEARCH_BUDGET,
    cap: int = TABLE_CAP,
) -> Verdict:
    """Post-surjectivity via finitely supported preimages of deviations.

    For group automata, tau is post-surjective iff every finitely supported
    configuration has a finitely supported preimage; by translation and the
    product structure the single-site deviations d_a suffice.  Each d_a is
    searched with support in ball(r) for r = 0..search_radius.
    ``deviation_radius`` is echoed in the parameters; single-site deviations
    already span every deviation of larger radius.
    """
    G = ca.universe
    params = {"deviation_radius": deviation_radius, "search_radius": search_radius}
    alg = as_algebraic(ca)
    if alg is None:
        if G.is_finite:
            surj = check_surjective_finite(ca, cap)
            return Verdict(
                "post_surjectivity",
                surj.status,
                witness=surj.witness,
                transcript={"finite_universe": True, "route": "surjectivity"},
                parameters=params,
            )
        raise NotAGroupOrLinearCA("post-surjectivity needs a group or linear automaton")
    if is_scalar_laurent(alg):
        support = _laurent_support(alg)
        if len(support) != 1:
            return Verdict(
                "post_surjectivity",
                NO,
                witness={"laurent_support": support},
                transcript={"oracle": "units of a Laurent polynomial ring over a field are monomials"},
                parameters=params,
            )
    preimages = []
    worst = 0
    if G.is_finite:
        # balls saturate at G; searching up to that radius is exhaustive
        search_radius = max(search_radius, minimal_radius(G, range(G.order)))
    for a in _deviation_letters(alg):
        found = None
        exhausted = False
        for r in range(search_radius + 1):
            try:
                w = _deviation_preimage(alg, a, ball(G, r), budget)
            except CapExceeded:
                exhausted = True
                break
            if w is not None:
                found = (r, w)
                break
        if found is None and G.is_finite and not exhausted:
            S = G.subset(range(G.order))
            dev = Pattern(S, tuple(a if g == G.identity else alg.alphabet.identity for g in S))
            return Verdict(
                "post_surjectivity",
                NO,
                witness={"orphan": dev.to_json()},
                transcript={"finite_universe": True, "deviation_letter": a},
                parameters=params,
            )
        if found is None:
            return Verdict(
                "post_surjectivity",
                UNKNOWN,
                radius=search_radius,
                transcript={"found": preimages, "missing_letter": a},
                parameters=params,
            )
        worst = max(worst, found[0])
        preimages.append({"letter": a, "preimage": found[1].to_json()})
    return Verdict(
        "post_surjectivity",
        YES,
        radius=worst,
        witness={"preimages": preimages},
        transcript={"reduction": "single-site deviations"},
        parameters=params,
    )
