"""Exhaustive surjunctivity sweeps over all hom rules on a given memory set."""

from __future__ import annotations

from collections.abc import Iterable

from ..alphabets import TABLE_CAP, Alphabet, canonical_memory, enumerate_hom_rules
from ..ca import CellularAutomaton
from ..errors import BudgetExceeded, CapExceeded, UnsupportedUniverse
from ..groups import FreeAbelianGroup, GroupUniverse
from .injectivity import _finite_collision, certify_injective, refute_injective
from .inverse import synthesize_inverse
from .oracles import exact_1d
from .surjectivity import check_surjective_finite, goe_search
from .verdict import NO, UNKNOWN, YES, Verdict


def _finite_flags(ca: CellularAutomaton, cap: int) -> tuple[bool, bool]:
    injective = _finite_collision(ca, cap) is None
    surjective = check_surjective_finite(ca, cap).yes
    return injective, surjective


def _lattice_flags(ca: CellularAutomaton, max_n: int, period_bound: int) -> tuple[bool | None, bool | None]:
    """Injectivity/surjectivity on Z^d; None where undecided."""
    G = ca.universe
    if G.rank == 1:
        try:
            res = exact_1d(ca)
            return res.injective, res.surjective
        except CapExceeded:
            pass
    injective = None
    if certify_injective(ca, max_n=max_n, confirm=0).yes:
        injective = True
    elif refute_injective(ca, bound=period_bound).no:
        injective = False
    surjective = None
    if injective and synthesize_inverse(ca, max_radius=max_n).yes:
        surjective = True
    elif goe_search(ca, ca.window(0)).no:
        surjective = False
    return injective, surjective


def _summary(counts: dict) -> str:
    return (
        f"{counts['rules']} rules, {counts['injective']} injective, "
        f"{counts['surjective_among_injective']} surjective-among-injective, "
        f"{counts['violations']} violations"
    )


def surjunctivity_sweep(
    G: GroupUniverse,
    A: Alphabet,
    memory: Iterable,
    budget: int = 1_000_000,
    cap: int = TABLE_CAP,
    max_n: int = 3,
    period_bound: int = 4,
) -> Verdict:
    """Classify every hom rule and check that injective implies surjective.

    Finite universes are decided exactly.  On Z^d undecided rules are counted
    separately; a violation there needs both sides certified.
    """
    if not (G.is_finite or isinstance(G, FreeAbelianGroup)):
        raise UnsupportedUniverse("sweeps run on finite universes or Z^d")
    memory = list(memory)
    counts = {"rules": 0, "injective": 0, "surjective_among_injective": 0, "violations": 0, "undecided": 0}
    rows = []
    violations = []
    try:
        for rule in enumerate_hom_rules(G, A, memory, budget):
            ca = CellularAutomaton(G, rule)
            if G.is_finite:
                inj, surj = _finite_flags(ca, cap)
            else:
                inj, surj = _lattice_flags(ca, max_n, period_bound)
            counts["rules"] += 1
            if inj is None or (inj and surj is None):
                counts["undecided"] += 1
            if inj:
                counts["injective"] += 1
                if surj:
                    counts["surjective_among_injective"] += 1
                elif surj is False:
                    counts["violations"] += 1
                    violations.append(rule.to_json())
            rows.append({"hom": [list(phi) for phi in rule.data], "injective": inj, "surjective": surj})
    except BudgetExceeded as exc:
        partial = dict(counts, summary=_summary(counts))
        raise BudgetExceeded(str(exc), partial=partial) from exc
    if counts["violations"]:
        status = NO
    elif counts["undecided"]:
        status = UNKNOWN
    else:
        status = YES
    return Verdict(
        "surjunctivity_sweep",
        status,
        witness={"summary": _summary(counts), "counts": counts, "violations": violations},
        transcript={"memory": canonical_memory(G, memory).to_json(), "rules": rows},
        parameters={"budget": budget, "memory": [G.element_to_json(g) for g in memory]},
    )
