"""Injectivity: kernel-window emptiness certificates and periodic refutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import ff
from ..ca import CellularAutomaton, Pattern, config_indices, periodic_action, window_map
from ..errors import CapExceeded, InconsistentOracles, UnsupportedUniverse
from ..groups import FiniteSubset, FreeAbelianGroup, hnf_lattices
from ..alphabets import TABLE_CAP
from ._common import (
    SEARCH_BUDGET,
    block_columns,
    enumerate_images,
    hom_search,
    pattern_from_vector,
    require_algebraic,
)
from .verdict import NO, UNKNOWN, YES, Verdict


@dataclass(frozen=True)
class KernelWindowReport:
    """Emptiness of V_n: window patterns killed by the window map on E_n
    whose value at the identity site is not the neutral letter."""

    n: int
    window: FiniteSubset
    empty: bool
    sample: Pattern | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "window": self.window.to_json(),
            "empty": self.empty,
            "sample": None if self.sample is None else self.sample.to_json(),
        }


def kernel_window(ca: CellularAutomaton, n: int, budget: int = SEARCH_BUDGET) -> KernelWindowReport:
    alg = require_algebraic(ca)
    E = alg.window(n)
    wm = window_map(alg, E)
    src = wm.source
    one = src.index(alg.universe.identity)
    if alg.rule.body == "linear":
        A = alg.alphabet
        null = ff.nullspace(wm.matrix, A.p)
        vec = ff.lexmin_nonzero_on(null, block_columns([one], A.n), A.p)
        sample = None if vec is None else pattern_from_vector(alg, src, vec)
    else:
        vals = hom_search(wm, range(len(src)), nonzero_at=one, budget=budget)
        sample = None if vals is None else Pattern(src, vals)
    return KernelWindowReport(n, E, sample is None, sample)


def certify_injective(
    ca: CellularAutomaton, max_n: int = 6, confirm: int = 3, budget: int = SEARCH_BUDGET
) -> Verdict:
    """Escalate n = 0..max_n until V_n is empty.

    An empty V_n certifies injectivity: a nontrivial kernel configuration can
    be translated to be non-neutral at the identity, and its restriction would
    lie in V_n.  Nonempty V_n at every tested n proves nothing on infinite
    universes; on a finite universe, once the window covers the whole group the
    sample is itself a kernel configuration.

    ``confirm`` further windows are checked after a certificate; their
    emptiness is forced by restriction and a failure is a bug.
    """
    params = {"max_n": max_n, "confirm": confirm}
    checked = []
    G = ca.universe
    for n in range(max_n + 1):
        rep = kernel_window(ca, n, budget)
        checked.append({"n": n, "empty": rep.empty})
        if rep.empty:
            confirmed = []
            for m in range(n + 1, n + 1 + confirm):
                try:
                    later = kernel_window(ca, m, budget)
                except CapExceeded:
                    confirmed.append({"n": m, "empty": None})
                    break
                if not later.empty:
                    raise InconsistentOracles(f"V_{n} is empty but V_{m} is not")
                confirmed.append({"n": m, "empty": True})
            return Verdict(
                "certify_injective",
                YES,
                radius=n,
                witness={"n": n, "window": rep.window.to_json()},
                transcript={"checked": checked, "confirmed": confirmed},
                parameters=params,
            )
        if G.is_finite and len(rep.window) == G.order:
            return Verdict(
                "certify_injective",
                NO,
                radius=n,
                witness={"kernel_element": rep.sample.to_json()},
                transcript={"checked": checked, "window_is_universe": True},
                parameters=params,
            )
    return Verdict(
        "certify_injective",
        UNKNOWN,
        radius=max_n,
        witness=None,
        transcript={"checked": checked, "last_sample": rep.sample.to_json()},
        parameters=params,
    )


def _finite_collision(ca: CellularAutomaton, cap: int):
    """Lexicographically least colliding pair of configurations on a finite
    universe, or None when the global map is injective."""
    G = ca.universe
    A = ca.alphabet
    allg = G.subset(range(G.order))
    if ca.rule.body == "linear":
        M = window_map(ca, allg, allg).matrix
        null = ff.nullspace(M, A.p)
        vec = ff.lexmin_nonzero_on(null, range(M.shape[1]), A.p)
        if vec is None:
            return None
        zero = Pattern(allg, (A.identity,) * G.order)
        return zero, pattern_from_vector(ca, allg, vec)
    X, Y = enumerate_images(ca, cap)
    idx = config_indices(Y, A.size)
    _, inverse, counts = np.unique(idx, return_inverse=True, return_counts=True)
    shared = counts[inverse] > 1
    if not shared.any():
        return None
    x = int(np.argmax(shared))
    later = np.flatnonzero(idx == idx[x])
    y = int(later[1])
    return Pattern(allg, tuple(int(v) for v in X[x])), Pattern(allg, tuple(int(v) for v in X[y]))


def refute_injective(ca: CellularAutomaton, bound: int = 6, cap: int = TABLE_CAP) -> Verdict:
    """Search for two distinct configurations with the same image.

    Finite universes are searched exhaustively.  On Z^d the search runs over
    L-periodic configurations for every full-rank lattice L of index at most
    ``bound`` (for d = 1: periods 1..bound).
    """
    G = ca.universe
    params = {"bound": bound}
    if G.is_finite:
        pair = _finite_collision(ca, cap)
        if pair is None:
            return Verdict(
                "refute_injective", UNKNOWN, transcript={"exhaustive": True, "collision": False}, parameters=params
            )
        return Verdict(
            "refute_injective",
            NO,
            witness={"pair": [pair[0].to_json(), pair[1].to_json()]},
            transcript={"exhaustive": True},
            parameters=params,
        )
    if not isinstance(G, FreeAbelianGroup):
        raise UnsupportedUniverse("periodic refutation needs a finite or Z^d universe")
    tried = 0
    for basis in hnf_lattices(G.rank, bound):
        act = periodic_action(ca, basis)
        try:
            pair = _finite_collision(act.ca, cap)
        except CapExceeded:
            continue
        tried += 1
        if pair is not None:
            return Verdict(
                "refute_injective",
                NO,
                witness={
                    "lattice": [list(r) for r in act.lattice],
                    "pair": [list(pair[0].values), list(pair[1].values)],
                },
                transcript={"lattices_tried": tried},
                parameters=params,
            )
    return Verdict("refute_injective", UNKNOWN, radius=bound, transcript={"lattices_tried": tried}, parameters=params)
