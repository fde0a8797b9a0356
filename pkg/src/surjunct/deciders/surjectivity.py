"""Surjectivity: Garden-of-Eden windows and exact checks on finite universes."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .. import ff
from ..alphabets import TABLE_CAP, pattern_letters
from ..ca import CellularAutomaton, Pattern, config_indices, window_map
from ..errors import UnsupportedUniverse
from ._common import enumerate_images, pattern_from_vector
from .verdict import NO, UNKNOWN, YES, Verdict


def _least_missing(image: np.ndarray) -> int | None:
    """Smallest non-negative integer absent from a sorted unique array."""
    gaps = np.flatnonzero(image != np.arange(len(image)))
    if len(gaps):
        return int(gaps[0])
    return int(len(image))


def _linear_orphan(W: np.ndarray, ca: CellularAutomaton, window) -> Pattern | None:
    p = ca.alphabet.p
    colspace = ff.rref(W.T, p)[0]
    vec = ff.lexmin_outside(colspace, W.shape[0], p)
    return None if vec is None else pattern_from_vector(ca, window, vec)


def goe_search(ca: CellularAutomaton, E: Iterable, cap: int = TABLE_CAP) -> Verdict:
    """Look for a pattern on ``E`` outside the window image Gamma_E.

    A hit refutes surjectivity.  When Gamma_E = A^E the result is Unknown with
    ``window_consistent`` set: surjectivity needs every window, and only
    check_surjective_finite or an inverse certificate may certify it.
    """
    wm = window_map(ca, E)
    params = {"window": wm.target.to_json()}
    if ca.rule.body == "linear":
        orphan = _linear_orphan(wm.matrix, ca, wm.target)
        method = "column space"
    else:
        image = wm.image_indices(cap)
        size = ca.alphabet.size
        missing = _least_missing(image)
        orphan = None
        if missing < size ** len(wm.target):
            orphan = Pattern(wm.target, pattern_letters(missing, size, len(wm.target)))
        method = "dense image"
    if orphan is not None:
        return Verdict("goe_search", NO, witness={"orphan": orphan.to_json()}, transcript={"method": method}, parameters=params)
    return Verdict(
        "goe_search",
        UNKNOWN,
        transcript={"method": method, "window_consistent": True},
        parameters=params,
    )


def check_surjective_finite(ca: CellularAutomaton, cap: int = TABLE_CAP) -> Verdict:
    """Exact surjectivity on a finite universe (rank test for linear rules)."""
    G = ca.universe
    if not G.is_finite:
        raise UnsupportedUniverse("exact surjectivity check needs a finite universe")
    A = ca.alphabet
    allg = G.subset(range(G.order))
    if ca.rule.body == "linear":
        W = window_map(ca, allg, allg).matrix
        r = ff.rank(W, A.p)
        if r == W.shape[0]:
            return Verdict("check_surjective_finite", YES, witness={"rank": r}, transcript={"method": "rank"})
        orphan = _linear_orphan(W, ca, allg)
        return Verdict(
            "check_surjective_finite",
            NO,
            witness={"orphan": orphan.to_json()},
            transcript={"method": "rank", "rank": r},
        )
    _, Y = enumerate_images(ca, cap)
    image = np.unique(config_indices(Y, A.size))
    total = A.size**G.order
    if len(image) == total:
        return Verdict("check_surjective_finite", YES, witness={"image_size": total}, transcript={"method": "enumeration"})
    missing = _least_missing(image)
    orphan = Pattern(allg, pattern_letters(missing, A.size, G.order))
    return Verdict(
        "check_surjective_finite",
        NO,
        witness={"orphan": orphan.to_json()},
        transcript={"method": "enumeration", "image_size": int(len(image))},
    )
