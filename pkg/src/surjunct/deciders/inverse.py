"""Inverse-rule synthesis and the direct-finiteness check sigma o tau = Id => tau o sigma = Id."""

from __future__ import annotations

import numpy as np

from .. import ff
from ..alphabets import TABLE_CAP, LocalRule, all_patterns, identity_rule, linear_rule
from ..ca import CellularAutomaton, algebraic_rule, compose, window_map
from ..errors import CapExceeded, IncompatibleAutomata, InconsistentOracles, PreconditionFailed
from ..groups import ball
from ._common import block_columns, require_algebraic
from .verdict import NO, UNKNOWN, YES, Verdict


def _linear_eta(ca: CellularAutomaton, N) -> LocalRule | None:
    """Least H with H W = P, where W is the window matrix on N and P reads
    the identity block of the source; None when x(1) is not determined."""
    A = ca.alphabet
    wm = window_map(ca, N)
    W = wm.matrix
    one = wm.source.index(ca.universe.identity)
    P = np.zeros((A.n, W.shape[1]), dtype=np.int64)
    P[:, block_columns([one], A.n)] = np.eye(A.n, dtype=np.int64)
    H = ff.solve_matrix_lexmin(W, P, A.p)
    if H is None:
        return None
    blocks = {g: H[:, i * A.n : (i + 1) * A.n] for i, g in enumerate(N)}
    return linear_rule(ca.universe, A, blocks)


def _group_eta(ca: CellularAutomaton, N, cap: int) -> LocalRule | None:
    """eta on A^N by dense enumeration; letters outside the image go to e."""
    A = ca.alphabet
    wm = window_map(ca, N)
    if A.size ** len(wm.source) > cap or A.size ** len(N) > cap:
        raise CapExceeded(f"window of {len(wm.source)} sites exceeds cap {cap}")
    X = all_patterns(A.size, len(wm.source))
    Y = wm.apply_array(X)
    idx = np.zeros(len(X), dtype=np.int64)
    for j in range(Y.shape[1]):
        idx = idx * A.size + Y[:, j]
    centre = X[:, wm.source.index(ca.universe.identity)]
    table = np.full(A.size ** len(N), A.identity, dtype=np.int64)
    table[idx] = centre
    if not np.array_equal(table[idx], centre):
        return None
    rule = LocalRule(ca.universe, A, N, "table", tuple(int(v) for v in table))
    return algebraic_rule(rule) or rule


def _identity_witness(ca: CellularAutomaton, cap: int):
    """None if ``ca`` is the identity, else a lex-least distinguishing pattern."""
    diff = ca.rule.difference_witness(identity_rule(ca.universe, ca.alphabet), cap)
    if diff is None:
        return None
    M, letters = diff
    return {"window": M.to_json(), "values": list(letters)}


def synthesize_inverse(ca: CellularAutomaton, max_radius: int = 4, cap: int = TABLE_CAP) -> Verdict:
    """Find N = ball(r) and eta: A^N -> A with eta(tau_N^+(x)) = x(1).

    The resulting CA sigma satisfies sigma o tau = Id; the certificate also
    records tau o sigma = Id, checked on rule level.
    """
    alg = require_algebraic(ca)
    G = alg.universe
    params = {"max_radius": max_radius}
    tried = []
    for r in range(max_radius + 1):
        N = ball(G, r)
        if alg.rule.body == "linear":
            eta = _linear_eta(alg, N)
        else:
            try:
                eta = _group_eta(alg, N, cap)
            except CapExceeded:
                tried.append({"radius": r, "result": "cap"})
                break
        tried.append({"radius": r, "result": "undetermined" if eta is None else "found"})
        if eta is None:
            continue
        sigma = CellularAutomaton(G, eta)
        left = _identity_witness(compose(sigma, alg, cap), cap)
        right = _identity_witness(compose(alg, sigma, cap), cap)
        if left is not None:
            raise InconsistentOracles("synthesized eta does not invert tau on the left")
        if right is not None:
            raise InconsistentOracles("sigma o tau = Id but tau o sigma != Id")
        return Verdict(
            "synthesize_inverse",
            YES,
            radius=r,
            witness={"window": N.to_json(), "inverse": eta.to_json()},
            transcript={
                "tried": tried,
                "eta_identity": "eta(tau_N^+(x)) = x(1)",
                "sigma_tau_identity": True,
                "tau_sigma_identity": True,
                "extension": "neutral letter outside the window image",
            },
            parameters=params,
        )
    return Verdict("synthesize_inverse", UNKNOWN, radius=max_radius, transcript={"tried": tried}, parameters=params)


def direct_finiteness_check(sigma: CellularAutomaton, tau: CellularAutomaton, cap: int = TABLE_CAP) -> Verdict:
    """Given sigma o tau = Id (checked), decide whether tau o sigma = Id."""
    if sigma.universe != tau.universe or sigma.alphabet != tau.alphabet:
        raise IncompatibleAutomata("automata must share universe and alphabet")
    s, t = _as_pair(sigma, tau)
    left = _identity_witness(compose(s, t, cap), cap)
    if left is not None:
        raise PreconditionFailed("sigma o tau is not the identity", left)
    right = _identity_witness(compose(t, s, cap), cap)
    transcript = {"sigma_tau_identity": True, "tau_sigma_identity": right is None}
    if right is None:
        return Verdict("direct_finiteness_check", YES, witness={"tau_sigma": "identity"}, transcript=transcript)
    return Verdict("direct_finiteness_check", NO, witness={"distinguishing_pattern": right}, transcript=transcript)


def _as_pair(sigma: CellularAutomaton, tau: CellularAutomaton) -> tuple[CellularAutomaton, CellularAutomaton]:
    """Both automata in a common algebraic body (linear or hom)."""
    s, t = require_algebraic(sigma), require_algebraic(tau)
    if s.rule.body != t.rule.body:
        raise IncompatibleAutomata("direct finiteness check needs two group or two linear automata")
    return s, t
