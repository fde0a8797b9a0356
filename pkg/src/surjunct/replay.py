"""Witness-only replay of certificate records.

Every check here evaluates the automaton on the recorded witness (or redoes a
single deterministic linear-algebra step); nothing escalates radii or searches.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from . import ff
from .alphabets import rule_from_json
from .ca import (
    CellularAutomaton,
    Pattern,
    as_algebraic,
    compose,
    config_indices,
    full_matrix,
    periodic_action,
    window_map,
)
from .deciders import NO, UNKNOWN, YES, exact_1d, kernel_window, surjunctivity_sweep
from .deciders._common import enumerate_images, is_scalar_laurent
from .deciders.inverse import _identity_witness
from .errors import ConfigError, SurjunctError
from .group_ring import GroupRingMatrix, gr_mul, phi, regular_representation, unit
from .groups import product_set
from .jobs import build_alphabet, build_ca, build_ring, build_universe


class ReplayMismatch(Exception):
    pass


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ReplayMismatch(message)


def _pattern(G, data) -> Pattern:
    return Pattern.from_json(G, data)


def _finite_apply(ca: CellularAutomaton, p: Pattern) -> tuple:
    G = ca.universe
    _require(len(p.window) == G.order, "pattern must cover the finite universe")
    return tuple(int(v) for v in ca.apply_finite(np.array([p.values], dtype=np.int64))[0])


def _supported_image(ca: CellularAutomaton, w: Pattern) -> Pattern:
    """tau(w) on S M for w supported in S (zero elsewhere)."""
    G = ca.universe
    S = w.window
    T = product_set(G, S, ca.memory)
    wm = window_map(ca, T)
    e = ca.alphabet.identity
    vals = [w[g] if g in S else e for g in wm.source]
    return Pattern(T, wm.apply(vals))


def _in_window_image(ca: CellularAutomaton, orphan: Pattern, cap: int) -> bool:
    wm = window_map(ca, orphan.window)
    A = ca.alphabet
    if ca.rule.body == "linear":
        W = wm.matrix
        y = A.decode(np.array(orphan.values, dtype=np.int64)).reshape(-1)
        return ff.solve_lexmin(W, y, A.p) is not None
    idx = 0
    for v in orphan.values:
        idx = idx * A.size + int(v)
    return bool(np.isin(idx, wm.image_indices(cap)))


def _check_pair(ca: CellularAutomaton, pair) -> None:
    G = ca.universe
    a, b = (_pattern(G, p) for p in pair)
    _require(a.values != b.values, "pair entries coincide")
    if G.is_finite:
        _require(_finite_apply(ca, a) == _finite_apply(ca, b), "pair images differ")
        return
    # asymptotic pair: compare images of both on a common window
    alg = as_algebraic(ca)
    _require(alg is not None and a.window == b.window, "asymptotic pair needs a group automaton")
    e = alg.alphabet.identity
    _require(all(v == e for v in a.values), "first pair entry must be neutral")
    img = _supported_image(alg, b)
    _require(all(v == e for v in img.values), "second entry is not in the kernel")


def _replay_verdict(record: Mapping) -> None:
    job = record["job"]
    v = record["verdict"]
    status = v["status"]
    decider = v["decider"]
    witness = v.get("witness")
    cap = job.get("cap", 1 << 24)
    if decider == "certify_injective":
        ca = build_ca(job)
        if status == YES:
            _require(kernel_window(ca, witness["n"], job.get("budget", 2_000_000)).empty, "V_n is not empty")
        elif status == NO:
            G = ca.universe
            x = _pattern(G, witness["kernel_element"])
            alg = as_algebraic(ca)
            _require(x[G.identity] != alg.alphabet.identity, "kernel element is neutral at 1")
            _require(all(y == alg.alphabet.identity for y in _finite_apply(alg, x)), "not a kernel element")
        return
    if decider == "refute_injective":
        if status != NO:
            return
        ca = build_ca(job)
        if "lattice" in witness:
            act = periodic_action(ca, witness["lattice"])
            a, b = witness["pair"]
            _require(a != b, "pair entries coincide")
            imgs = act.ca.apply_finite(np.array([a, b], dtype=np.int64))
            _require(np.array_equal(imgs[0], imgs[1]), "periodic images differ")
        else:
            _check_pair(ca, witness["pair"])
        return
    if decider in ("goe_search", "check_surjective_finite"):
        ca = build_ca(job)
        G = ca.universe
        if status == NO:
            orphan = _pattern(G, witness["orphan"])
            _require(not _in_window_image(ca, orphan, cap), "orphan has a preimage")
        elif status == YES:
            A = ca.alphabet
            if "rank" in witness:
                M = full_matrix(ca)
                _require(ff.rank(M, A.p) == M.shape[0] == witness["rank"], "rank is not full")
            else:
                _, Y = enumerate_images(ca, cap)
                size = len(np.unique(config_indices(Y, A.size)))
                _require(size == witness["image_size"] == A.size**G.order, "image is not everything")
        return
    if decider == "synthesize_inverse":
        if status != YES:
            return
        ca = build_ca(job)
        alg = as_algebraic(ca)
        eta = rule_from_json(ca.universe, witness["inverse"], alg.alphabet)
        sigma = CellularAutomaton(ca.universe, eta)
        _require(_identity_witness(compose(sigma, alg, cap), cap) is None, "sigma o tau != Id")
        _require(_identity_witness(compose(alg, sigma, cap), cap) is None, "tau o sigma != Id")
        return
    if decider == "pre_injectivity":
        ca = build_ca(job)
        if status == NO:
            _check_pair(ca, witness["pair"])
        elif status == YES:
            _replay_injective_side(ca, witness, job)
        return
    if decider == "post_surjectivity":
        ca = build_ca(job)
        G = ca.universe
        if status == YES and "preimages" not in witness:
            _replay_verdict({"job": job, "verdict": dict(v, decider="check_surjective_finite")})
        elif status == YES:
            alg = as_algebraic(ca)
            A = alg.alphabet
            letters = {item["letter"] for item in witness["preimages"]}
            if alg.rule.body == "linear":
                needed = {A.letter(tuple(int(i == k) for i in range(A.n))) for k in range(A.n)}
            else:
                needed = set(range(A.size)) - {A.identity}
            _require(needed <= letters, "deviations not all realized")
            for item in witness["preimages"]:
                img = _supported_image(alg, _pattern(G, item["preimage"]))
                for g, y in zip(img.window, img.values):
                    want = item["letter"] if g == G.identity else A.identity
                    _require(y == want, "preimage does not map to the deviation")
        elif status == NO:
            if "laurent_support" in witness:
                alg = as_algebraic(ca)
                _require(is_scalar_laurent(alg), "scalar oracle needs a scalar rule on Z^d")
                support = [G.element_to_json(g) for g in alg.rule.support()]
                _require(support == witness["laurent_support"] and len(support) != 1, "polynomial is a unit")
            else:
                orphan = _pattern(G, witness["orphan"])
                _require(not _in_window_image(ca, orphan, cap), "deviation has a preimage")
        return
    if decider == "exact_1d":
        ca = build_ca(job)
        _require(exact_1d(ca, cap).to_json() == witness, "de Bruijn analysis differs")
        return
    if decider == "surjunctivity_sweep":
        G = build_universe(job)
        A = build_alphabet(job)
        memory = [G.element_from_json(g) for g in job["memory"]]
        again = surjunctivity_sweep(G, A, memory, budget=job["budget"], cap=cap, max_n=min(job["max_n"], 3), period_bound=job["period_bound"])
        _require(again.status == status and again.witness == witness, "sweep report differs")
        return
    if decider == "phi":
        ca = phi(build_ring(job))
        _require(ca.rule.to_json() == witness["rule"], "phi image differs")
        return
    if decider in ("find_left_inverse", "verify_stable_finiteness_instance"):
        _replay_ring(job, v)
        return
    raise ConfigError(f"unknown decider {decider!r}")


def _replay_injective_side(ca: CellularAutomaton, witness, job) -> None:
    G = ca.universe
    if "laurent_support" in witness:
        alg = as_algebraic(ca)
        _require(is_scalar_laurent(alg), "scalar oracle needs a scalar rule on Z^d")
        _require(len(alg.rule.support()) > 0, "zero polynomial")
    elif "n" in witness:
        _require(kernel_window(ca, witness["n"], job.get("budget", 2_000_000)).empty, "V_n is not empty")
    else:
        _require(G.is_finite, "exhaustive route needs a finite universe")
        A = ca.alphabet
        _, Y = enumerate_images(ca, job.get("cap", 1 << 24))
        _require(len(np.unique(config_indices(Y, A.size))) == A.size**G.order, "not injective")


def _replay_ring(job: Mapping, v: Mapping) -> None:
    alpha = build_ring(job)
    G, p, n = alpha.universe, alpha.p, alpha.n
    status, witness = v["status"], v.get("witness") or {}
    one = unit(G, p, n)
    if status == NO and "regular_representation_rank" in witness:
        M = regular_representation(alpha)
        r = ff.rank(M, p)
        _require(r == witness["regular_representation_rank"] and r < M.shape[0], "regular representation is invertible")
        return
    if v["decider"] == "find_left_inverse":
        if status == YES:
            beta = GroupRingMatrix.from_json(witness["beta"], universe=G)
            _require(gr_mul(beta, alpha) == one, "beta alpha != 1")
        return
    if status == UNKNOWN:
        return
    beta = GroupRingMatrix.from_json(witness["beta"], universe=G)
    _require(gr_mul(beta, alpha) == one, "beta alpha != 1")
    two_sided = gr_mul(alpha, beta) == one
    _require(two_sided == (status == YES), "alpha beta disagrees with the recorded status")
    if status == NO:
        defect = GroupRingMatrix.from_json(witness["defect"], universe=G)
        _require(gr_mul(alpha, beta) - one == defect, "defect differs")


def replay(record: Mapping) -> tuple[bool, str]:
    """(confirmed, message) for one certificate record."""
    try:
        _replay_verdict(record)
    except ReplayMismatch as exc:
        return False, str(exc)
    except ConfigError:
        raise
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        return False, f"malformed witness: {exc!r}"
    except SurjunctError as exc:
        return False, f"{type(exc).__name__}: {exc}"
    return True, "confirmed"
