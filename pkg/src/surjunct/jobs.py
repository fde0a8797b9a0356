"""Job documents: schema, construction of automata and ring elements, and
execution into certificate records."""

from __future__ import annotations

import copy
import os
import time
from collections.abc import Mapping

import yaml
from jsonschema import Draft202012Validator

from . import __version__
from .alphabets import TABLE_CAP, Alphabet, identity_rule, random_linear_rule, rule_from_json, shift_rule
from .ca import CellularAutomaton
from .deciders import (
    NO,
    UNKNOWN,
    YES,
    Verdict,
    certify_injective,
    check_surjective_finite,
    exact_1d,
    goe_search,
    post_surjectivity,
    pre_injectivity,
    refute_injective,
    surjunctivity_sweep,
    synthesize_inverse,
)
from .deciders._common import SEARCH_BUDGET
from .errors import ConfigError
from .group_ring import (
    GroupRingMatrix,
    find_left_inverse,
    phi,
    regular_representation,
    verify_stable_finiteness_instance,
)
from .ff import rank
from .groups import FreeAbelianGroup, GroupUniverse, ball, universe_from_descriptor

COMMANDS = (
    "check-injective",
    "refute-injective",
    "check-surjective",
    "goe",
    "invert",
    "pre-injective",
    "post-surjective",
    "exact-1d",
    "sweep",
    "phi",
    "left-inverse",
    "stable-finite",
)

CAP_ENV = "SURJUNCT_CAP"

_ELEMENT = {"type": ["integer", "string", "array"]}
_NONNEG = {"type": "integer", "minimum": 0}

_UNIVERSE = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["cyclic", "dihedral", "symmetric", "product", "table", "free_abelian", "free"]},
        "n": {"type": "integer", "minimum": 1},
        "rank": {"type": "integer", "minimum": 1},
        "factors": {"type": "array", "items": {"$ref": "#/$defs/universe"}},
        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "identity": {"type": "integer"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_ALPHABET = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["set", "group", "vector"]},
        "size": {"type": "integer", "minimum": 1},
        "group": {"$ref": "#/$defs/universe"},
        "p": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 1},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_RULE = {
    "type": "object",
    "properties": {
        "alphabet": {"$ref": "#/$defs/alphabet"},
        "memory": {"type": "array", "items": _ELEMENT},
        "table": {"type": "array", "items": {"type": "integer"}},
        "hom": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "linear": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "shift": _ELEMENT,
        "identity": {"type": "boolean"},
        "random": {
            "type": "object",
            "properties": {"memory": {"type": "array", "items": _ELEMENT}},
            "required": ["memory"],
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_RING = {
    "type": "object",
    "properties": {
        "universe": {"$ref": "#/$defs/universe"},
        "p": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 1},
        "support": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [_ELEMENT, {"type": "array", "items": {"type": "integer"}}], "minItems": 2, "maxItems": 2},
        },
    },
    "required": ["p", "n", "support"],
    "additionalProperties": False,
}

_JOB_PROPERTIES = {
    "command": {"enum": list(COMMANDS)},
    "name": {"type": "string"},
    "universe": {"$ref": "#/$defs/universe"},
    "alphabet": {"$ref": "#/$defs/alphabet"},
    "rule": {"$ref": "#/$defs/rule"},
    "ring": {"$ref": "#/$defs/ring"},
    "beta": {"$ref": "#/$defs/ring"},
    "memory": {"type": "array", "items": _ELEMENT},
    "window": {"type": "array", "items": _ELEMENT, "minItems": 1},
    "window_radius": _NONNEG,
    "max_n": _NONNEG,
    "max_radius": _NONNEG,
    "period_bound": {"type": "integer", "minimum": 1},
    "support_radius": _NONNEG,
    "deviation_radius": _NONNEG,
    "search_radius": _NONNEG,
    "confirm": _NONNEG,
    "budget": {"type": "integer", "minimum": 1},
    "cap": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer"},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"universe": _UNIVERSE, "alphabet": _ALPHABET, "rule": _RULE, "ring": _RING},
    "type": "object",
    "properties": {
        **_JOB_PROPERTIES,
        "jobs": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "object", "properties": _JOB_PROPERTIES, "additionalProperties": False},
        },
    },
    "additionalProperties": False,
}

_VALIDATOR = Draft202012Validator(SCHEMA)


def validate_document(doc) -> None:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {err.message}")


def load_jobs(text: str) -> list[dict]:
    """Parse a YAML (or JSON) document into a list of job dictionaries.

    Top-level keys other than ``jobs`` are shared defaults for every job.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    validate_document(doc)
    shared = {k: v for k, v in doc.items() if k != "jobs"}
    if "jobs" not in doc:
        return [shared]
    return [{**copy.deepcopy(shared), **job} for job in doc["jobs"]]


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return TABLE_CAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{CAP_ENV} must be an integer") from exc
    if value < 1:
        raise ConfigError(f"{CAP_ENV} must be positive")
    return value


# building objects -------------------------------------------------------------------


def build_universe(job: Mapping) -> GroupUniverse:
    if "universe" in job:
        desc = job["universe"]
    elif "ring" in job and "universe" in job["ring"]:
        desc = job["ring"]["universe"]
    else:
        raise ConfigError("job needs a universe")
    try:
        return universe_from_descriptor(desc)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad universe: {exc}") from exc


def build_alphabet(job: Mapping) -> Alphabet:
    desc = job.get("alphabet") or job.get("rule", {}).get("alphabet")
    if desc is None:
        raise ConfigError("job needs an alphabet")
    try:
        return Alphabet.from_descriptor(desc)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad alphabet: {exc}") from exc


def build_ring(job: Mapping, key: str = "ring") -> GroupRingMatrix:
    G = build_universe(job)
    data = job[key]
    try:
        return GroupRingMatrix.from_json(data, universe=G)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad {key}: {exc}") from exc


def build_ca(job: Mapping) -> CellularAutomaton:
    if "rule" not in job:
        if "ring" in job:
            return phi(build_ring(job))
        raise ConfigError("job needs a rule or a ring element")
    G = build_universe(job)
    A = build_alphabet(job)
    spec = job["rule"]
    try:
        if "shift" in spec:
            rule = shift_rule(G, A, G.element_from_json(spec["shift"]))
        elif spec.get("identity"):
            rule = identity_rule(G, A)
        elif "random" in spec:
            if A.kind != "vector":
                raise ConfigError("random rules need a vector alphabet")
            memory = [G.element_from_json(g) for g in spec["random"]["memory"]]
            rule = random_linear_rule(G, A.p, A.n, memory, int(job.get("seed", 0)))
        else:
            rule = rule_from_json(G, spec, A)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad rule: {exc}") from exc
    return CellularAutomaton(G, rule)


def default_max_n(G: GroupUniverse) -> int:
    if isinstance(G, FreeAbelianGroup):
        return 6 if G.rank == 1 else 3
    return 4


def resolve(command: str, job: Mapping, overrides: Mapping | None = None) -> dict:
    """Job with command and all parameters filled in (flags win over the document)."""
    out = copy.deepcopy(dict(job))
    out["command"] = command
    for key, value in (overrides or {}).items():
        if value is not None:
            out[key] = value
    G = build_universe(out)
    out.setdefault("max_n", default_max_n(G))
    out.setdefault("max_radius", 4)
    out.setdefault("period_bound", 6)
    out.setdefault("budget", SEARCH_BUDGET)
    out.setdefault("cap", default_cap())
    out.setdefault("seed", 0)
    validate_document(out)
    return out


def job_window(job: Mapping, G: GroupUniverse):
    if "window" in job:
        return G.subset(G.element_from_json(g) for g in job["window"])
    return ball(G, int(job.get("window_radius", 1)))


# execution ---------------------------------------------------------------------------


def _report(name: str, witness, transcript=None) -> Verdict:
    return Verdict(name, YES, witness=witness, transcript=transcript or {})


def _check_surjective(ca: CellularAutomaton, job: Mapping) -> Verdict:
    if ca.universe.is_finite:
        return check_surjective_finite(ca, job["cap"])
    consistent = []
    for n in range(job["max_n"] + 1):
        E = ca.window(n)
        v = goe_search(ca, E, job["cap"])
        if v.no:
            v.transcript["windows_consistent"] = consistent
            v.radius = n
            return v
        consistent.append(n)
    return Verdict(
        "goe_search",
        UNKNOWN,
        radius=job["max_n"],
        transcript={"windows_consistent": consistent, "window_consistent": True},
        parameters={"max_n": job["max_n"]},
    )


def _left_inverse(job: Mapping, verify_pair: bool) -> Verdict:
    alpha = build_ring(job)
    G = alpha.universe
    R = int(job["max_radius"])
    if verify_pair and "beta" in job:
        beta = build_ring(job, "beta")
    else:
        beta = find_left_inverse(alpha, R)
    if beta is not None:
        if verify_pair:
            return verify_stable_finiteness_instance(alpha, beta)
        return Verdict("find_left_inverse", YES, radius=R, witness={"beta": beta.to_json()})
    transcript = {"note": f"none at radius {R}"}
    if G.is_finite:
        M = regular_representation(alpha)
        r = rank(M, alpha.p)
        transcript["regular_representation_rank"] = r
        if r < M.shape[0]:
            transcript["note"] = "regular representation singular, so no inverse exists"
            name = "verify_stable_finiteness_instance" if verify_pair else "find_left_inverse"
            return Verdict(name, NO, radius=R, witness={"regular_representation_rank": r}, transcript=transcript)
    name = "verify_stable_finiteness_instance" if verify_pair else "find_left_inverse"
    return Verdict(name, UNKNOWN, radius=R, transcript=transcript)


def execute(job: Mapping) -> Verdict:
    """Run the operation named by ``job['command']`` on a resolved job."""
    command = job["command"]
    cap = job["cap"]
    budget = job["budget"]
    if command == "sweep":
        G = build_universe(job)
        A = build_alphabet(job)
        if "memory" not in job:
            raise ConfigError("sweep needs a memory list")
        memory = [G.element_from_json(g) for g in job["memory"]]
        return surjunctivity_sweep(G, A, memory, budget=budget, cap=cap, max_n=min(job["max_n"], 3), period_bound=job["period_bound"])
    if command == "phi":
        ca = phi(build_ring(job))
        return _report("phi", {"rule": ca.rule.to_json()})
    if command == "left-inverse":
        return _left_inverse(job, verify_pair=False)
    if command == "stable-finite":
        return _left_inverse(job, verify_pair=True)
    ca = build_ca(job)
    if command == "check-injective":
        return certify_injective(ca, max_n=job["max_n"], confirm=job.get("confirm", 3), budget=budget)
    if command == "refute-injective":
        return refute_injective(ca, bound=job["period_bound"], cap=cap)
    if command == "check-surjective":
        return _check_surjective(ca, job)
    if command == "goe":
        return goe_search(ca, job_window(job, ca.universe), cap)
    if command == "invert":
        return synthesize_inverse(ca, max_radius=job["max_radius"], cap=cap)
    if command == "pre-injective":
        return pre_injectivity(ca, support_radius=job.get("support_radius", job["max_radius"]), budget=budget, cap=cap)
    if command == "post-surjective":
        return post_surjectivity(
            ca,
            deviation_radius=job.get("deviation_radius", 0),
            search_radius=job.get("search_radius", job["max_radius"]),
            budget=budget,
            cap=cap,
        )
    if command == "exact-1d":
        res = exact_1d(ca, cap)
        return _report("exact_1d", res.to_json())
    raise ConfigError(f"unknown command {command!r}")


def make_record(job: Mapping) -> dict:
    start = time.perf_counter()
    verdict = execute(job)
    return {
        "job": dict(job),
        "verdict": verdict.to_json(),
        "tool_version": __version__,
        "duration": round(time.perf_counter() - start, 6),
    }

