"""Command-line driver: run deciders on configuration documents, replay certificates."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .deciders import EXIT_CODES
from .errors import ConfigError, SurjunctError
from .jobs import CAP_ENV, COMMANDS, load_jobs, make_record, resolve
from .replay import replay

EXIT_INPUT_ERROR = 3

_HELP = {
    "check-injective": "certify injectivity by kernel-window emptiness (V_n = empty)",
    "refute-injective": "search colliding configurations (exhaustive or periodic)",
    "check-surjective": "exact on finite universes, Garden-of-Eden windows elsewhere",
    "goe": "look for a Garden-of-Eden pattern on one window",
    "invert": "synthesize an inverse local rule",
    "pre-injective": "pre-injectivity via finitely supported kernel elements",
    "post-surjective": "post-surjectivity via preimages of single-site deviations",
    "exact-1d": "de Bruijn graph oracle for automata on Z",
    "sweep": "classify every hom rule on a memory set and check surjunctivity",
    "phi": "linear automaton of a group-ring matrix",
    "left-inverse": "least left inverse of a group-ring matrix within a radius",
    "stable-finite": "check that a one-sided inverse is two-sided",
}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _error_record(job, exc: Exception) -> dict:
    return {
        "job": job,
        "error": {"type": type(exc).__name__, "message": str(exc)},
        "tool_version": __version__,
    }


def run_one(job: dict) -> tuple[dict, int]:
    try:
        record = make_record(job)
    except SurjunctError as exc:
        return _error_record(job, exc), EXIT_INPUT_ERROR
    return record, EXIT_CODES[record["verdict"]["status"]]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def run(command: str, config: str, overrides: dict, workers: int = 1, out=None) -> int:
    """Execute every job of ``config``; one JSON line per job, in job order."""
    out = out or sys.stdout
    try:
        jobs = [resolve(command, job, overrides) for job in load_jobs(_read(config))]
    except (OSError, SurjunctError) as exc:
        out.write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return EXIT_INPUT_ERROR
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(job) for job in jobs]
    for record, _ in results:
        out.write(dumps(record) + "\n")
    out.flush()
    return max(code for _, code in results)


def _compatible(version: str) -> bool:
    return str(version).split(".")[0] == __version__.split(".")[0]


def verify(path: str, out=None) -> int:
    """Replay every record of a JSON-lines certificate file."""
    out = out or sys.stdout
    try:
        lines = [line for line in _read(path).splitlines() if line.strip()]
        records = [json.loads(line) for line in lines]
    except (OSError, ValueError) as exc:
        out.write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return EXIT_INPUT_ERROR
    code = 0
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or not {"job", "verdict", "tool_version"} <= rec.keys():
            out.write(dumps({"index": i, "error": "not a certificate record"}) + "\n")
            return EXIT_INPUT_ERROR
        if not _compatible(rec["tool_version"]):
            out.write(dumps({"index": i, "error": f"incompatible tool version {rec['tool_version']}"}) + "\n")
            return EXIT_INPUT_ERROR
        try:
            ok, message = replay(rec)
        except ConfigError as exc:
            out.write(dumps({"index": i, "error": str(exc)}) + "\n")
            return EXIT_INPUT_ERROR
        verdict = rec["verdict"]
        out.write(
            dumps({"index": i, "decider": verdict.get("decider"), "status": verdict.get("status"), "confirmed": ok, "message": message})
            + "\n"
        )
        if not ok:
            code = 1
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surjunct",
        description="Cellular automata over groups: certificates for injectivity, surjectivity, "
        "inverses and group-ring stable finiteness.",
        epilog="Exit status: 0 certified yes (or clean report), 1 certified no, 2 unknown, 3 input error. "
        f"The default table/enumeration cap is 2^24, overridable through ${CAP_ENV}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("config", help="YAML or JSON job document ('-' for stdin)")
        p.add_argument("--max-radius", type=int, help="largest inverse/search radius (default 4)")
        p.add_argument("--max-n", type=int, help="largest kernel-window index n (default 6 on Z, 3 on Z^2, 4 elsewhere)")
        p.add_argument("--period-bound", type=int, help="largest lattice index for periodic refutation (default 6)")
        p.add_argument("--budget", type=int, help="node budget for backtracking searches (default 2000000)")
        p.add_argument("--seed", type=int, help="seed for random rules (default 0)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for batches (default 1)")
        p.add_argument("--cap", type=int, help=f"dense enumeration cap (default 2^24 or ${CAP_ENV})")
    v = sub.add_parser("verify", help="replay certificate records without searching")
    v.add_argument("certificates", help="JSON-lines file produced by a run ('-' for stdin)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return verify(args.certificates)
    overrides = {
        "max_radius": args.max_radius,
        "max_n": args.max_n,
        "period_bound": args.period_bound,
        "budget": args.budget,
        "seed": args.seed,
        "cap": args.cap,
    }
    return run(args.command, args.config, overrides, workers=max(1, args.jobs))


if __name__ == "__main__":
    sys.exit(main())
