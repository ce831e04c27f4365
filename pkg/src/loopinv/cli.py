"""``loopinv`` command line.

Exit codes: 0 success, 1 verification failure, 2 file error, 3 argument
error, 4 state validation error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import invariants as inv
from . import verify as ver
from .errors import LoopInvError, ParseError
from .linkspace import LoopSpec, parse_loop
from .qstate import (
    PureState,
    as_density,
    ghz_state,
    haar_random_pure,
    product_state,
    random_density,
    w_state,
)
from .stateio import StateFileError, read_state, state_to_dict

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_FILE = 2
EXIT_ARGS = 3
EXIT_STATE = 4

SUITES = ("su2", "sl2c", "identities", "independence", "fidelity")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_path(text: str, n_sites: int | None = None) -> LoopSpec:
    """Parse a comma-separated path such as ``"0,~1,2"`` into a loop."""
    return parse_loop(text, n_sites)


def _dump(report: dict, out) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_compute(args) -> int:
    try:
        state = read_state(args.state)
    except StateFileError as exc:
        print(f"loopinv: {exc}", file=sys.stderr)
        return EXIT_FILE
    except LoopInvError as exc:
        print(f"loopinv: invalid state: {exc}", file=sys.stderr)
        return EXIT_STATE
    try:
        loops = [parse_path(p, state.n_sites) for p in args.path or []]
    except ParseError as exc:
        print(f"loopinv: invalid path: {exc}", file=sys.stderr)
        return EXIT_ARGS

    rho = as_density(state)
    reports = [inv.loop_invariant(rho, lp) for lp in loops]
    out = {
        "n_sites": state.n_sites,
        "kind": "pure" if isinstance(state, PureState) else "mixed",
        "invariants": {r.label: r.value for r in reports},
        "reports": [r.as_dict() for r in reports],
    }
    if isinstance(state, PureState) and state.n_sites == 3:
        out["catalogue"] = inv.catalogue(state)
    _dump(out, args.out)
    return EXIT_OK


def _suite_su2(args) -> list[dict]:
    loops = list(inv.STANDARD_LOOPS.values())
    tol = args.tol if args.tol is not None else ver.SU2_TOL
    checks = [r.as_dict() for r in ver.check_su2_invariance(loops, args.trials, 10, args.seed, tol)]
    mixed = ver.check_su2_invariance(
        [LoopSpec.of([0, 1, 2, 3])], args.trials, 1, args.seed, tol, n_sites=4, rank=4
    )[0].as_dict()
    mixed["label"] += " rank-4 mixed, 4 qubits"
    return checks + [mixed]


def _suite_sl2c(args) -> list[dict]:
    tol = args.tol if args.tol is not None else ver.SL2C_TOL
    quantities = [*list(inv.FLIPPED_LOOPS.values())[:3], ver.DetLink((0, 1))]
    checks = [r.as_dict() for r in ver.check_sl2c_invariance(quantities, args.trials, 10, args.seed, tol)]
    for label, frac in ver.negative_control_fractions(args.trials, 10, args.seed).items():
        checks.append({"label": f"negative control {label}", "fraction_above_1e-3": frac,
                       "required": 0.95, "passed": frac >= 0.95})
    return checks


def _suite_identities(args) -> list[dict]:
    report = ver.identity_suite(args.seed, args.trials)
    checks = []
    for c in report.checks.values():
        if args.tol is not None:
            c = ver.InvarianceResult(c.label, c.trials, c.max_residual, args.tol)
        checks.append(c.as_dict())
    return checks


def _suite_independence(args) -> list[dict]:
    checks = []
    for k, rng in enumerate(ver.trial_rngs(args.seed, args.trials)):
        res = ver.jacobian_independence(haar_random_pure(3, rng))
        checks.append({
            "label": f"state {k}",
            "rank": res.rank,
            "singular_values": res.singular_values.tolist(),
            "passed": res.rank == 6,
        })
    return checks


def _suite_fidelity(args) -> list[dict]:
    cases = [
        ("|000>", product_state([0, 0, 0]), LoopSpec.of([0, 1, 2])),
        ("GHZ", ghz_state(), LoopSpec.of([0, 1])),
        ("W", w_state(), LoopSpec.of([0, 1, 2])),
    ]
    cfg = ver.FidelityConfig(k=args.k, samples=args.samples, seed=args.seed)
    checks = []
    for name, psi, loop in cases:
        est = ver.mc_fidelity(psi, loop, cfg)
        checks.append({"label": f"{name} {loop.label()} k={args.k:g}", **est.as_dict(),
                       "z": est.z, "passed": est.z < 5.0})
    return checks


def cmd_verify(args) -> int:
    if args.trials is not None and args.trials < 1:
        print("loopinv: --trials must be >= 1", file=sys.stderr)
        return EXIT_ARGS
    if args.seed < 0:
        print("loopinv: --seed must be non-negative", file=sys.stderr)
        return EXIT_ARGS
    if args.samples < 1000:
        print("loopinv: --samples must be >= 1000", file=sys.stderr)
        return EXIT_ARGS
    if not args.k > 0:
        print("loopinv: --k must be positive", file=sys.stderr)
        return EXIT_ARGS
    if args.tol is not None and not args.tol > 0:
        print("loopinv: --tol must be positive", file=sys.stderr)
        return EXIT_ARGS
    if args.trials is None:
        args.trials = {"identities": 1000}.get(args.suite, 100)
    checks = {
        "su2": _suite_su2,
        "sl2c": _suite_sl2c,
        "identities": _suite_identities,
        "independence": _suite_independence,
        "fidelity": _suite_fidelity,
    }[args.suite](args)
    passed = all(c["passed"] for c in checks)
    _dump({"suite": args.suite, "seed": args.seed, "trials": args.trials,
           "checks": checks, "passed": passed}, args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_state(args) -> int:
    n = args.n_sites
    if args.kind == "ghz":
        state = ghz_state(n)
    elif args.kind == "w":
        state = w_state(n)
    elif args.kind == "product":
        state = product_state([0] * n)
    elif args.kind == "haar":
        state = haar_random_pure(n, args.seed)
    else:
        state = random_density(n, args.rank or 2**n, args.seed)
    _dump(state_to_dict(state), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="loopinv", description="Loop-trace local invariants of multi-qubit states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="evaluate loop invariants of a state file")
    c.add_argument("--state", required=True, help="JSON state file")
    c.add_argument("--path", action="append", help='closed path, e.g. "0,1,2" or "~0,~1" (repeatable)')
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run a numerical certification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=None, help="number of random states")
    v.add_argument("--tol", type=float, default=None, help="override the suite tolerance")
    v.add_argument("--samples", type=int, default=1_000_000)
    v.add_argument("--k", type=float, default=1.0)
    v.add_argument("--out", default="-")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("state", help="write a standard state as a JSON state file")
    s.add_argument("kind", choices=("ghz", "w", "product", "haar", "mixed"))
    s.add_argument("--n-sites", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rank", type=int, default=None)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_state)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"loopinv: {exc}", file=sys.stderr)
        return EXIT_ARGS
    try:
        return args.func(args)
    except LoopInvError as exc:
        print(f"loopinv: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
