"""Command-line front end.

Exit codes: 1 usage, 2 file parse error, 3 invariant/engine failure,
4 parameter-constraint violation, 5 bound violation, 6 enumeration cap
exceeded.  Reports are canonical JSON (sorted keys, 17-significant-digit
floats), so identical inputs and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import __version__
from .engine import BranchCapExceeded, run_all_branches
from .quantifier import StrategyEncoding, Thresholds, decide, sandwich_check
from .reduction import ParameterConstraintError, analytic_bounds
from .optimize import optimize_product_overlap
from .serialization import (
    SchemaError,
    bundle_from_json,
    bundle_to_json,
    canonical_dumps,
    load_json,
    family_members_from_json,
    reduction_from_verifier,
    resource_from_json,
    state_fingerprint,
    strategy_from_json,
    verifier_from_json,
)
from .states import InvariantViolation
from .tolerances import ATOL_COMPARE, ATOL_STATE, PRUNE_PROB
from .universality import PrecisionParams, SearchCapExceeded, check_universality, evaluate_witness

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_PARAMETER = 4
EXIT_BOUND = 5
EXIT_CAP = 6


class UsageError(Exception):
    pass


class BoundViolation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerances() -> dict:
    return {"atol_state": ATOL_STATE, "atol_compare": ATOL_COMPARE, "prune_prob": PRUNE_PROB}


def _report_skeleton(command: str, parameters: dict) -> dict:
    return {
        "tool": {"name": "mbqclab", "version": __version__},
        "command": command,
        "parameters": parameters,
        "tolerances": _tolerances(),
    }


def _write_report(report: dict, out: str, fmt: str, table_key: str, columns: list[str]) -> None:
    if fmt == "json":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(canonical_dumps(report))
            fh.write("\n")
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in report[table_key]:
            writer.writerow([row[c] for c in columns])


def _load_strategy_arg(arg: str, bundle):
    if arg == "honest":
        if bundle is None:
            raise UsageError("--strategy honest requires --bundle")
        return bundle.honest_strategy
    return strategy_from_json(load_json(arg))


def _epsilon_from(args, bundle) -> float:
    if getattr(args, "epsilon", None) is not None:
        return args.epsilon
    if getattr(args, "t", None) is not None:
        return 2.0 ** (-args.t)
    if bundle is not None and bundle.params.t is not None:
        return bundle.params.epsilon
    raise UsageError("no precision given: pass --epsilon or --t")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    resource = resource_from_json(load_json(args.resource))
    strategy = strategy_from_json(load_json(args.strategy))
    mixture = run_all_branches(resource, strategy, args.y, max_branches=args.max_branches)
    rho = mixture.density
    purity = float(np.real(np.trace(rho.matrix @ rho.matrix)))
    report = _report_skeleton(
        "run",
        {
            "resource": os.path.basename(args.resource),
            "strategy": os.path.basename(args.strategy),
            "y": args.y,
            "seed": args.seed,
            "max_branches": args.max_branches,
        },
    )
    report["branches"] = [
        {"m": b.m, "p": b.probability, "state_fingerprint": state_fingerprint(b.post_state)}
        for b in mixture.branches
    ]
    report["mixture"] = {
        "num_branches": len(mixture.branches),
        "total_probability": mixture.total_probability,
        "pruned_mass_bound": mixture.pruned_mass_bound,
        "purity": purity,
        "num_output_qubits": mixture.num_output,
    }
    _write_report(report, args.out, args.format, "branches", ["m", "p", "state_fingerprint"])
    return 0


def cmd_reduce(args) -> int:
    verifier = verifier_from_json(load_json(args.verifier))
    if args.r < 2 * args.t + 1:
        raise ParameterConstraintError(f"r={args.r} violates r >= 2t+1 for t={args.t}")
    red = reduction_from_verifier(verifier, args.r, args.t)
    report = _report_skeleton(
        "reduce",
        {
            "verifier": os.path.basename(args.verifier),
            "r": args.r,
            "t": args.t,
            "seed": args.seed,
        },
    )
    report["bundle"] = bundle_to_json(red)
    report["summary"] = {
        "unitary_qubits": red.params.num_unitary_qubits,
        "resource_qubits": red.params.num_resource_qubits,
        "witnesses": 1 << red.params.w,
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(report))
        fh.write("\n")
    return 0


def _load_bundle_instance(args):
    """Resolve (resource, family, bundle-or-None) from CLI arguments."""
    if args.bundle:
        red = bundle_from_json(load_json(args.bundle)["bundle"])
        return red.resource, red.family, red
    if not (args.resource and args.family):
        raise UsageError("need either --bundle or both --resource and --family")
    return (
        resource_from_json(load_json(args.resource)),
        family_members_from_json(load_json(args.family)),
        None,
    )


def cmd_check(args) -> int:
    resource, family, bundle = _load_bundle_instance(args)
    if 1 << family.w > 4096:
        raise SearchCapExceeded("witness space exceeds 2**12")
    strategy = _load_strategy_arg(args.strategy, bundle)
    eps = _epsilon_from(args, bundle)
    verdict = check_universality(
        resource, strategy, family, PrecisionParams(eps), threads=args.threads
    )
    report = _report_skeleton(
        "check",
        {
            "bundle": os.path.basename(args.bundle) if args.bundle else None,
            "resource": os.path.basename(args.resource) if args.resource else None,
            "family": os.path.basename(args.family) if args.family else None,
            "strategy_table_ref": args.strategy,
            "epsilon": eps,
            "seed": args.seed,
            "threads": args.threads,
        },
    )
    report["verdict"] = verdict.kind
    report["witness"] = verdict.witness
    report["distance"] = verdict.distance
    report["epsilon"] = eps
    report["strategy_table_ref"] = args.strategy
    report["per_y"] = [
        {"y": p.y, "distance": p.distance, "fidelity": p.fidelity} for p in verdict.per_y
    ]
    _write_report(report, args.out, args.format, "per_y", ["y", "distance", "fidelity"])
    return 0


def cmd_bounds(args) -> int:
    report_bundle = load_json(args.bundle)
    red = bundle_from_json(report_bundle["bundle"])
    params = red.params
    if params.t is None:
        raise UsageError("bundle carries no t; bounds need the precision exponent")
    rows = []
    violated = False
    for y in red.family.witnesses():
        # acceptance probability of the underlying verifier, recovered from
        # the wrapped unitary: |<y 0...|U|y 0...>| = 1 - p
        target = red.family.target_ket(y)
        diag = abs(complex(np.vdot(_basis_state(params, y), target.amplitudes)))
        p = 1.0 - diag
        table = analytic_bounds(p, params.r, params.t)
        pw = evaluate_witness(red.resource, red.honest_strategy, red.family, y)
        if args.mode == "yes":
            overlap_sq = optimize_product_overlap(target, seed=args.seed).overlap_sq
            margin_product = table.yes_branch_bound - overlap_sq
            floor = 1.0 - np.sqrt(table.yes_branch_bound)
            margin_distance = pw.distance - floor
            rows.append(
                {
                    "y": y,
                    "p": p,
                    "distance": pw.distance,
                    "fidelity": pw.fidelity,
                    "product_overlap_sq": overlap_sq,
                    "branch_bound": table.yes_branch_bound,
                    "distance_floor": floor,
                    "margin_product": margin_product,
                    "margin_distance": margin_distance,
                }
            )
            violated |= min(margin_product, margin_distance) < -args.margin_tol
        else:
            gap = abs(pw.fidelity**2 - table.no_fidelity_sq_floor)
            margin_ceiling = table.no_distance_ceiling - pw.distance
            rows.append(
                {
                    "y": y,
                    "p": p,
                    "distance": pw.distance,
                    "fidelity_sq": pw.fidelity**2,
                    "expected_fidelity_sq": table.no_fidelity_sq_floor,
                    "fidelity_sq_gap": gap,
                    "distance_ceiling": table.no_distance_ceiling,
                    "margin_ceiling": margin_ceiling,
                }
            )
            violated |= gap > ATOL_COMPARE or margin_ceiling < -args.margin_tol
    report = _report_skeleton(
        "bounds",
        {
            "bundle": os.path.basename(args.bundle),
            "mode": args.mode,
            "seed": args.seed,
            "margin_tol": args.margin_tol,
            "r": params.r,
            "t": params.t,
        },
    )
    report["table"] = rows
    report["violated"] = violated
    cols = list(rows[0].keys())
    _write_report(report, args.out, args.format, "table", cols)
    if violated:
        raise BoundViolation("an analytic bound was violated; see the report table")
    return 0


def _basis_state(params, y: str) -> np.ndarray:
    n_out = params.num_unitary_qubits
    vec = np.zeros(1 << n_out, dtype=np.complex128)
    vec[int(y + "0" * (n_out - params.w), 2)] = 1.0
    return vec


def cmd_pi2(args) -> int:
    report_bundle = load_json(args.bundle)
    red = bundle_from_json(report_bundle["bundle"])
    eps = _epsilon_from(args, red)
    a = args.a if args.a is not None else 1.0 - 2.0 * eps
    b = args.b if args.b is not None else 2.0 * eps
    if a <= b:
        raise UsageError(f"need a > b, got a={a} b={b} (epsilon={eps})")
    thresholds = Thresholds(a, b)
    encoding = StrategyEncoding.for_instance(red.resource, red.family)
    cap = args.lam if args.lam is not None else 16
    report = _report_skeleton(
        "pi2",
        {
            "bundle": os.path.basename(args.bundle),
            "a": a,
            "b": b,
            "epsilon": eps,
            "lambda": encoding.lambda_bits,
            "seed": args.seed,
            "threads": args.threads,
        },
    )
    decision = decide(red.resource, red.family, encoding, thresholds, max_lambda=cap)
    report["verdict"] = decision.verdict.value
    report["a"] = a
    report["b"] = b
    report["lambda"] = encoding.lambda_bits
    report["table"] = [
        {
            "lambda_bits": row.bits,
            "max_p": row.max_p,
            "min_p": row.min_p,
            "argmax_y": row.argmax_y,
            "argmin_y": row.argmin_y,
        }
        for row in decision.rows
    ]
    # sandwich diagnostics for the two corner encodings
    sandwich = []
    for bits in (
        "0" * encoding.lambda_bits,
        "1" * encoding.lambda_bits,
    ):
        strat = encoding.decode(bits)
        for y in red.family.witnesses():
            rec = sandwich_check(red.resource, strat, red.family, y)
            sandwich.append(
                {
                    "lambda_bits": bits,
                    "y": y,
                    "p": rec.p,
                    "distance": rec.distance,
                    "lower": rec.lower,
                    "upper": rec.upper,
                    "holds": rec.holds,
                }
            )
    report["sandwich"] = sandwich
    _write_report(
        report, args.out, args.format, "table",
        ["lambda_bits", "max_p", "min_p", "argmax_y", "argmin_y"],
    )
    return 0


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_common(p: _Parser) -> None:
    p.add_argument("--out", required=True, help="output report path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("MBQC_LAB_THREADS", "1")),
        help="worker threads for per-witness sweeps (default: MBQC_LAB_THREADS or 1)",
    )
    p.add_argument("--max-branches", type=int, default=1 << 20, dest="max_branches")


def build_parser() -> _Parser:
    parser = _Parser(prog="mbqc-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mbqc-lab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run", parents=[], help="enumerate all branches of one MBQC run")
    p.add_argument("--resource", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--y", required=True, help="witness bit string (may be empty)")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reduce", help="build a reduction bundle from a verifier file")
    p.add_argument("--verifier", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("check", help="universality verdict for a strategy")
    p.add_argument("--bundle")
    p.add_argument("--resource")
    p.add_argument("--family")
    p.add_argument("--strategy", default="honest", help='"honest" (bundle) or a table file')
    p.add_argument("--epsilon", type=float)
    p.add_argument("--t", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="measured values against the analytic bound chains")
    p.add_argument("--bundle", required=True)
    p.add_argument("--mode", choices=("yes", "no"), required=True)
    p.add_argument("--margin-tol", type=float, default=1e-6, dest="margin_tol")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("pi2", help="two-quantifier decision over encoded strategies")
    p.add_argument("--bundle", required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--t", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--lambda", type=int, dest="lam", help="cap on the encoding width")
    _add_common(p)
    p.set_defaults(func=cmd_pi2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParameterConstraintError as exc:
        print(f"parameter constraint: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (SearchCapExceeded, BranchCapExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvariantViolation, ValueError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
