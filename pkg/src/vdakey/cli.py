"""Command-line front end.

Subcommands write CSV to ``--out`` (``-`` for stdout). Without ``--out`` the
file goes to ``$VDAKEY_OUTPUT_DIR`` (default: the working directory) under a
fixed name. Every scenario field is a flag; see ``vdakey <cmd> --help``.

Exit status: 0 on completion, 2 on bad usage or input, 3 when the demo's
keys differ, 4 when the demo cannot meet its security targets.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import reports
from .errors import ContractViolation, InfeasibleError
from .protocol import plan_protocol, run_protocol
from .scenario import Scenario, load_scenario, parse_grid

OUTPUT_ENV = "VDAKEY_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INFEASIBLE = 0, 2, 3, 4

DEFAULT_NAMES = {
    "sweep-correlation": "correlation_sweep.csv",
    "pe-curve": "pe_curve.csv",
    "table": "table_method{method}.csv",
    "distributions": "distributions.csv",
}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("scenario")
    g.add_argument("--config", metavar="PATH", help="INI scenario file")
    g.add_argument("--out", metavar="PATH", help="output CSV path, '-' for stdout")
    for f in fields(Scenario):
        if f.name == "method":
            continue
        g.add_argument("--" + f.name.replace("_", "-"), dest=f.name, metavar=f.name.upper(),
                       help=f"default {f.default}")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="vdakey", description="Ring-antenna key agreement simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep-correlation", parents=[common],
                   help="noiseless B-vs-E correlation of both functionals over the offset sweep")
    sub.add_parser("pe-curve", parents=[common], help="disagreement probability: closed form and Monte Carlo")
    t = sub.add_parser("table", parents=[common], help="optimized key rates per correlation and key length")
    t.add_argument("--method", choices=["1", "2"], default=None, help="reliability selection method")
    t.add_argument("--synthetic-rho", type=float, default=None, metavar="X",
                   help="single synthetic-source row set at correlation X")
    sub.add_parser("distributions", parents=[common], help="functional histograms and fit statistics")
    sub.add_parser("protocol-demo", parents=[common], help="end-to-end key agreement with method 1")
    return parser


def _scenario(args) -> Scenario:
    # --method exists only on ``table``; elsewhere the attribute is absent
    overrides = {f.name: getattr(args, f.name, None) for f in fields(Scenario)}
    return load_scenario(args.config, overrides)


def _target(args, name: str):
    if args.out == "-":
        return None
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_ENV, ".")) / name


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _bits(b) -> str:
    return "".join(str(int(x)) for x in b)


def _demo(s: Scenario) -> int:
    source = s.physical_source()
    try:
        plan = plan_protocol(source, s.ell, reports.demo_rng(s, 0), parse_grid(s.alpha_grid), s.trials,
                             s.leakage_target, s.ped_target, n_cap=s.n_cap)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    b = plan.budget
    print(f"alpha={plan.alpha:g} n0={b.n0} r={b.check_bits} ell={b.ell} p1={plan.legal_error:.5f} "
          f"p_e={plan.eavesdropper_error:.5f} P_er={plan.erasure_rate:.5f} "
          f"leakage_bound={b.leakage_bound:.4g} decoding_bound={b.decoding_bound:.4g}")
    status = EXIT_OK
    for i in range(s.runs):
        out = run_protocol(source, plan, reports.demo_rng(s, 1, i))
        print(f"run {i}: intervals={out.n_intervals} raw_disagreements={out.legal_disagreements} "
              f"reconciled={out.reconciled} randomness={'pass' if out.randomness.passed else 'fail'}")
        print(f"key_A {_bits(out.key_A)}")
        print(f"key_B {_bits(out.key_B)}")
        if out.keys_match:
            print("keys match")
        else:
            print("KEYS DIFFER")
            status = EXIT_MISMATCH
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = _scenario(args)
        if args.command == "sweep-correlation":
            _emit(reports.run_correlation_sweep(s).to_csv(), _target(args, DEFAULT_NAMES[args.command]))
        elif args.command == "pe-curve":
            _emit(reports.run_pe_curve(s).to_csv(), _target(args, DEFAULT_NAMES[args.command]))
        elif args.command == "table":
            report = reports.run_table(s, args.synthetic_rho)
            _emit(report.to_csv(), _target(args, DEFAULT_NAMES["table"].format(method=s.method)))
        elif args.command == "distributions":
            hist, fits = reports.run_distribution_report(s)
            path = _target(args, DEFAULT_NAMES["distributions"])
            if path is None:
                _emit(hist.to_csv() + "\n" + fits.to_csv(), None)
            else:
                _emit(hist.to_csv(), path)
                _emit(fits.to_csv(), path.with_name(path.stem + "_fits" + path.suffix))
        else:
            return _demo(s)
    except ContractViolation as exc:
        print(f"vdakey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK
