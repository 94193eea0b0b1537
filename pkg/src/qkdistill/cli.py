"""Command-line frontend: threshold tables, attack evaluation, protocol
simulation, and threshold-curve CSV output.

Conventions: data goes to stdout (or ``--out``), diagnostics to stderr.
CSV uses six-decimal fixed formatting and LF line endings; JSON carries full
double precision.  Exit codes: 0 success, 1 runtime/numeric failure, 2 usage
or guard violation.  Every command is deterministic given its full argument
list (including ``--seed``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .adversary import (
    AttackKind,
    AttackReport,
    DimensionGuardError,
    coherent_attack_error,
    incoherent_attack_error,
)
from .channel import make_params
from .distill import (
    acceptance_probability,
    bob_error_after_ad,
    dump_transcripts,
    run_session,
)
from .thresholds import BracketingError, ThresholdRecord, figure_table

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _record_row(rec: ThresholdRecord, numeric: bool, with_quantum: bool) -> list[str]:
    row = [str(rec.n), _fmt(rec.beta_inc_closed), _fmt(rec.beta_coh_closed)]
    if with_quantum:
        row.append(_fmt(rec.beta_quantum))
    if numeric:
        row += [_fmt(rec.beta_inc_numeric), _fmt(rec.beta_coh_numeric)]
    return row


def _record_dict(rec: ThresholdRecord) -> dict:
    return {
        "n": rec.n,
        "beta_inc": rec.beta_inc_closed,
        "beta_coh": rec.beta_coh_closed,
        "beta_quantum": rec.beta_quantum,
        "beta_inc_numeric": rec.beta_inc_numeric,
        "beta_coh_numeric": rec.beta_coh_numeric,
    }


def _report_dict(rep: AttackReport) -> dict:
    return {
        "kind": rep.kind.value,
        "block_size": rep.block_size,
        "eve_error": rep.eve_error,
        "dims_used": rep.dims_used,
        "notes": rep.notes,
    }


def cmd_thresholds(args: argparse.Namespace) -> int:
    records = figure_table(args.n_min, args.n_max, include_numeric=args.numeric)
    if args.format == "json":
        text = json.dumps([_record_dict(r) for r in records], indent=2) + "\n"
    else:
        header = ["n", "beta_inc", "beta_coh", "beta_quantum"]
        if args.numeric:
            header += ["beta_inc_numeric", "beta_coh_numeric"]
        rows = [_record_row(r, args.numeric, with_quantum=True) for r in records]
        text = _csv_text(header, rows)
    _write_output(text, args.out)
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    params = make_params(args.n, args.beta0)
    if args.kind is not None:
        kind = AttackKind(args.kind)
        if kind is AttackKind.COHERENT:
            reports = [coherent_attack_error(params, args.N)]
        else:
            reports = [incoherent_attack_error(params, args.N)]
        dominance = None
    else:
        inc = incoherent_attack_error(params, args.N)
        coh = coherent_attack_error(params, args.N)
        reports = [inc, coh]
        dominance = coh.eve_error <= inc.eve_error + 1e-9
    if args.format == "json":
        if dominance is None:
            payload: dict | list = _report_dict(reports[0])
        else:
            payload = {
                "incoherent": _report_dict(reports[0]),
                "coherent": _report_dict(reports[1]),
                "coherent_le_incoherent": dominance,
            }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        header = ["kind", "block_size", "eve_error", "dims_used", "notes"]
        if dominance is not None:
            header.append("coherent_le_incoherent")
        rows = []
        for rep in reports:
            row = [
                rep.kind.value,
                str(rep.block_size),
                _fmt(rep.eve_error),
                str(rep.dims_used),
                rep.notes,
            ]
            if dominance is not None:
                row.append(str(dominance).lower())
            rows.append(row)
        text = _csv_text(header, rows)
    _write_output(text, args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    params = make_params(args.n, args.beta0)
    stats = run_session(params, args.N, args.blocks, seed=args.seed)
    if args.dump_transcripts is not None:
        with open(args.dump_transcripts, "w", newline="") as fh:
            dump_transcripts(fh, params, args.N, args.blocks, seed=args.seed)
    payload = {
        "n": params.n,
        "beta0": params.beta0,
        "block_size": args.N,
        "blocks": stats.blocks_run,
        "seed": args.seed,
        "blocks_accepted": stats.blocks_accepted,
        "bob_errors": stats.bob_errors,
        "acceptance_rate": stats.acceptance_rate,
        "bob_error_rate": stats.bob_error_rate,
        "analytic_acceptance": acceptance_probability(params, args.N),
        "analytic_bob_error": bob_error_after_ad(params, args.N),
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        header = list(payload.keys())
        row = []
        for key, value in payload.items():
            if isinstance(value, float):
                row.append(_fmt(value))
            elif value is None:
                row.append("")
            else:
                row.append(str(value))
        text = _csv_text(header, [row])
    _write_output(text, args.out)
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    records = figure_table(2, 25, include_numeric=args.numeric)
    header = ["n", "beta_inc", "beta_coh"]
    if args.numeric:
        header += ["beta_inc_numeric", "beta_coh_numeric"]
    rows = [_record_row(r, args.numeric, with_quantum=False) for r in records]
    _write_output(_csv_text(header, rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdistill",
        description="Advantage-distillation security analysis over noisy qunit channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_thr = sub.add_parser("thresholds", help="closed-form (and optional numeric) threshold table")
    p_thr.add_argument("--n-min", type=int, default=2)
    p_thr.add_argument("--n-max", type=int, default=25)
    p_thr.add_argument("--numeric", action="store_true", help="add numeric recovery columns (n in {2,3})")
    p_thr.add_argument("--format", choices=("csv", "json"), default="csv")
    p_thr.add_argument("--out", default=None, help="output path (default: stdout)")
    p_thr.set_defaults(func=cmd_thresholds)

    p_att = sub.add_parser("attack", help="evaluate Eve's error for one channel and block size")
    p_att.add_argument("--n", type=int, required=True)
    p_att.add_argument("--beta0", type=float, required=True)
    p_att.add_argument("--N", type=int, required=True, help="distillation block size")
    p_att.add_argument("--kind", choices=("incoherent", "coherent"), default=None,
                       help="attack class (default: evaluate both and compare)")
    p_att.add_argument("--format", choices=("csv", "json"), default="csv")
    p_att.add_argument("--out", default=None)
    p_att.set_defaults(func=cmd_attack)

    p_sim = sub.add_parser("simulate", help="Monte Carlo protocol session with analytic reference values")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--beta0", type=float, required=True)
    p_sim.add_argument("--N", type=int, required=True, help="distillation block size")
    p_sim.add_argument("--blocks", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--dump-transcripts", default=None, metavar="PATH",
                       help="also write one transcript line per block to PATH")
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_fig = sub.add_parser("figure", help="threshold-curve CSV for n = 2..25")
    p_fig.add_argument("--out", default="threshold_curves.csv")
    p_fig.add_argument("--numeric", action="store_true",
                       help="add numeric recovery columns (filled for n in {2,3})")
    p_fig.set_defaults(func=cmd_figure)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DimensionGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketingError, AssertionError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
