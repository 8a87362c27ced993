"""Command-line front end.

Exit status is 0 on success, 1 for validation errors and 2 for I/O errors.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import contextmanager

from . import montecarlo
from .lagscan import LagScanConfig, distance_curve_csv, estimate_lag, parse_lags, window_sweep
from .timeseries import (
    Carrier,
    ImputationMethod,
    MissingTarget,
    SimulationConfig,
    TimeSeries,
    format_value,
    from_csv,
    impute,
    impute_csv,
    simulate_pair,
)

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _column(text: str) -> str | int:
    return int(text) if text.lstrip("-").isdigit() else text


def _lags(text: str) -> tuple[int, ...]:
    try:
        return parse_lags(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_scan_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ref", required=True, help="reference series CSV")
    p.add_argument("--moving", required=True, help="moving series CSV")
    p.add_argument("--column", type=_column, default=0, help="value column name or index")
    p.add_argument("--ref-column", type=_column, help="override --column for --ref")
    p.add_argument("--moving-column", type=_column, help="override --column for --moving")
    p.add_argument("--lags", type=_lags, default=tuple(range(21)), help='e.g. "0..20" or "0,2,4"')
    p.add_argument("--mode", choices=["circular", "truncate"], default="circular")
    p.add_argument("--impute", choices=["locf", "mean"], help="fill missing values first")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write the result table here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vglag", description="Visibility-graph lag estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="estimate the lag between two series")
    _add_scan_options(p)

    p = sub.add_parser("sweep", help="sliding-window lag histogram")
    _add_scan_options(p)
    p.add_argument("--window", type=int, required=True)
    p.add_argument(
        "--include-last", action="store_true", help="also use the window ending on the final sample"
    )
    p.add_argument("--trace", help="write per-window lags (window_start,best_lag) here")

    p = sub.add_parser("simulate", help="Monte Carlo percent-correct experiments")
    p.add_argument("--table", help=f"one of {', '.join(montecarlo.TABLE_IDS)}")
    p.add_argument("--replicates", type=int, default=montecarlo.DEFAULT_REPLICATES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--carrier", choices=[c.value for c in Carrier])
    p.add_argument("--lags", type=_lags, default=tuple(range(21)))
    p.add_argument("--mode", choices=["circular", "truncate"], default="circular")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    custom = p.add_argument_group("custom experiment (when --table is omitted)")
    custom.add_argument("--n", type=int, default=50)
    custom.add_argument("--amplitude", type=float, default=100.0)
    custom.add_argument("--frequency", type=float, default=0.08)
    custom.add_argument("--noise-a", type=float, default=25.0)
    custom.add_argument("--noise-b", type=float, default=5.0)
    custom.add_argument("--ratio", type=float, default=1 / 3)
    custom.add_argument("--seasonal-mid", type=float)
    custom.add_argument("--true-lags", type=_lags, default=montecarlo.DEFAULT_TRUE_LAGS)
    custom.add_argument("--missing", type=int, default=0)
    custom.add_argument(
        "--missing-target", choices=[t.value for t in MissingTarget], default="both"
    )
    custom.add_argument("--impute", choices=["locf", "mean"], default="locf")

    p = sub.add_parser("impute", help="gap-fill one column of a CSV")
    p.add_argument("input")
    p.add_argument("--column", type=_column, default=0)
    p.add_argument("--impute", choices=["locf", "mean"], default="locf", dest="method")
    p.add_argument("--out")

    p = sub.add_parser("generate", help="write a simulated (ts_a, ts_b) pair as CSV")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--amplitude", type=float, default=100.0)
    p.add_argument("--frequency", type=float, default=0.08)
    p.add_argument("--noise-a", type=float, default=25.0)
    p.add_argument("--noise-b", type=float, default=5.0)
    p.add_argument("--ratio", type=float, default=1 / 3)
    p.add_argument("--seasonal-mid", type=float)
    p.add_argument("--true-lag", type=int, default=2)
    p.add_argument("--carrier", choices=[c.value for c in Carrier], default="sine")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


@contextmanager
def _output(path: str | None, stdout):
    if path is None:
        yield stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _load_pair(args) -> tuple[TimeSeries, TimeSeries]:
    ref_col = args.ref_column if args.ref_column is not None else args.column
    mov_col = args.moving_column if args.moving_column is not None else args.column
    ref = from_csv(args.ref, ref_col)
    mov = from_csv(args.moving, mov_col)
    for ts, label in ((ref, "--ref"), (mov, "--moving")):
        if ts.has_missing and args.impute is None:
            raise ValueError(
                f"{label} {ts.name} contains {ts.missing_count} missing values; "
                "rerun with --impute locf or --impute mean"
            )
    if args.impute is not None:
        ref, mov = impute(ref, args.impute), impute(mov, args.impute)
    return ref, mov


def cmd_estimate(args, stdout) -> int:
    ref, mov = _load_pair(args)
    result = estimate_lag(ref, mov, LagScanConfig(args.lags, args.mode))
    if args.format == "json":
        payload = {
            "best_lag": result.best_lag,
            "best_distance": result.best_distance,
            "matrix_size": result.matrix_size,
            "curve": [{"lag": k, "distance": d} for k, d in zip(result.lags, result.distances)],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = distance_curve_csv(result)
    print(f"best_lag={result.best_lag} distance={format_value(result.best_distance)}", file=stdout)
    if args.out:
        with _output(args.out, stdout) as fh:
            fh.write(text)
    elif args.format == "json":
        stdout.write(text)
    return EXIT_OK


def cmd_sweep(args, stdout) -> int:
    ref, mov = _load_pair(args)
    res = window_sweep(
        ref, mov, args.window, LagScanConfig(args.lags, args.mode), include_last=args.include_last
    )
    if args.format == "json":
        text = (
            json.dumps(
                {
                    "window_size": res.window_size,
                    "n_windows": res.n_windows,
                    "modal_lag": res.modal_lag,
                    "histogram": [{"lag": k, "count": c} for k, c in res.histogram.items()],
                    "lags": list(res.lags),
                },
                indent=2,
            )
            + "\n"
        )
    else:
        text = res.histogram_csv()
    print(f"windows={res.n_windows} modal_lag={res.modal_lag}", file=stdout)
    with _output(args.out, stdout) as fh:
        fh.write(text)
    if args.trace:
        with _output(args.trace, stdout) as fh:
            fh.write(res.trace_csv())
    return EXIT_OK


def _custom_spec(args, carrier: Carrier) -> montecarlo.ExperimentSpec:
    sim = SimulationConfig(
        n=args.n,
        amplitude=args.amplitude,
        frequency=args.frequency,
        noise_a_sd=args.noise_a,
        amplitude_ratio=args.ratio,
        noise_b_sd=args.noise_b,
        seasonal_mid_amplitude=args.seasonal_mid,
        true_lag=0,
        carrier=carrier,
    )
    missing = None
    if args.missing:
        missing = montecarlo.MissingSpec(args.missing, args.missing_target, args.impute)
    return montecarlo.ExperimentSpec(
        sim=sim,
        true_lags=args.true_lags,
        replicates=args.replicates,
        lag_cfg=LagScanConfig(args.lags, args.mode),
        missing=missing,
        seed=args.seed,
        row=f"n={args.n}",
    )


def cmd_simulate(args, stdout) -> int:
    lag_cfg = LagScanConfig(args.lags, args.mode)
    if args.table is not None:
        carrier = Carrier(args.carrier or Carrier.SCALAR_N)
        try:
            specs = montecarlo.table_specs(args.table, args.replicates, args.seed, carrier, lag_cfg)
        except KeyError as exc:
            raise ValueError(exc.args[0]) from None
    else:
        specs = [_custom_spec(args, Carrier(args.carrier or Carrier.SINE))]
    reports = [montecarlo.run_experiment(s, workers=args.workers) for s in specs]
    if args.format == "json":
        text = montecarlo.reports_to_json(reports)
    else:
        text = montecarlo.reports_to_csv(reports)
    if args.out:
        with _output(args.out, stdout) as fh:
            fh.write(text)
        stdout.write(montecarlo.format_reports(reports))
        print(f"seed={args.seed} replicates={args.replicates}", file=stdout)
    else:
        stdout.write(text)
    return EXIT_OK


def cmd_impute(args, stdout) -> int:
    with open(args.input, newline="", encoding="utf-8") as src:
        text = src.read()
    buf = io.StringIO()
    impute_csv(io.StringIO(text), buf, args.column, ImputationMethod(args.method))
    with _output(args.out, stdout) as fh:
        fh.write(buf.getvalue())
    return EXIT_OK


def cmd_generate(args, stdout) -> int:
    cfg = SimulationConfig(
        n=args.n,
        amplitude=args.amplitude,
        frequency=args.frequency,
        noise_a_sd=args.noise_a,
        amplitude_ratio=args.ratio,
        noise_b_sd=args.noise_b,
        true_lag=args.true_lag,
        seasonal_mid_amplitude=args.seasonal_mid,
        seed=args.seed,
        carrier=args.carrier,
    )
    a, b = simulate_pair(cfg)
    with _output(args.out, stdout) as fh:
        fh.write("ts_a,ts_b\n")
        for x, y in zip(a.values, b.values):
            fh.write(f"{format_value(x)},{format_value(y)}\n")
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "impute": cmd_impute,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(f"vglag: error: {exc}", file=stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"vglag: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"vglag: error: {exc}", file=stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
