"""Command-line front end.

Subcommands: ``scan``, ``compare``, ``fluct``, ``point`` and ``validate``.
Exit codes: 0 success, 1 validation failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from .concentration import BoundModel
from .config import ConfigError, load_config
from .fluctuation import worst_case_rate
from .keyrate import evaluate_point, loss_to_eta, optimize_point, plob_bound
from .mc_validator import MIN_TRIALS, bernoulli_coverage

SCAN_COLUMNS = ("loss_db", "eta", "key_rate", "key_length", "plob_bound",
                "E_mu_X_up", "E_ph_Z_up", "s_Z", "s_X_total", "status")
FLUCT_COLUMNS = SCAN_COLUMNS + ("mu_Z_c", "mu_0_c", "mu_1_c")
COMPARE_MODELS = (BoundModel.HOEFFDING, BoundModel.MULT_CHERNOFF, BoundModel.IMPROVED_CHERNOFF)
COMPARE_COLUMNS = ("loss_db", "eta", "plob_bound") + tuple(f"rate_{m.value}" for m in COMPARE_MODELS)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ScanSpec:
    loss_start_db: float = 0.0
    loss_end_db: float = 80.0
    loss_step_db: float = 1.0
    model: BoundModel = BoundModel.IMPROVED_CHERNOFF
    fluctuation: float | None = None
    optimizer: bool = False

    def __post_init__(self):
        if self.loss_start_db < 0:
            raise UsageError("loss start must be >= 0 dB")
        if self.loss_start_db > self.loss_end_db:
            raise UsageError("loss start must not exceed loss end")
        if not self.loss_step_db > 0:
            raise UsageError("loss step must be positive")

    def losses(self):
        count = int(math.floor((self.loss_end_db - self.loss_start_db) / self.loss_step_db + 1e-9))
        return [self.loss_start_db + i * self.loss_step_db for i in range(count + 1)]


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(value, ".16e")


def _plob(loss_db):
    eta = loss_to_eta(loss_db)
    return plob_bound(eta) if eta < 1 else math.inf


def _scan_row(config, spec, loss_db, resolution=3, trials="detections"):
    try:
        cand = None
        if spec.fluctuation is not None:
            result, cand = worst_case_rate(config.replace(delta_mu=spec.fluctuation),
                                           loss_db, resolution=resolution, trials=trials)
        elif spec.optimizer:
            result = optimize_point(config, loss_db, spec.model, trials=trials)
        else:
            result = evaluate_point(config, loss_db, spec.model, trials=trials)
    except (ValueError, ArithmeticError) as exc:
        eta = loss_to_eta(loss_db)
        row = [loss_db, eta, 0.0, 0, _plob(loss_db), math.nan, math.nan, 0.0, 0.0,
               f"error: {exc}".replace(",", ";")]
        return row + ([math.nan] * 3 if spec.fluctuation is not None else [])
    row = [loss_db, result.eta, result.R, result.l, _plob(loss_db), result.E_mu_X_up,
           result.E_ph_Z_up, result.s_Z, result.s_X, result.status.replace(",", ";")]
    if spec.fluctuation is not None:
        row += list(cand.as_tuple()) if cand else [math.nan] * 3
    return row


def _compare_row(config, loss_db, trials="detections"):
    row = [loss_db, loss_to_eta(loss_db), _plob(loss_db)]
    for model in COMPARE_MODELS:
        row.append(evaluate_point(config, loss_db, model, trials=trials).R)
    return row


def _map(func, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def write_csv(header, rows, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def run_scan(config, spec, jobs=1, resolution=3, trials="detections"):
    func = partial(_scan_row, config, spec, resolution=resolution, trials=trials)
    header = FLUCT_COLUMNS if spec.fluctuation is not None else SCAN_COLUMNS
    return header, _map(func, spec.losses(), jobs)


def run_compare(config, spec, jobs=1, trials="detections"):
    return COMPARE_COLUMNS, _map(partial(_compare_row, config, trials=trials), spec.losses(), jobs)


def _emit(header, rows, output):
    if output in (None, "-"):
        write_csv(header, rows, sys.stdout)
        return
    buf = io.StringIO()
    write_csv(header, rows, buf)
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _spec_from_args(args, **extra):
    return ScanSpec(args.start, args.end, args.step, BoundModel.parse(args.model),
                    optimizer=getattr(args, "optimize", False), **extra)


def cmd_scan(args):
    config = load_config(args.config, args.set)
    spec = _spec_from_args(args, fluctuation=args.delta_mu)
    _emit(*run_scan(config, spec, args.jobs, args.resolution, args.trials), args.output)
    return 0


def cmd_fluct(args):
    config = load_config(args.config, args.set)
    delta = config.delta_mu if args.delta_mu is None else args.delta_mu
    spec = ScanSpec(args.start, args.end, args.step, BoundModel.AZUMA, fluctuation=delta)
    _emit(*run_scan(config, spec, args.jobs, args.resolution, args.trials), args.output)
    return 0


def cmd_compare(args):
    config = load_config(args.config, args.set)
    spec = ScanSpec(args.start, args.end, args.step)
    _emit(*run_compare(config, spec, args.jobs, args.trials), args.output)
    return 0


def cmd_point(args):
    config = load_config(args.config, args.set)
    model = BoundModel.parse(args.model)
    if args.optimize:
        result = optimize_point(config, args.loss, model, trials=args.trials)
    else:
        result = evaluate_point(config, args.loss, model, trials=args.trials)
    lines = [f"{key} = {value if isinstance(value, str) else fmt(value)}"
             for key, value in result.summary().items()]
    lines.append(f"plob_bound = {fmt(_plob(args.loss))}")
    text = "\n".join(lines) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def cmd_validate(args):
    if args.trials < MIN_TRIALS:
        raise UsageError(f"--trials must be at least {MIN_TRIALS}")
    if not (args.n >= 1 and 0 <= args.p <= 1 and 0 < args.eps < 1):
        raise UsageError("need n >= 1, p in [0, 1], eps in (0, 1)")
    report = bernoulli_coverage(args.model, args.n, args.p, args.eps, args.trials,
                                args.seed, workers=args.jobs)
    text = report.to_text()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        row = report.as_row()
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(list(row), [[v if not isinstance(v, bool) else str(v).lower()
                                   for v in row.values()]], fh)
    return 0 if report.passed else 1


def _add_common(p, model=True):
    p.add_argument("--config", help="key = value config file (defaults if omitted)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key; repeatable")
    p.add_argument("--start", type=float, default=0.0, help="first loss in dB")
    p.add_argument("--end", type=float, default=80.0, help="last loss in dB")
    p.add_argument("--step", type=float, default=1.0, help="loss step in dB")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--trials", choices=("detections", "per_setting", "total"),
                   default="detections", help="trial count behind each decoy count")
    p.add_argument("-o", "--output", help="output file (stdout if omitted)")
    if model:
        p.add_argument("--model", default="improved_chernoff",
                       choices=[m.value for m in BoundModel])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tfqkd", description="Finite-key rates for two-decoy twin-field QKD.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="key rate versus loss")
    _add_common(p)
    p.add_argument("--delta-mu", type=float, default=None,
                   help="worst case over intensity fluctuations of this size")
    p.add_argument("--resolution", type=int, default=3)
    p.add_argument("--optimize", action="store_true", help="grid-optimise mu_Z and P_Z per point")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("compare", help="rates of the three independent-sample models")
    _add_common(p, model=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fluct", help="worst-case rate under intensity fluctuations")
    _add_common(p, model=False)
    p.add_argument("--delta-mu", type=float, default=None, help="defaults to the config value")
    p.add_argument("--resolution", type=int, default=3)
    p.set_defaults(func=cmd_fluct)

    p = sub.add_parser("point", help="full diagnostics at one loss")
    p.add_argument("--config")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--loss", type=float, required=True, help="loss in dB")
    p.add_argument("--model", default="improved_chernoff", choices=[m.value for m in BoundModel])
    p.add_argument("--trials", choices=("detections", "per_setting", "total"), default="detections")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("validate", help="Monte Carlo coverage check of a bound")
    p.add_argument("--model", default="improved_chernoff", choices=[m.value for m in BoundModel])
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report", help="plain-text report file (stdout if omitted)")
    p.add_argument("--csv", help="one-row CSV report file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"tfqkd {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tfqkd {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
