"""Command-line front end: bound reports, sweeps, regime presets and self-checks.

Exit codes: 0 success, 1 invalid input or domain error, 2 a verification
check failed.
"""

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import __version__, bounds, checks, experiments
from .exceptions import ConfigError, DomainError, NotPositiveDefinite
from .spectrum import DEFAULT_B

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for failed checks here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    parser = _Parser(prog="ridgebounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="bound report over the config's lambda grid")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, help="directory for bounds.json / bounds.csv (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    split = p.add_mutually_exclusive_group()
    split.add_argument("--k", type=int, help="fixed split index")
    split.add_argument("--b", type=float, help="threshold for k* selection")

    p = sub.add_parser("simulate", help="Monte Carlo sweep; writes sweep.csv and summary.json")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--seed", type=_u64, help="overrides base_seed from the config")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="what to print on stdout")

    p = sub.add_parser("verify", help="run a self-verification suite")
    p.add_argument("suite", choices=checks.SUITES)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--samples", type=_positive_int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("regimes", help="run a preset sweep and print a verdict")
    p.add_argument("regime", choices=("exp", "spiked", "negative"))
    p.add_argument("--n", type=_positive_int, nargs="+", help="sample sizes (exp accepts several)")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--replicates", type=_positive_int)
    p.add_argument("--snr", type=float, help="signal-to-noise ratio for spiked/negative")
    p.add_argument("--p", type=_positive_int, default=8000, help="dimension for spiked/negative")
    p.add_argument("--k-spikes", type=int, default=4)
    p.add_argument("--ratio", type=float, default=500.0, help="lambda_top / lambda_tail")
    return parser


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    return experiments.ExperimentConfig.from_dict(doc)


def envelope(command, config_echo, results, started, seed):
    return {
        "tool_version": __version__,
        "command": command,
        "config_echo": config_echo,
        "results": results,
        "wall_time_seconds": time.perf_counter() - started,
        "seed": seed,
    }


def _dump_json(obj):
    return json.dumps(experiments.json_ready(obj), indent=2, allow_nan=False) + "\n"


def _emit(text, out_dir, filename):
    if out_dir is None:
        sys.stdout.write(text)
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / filename).write_text(text)


def cmd_bounds(args, started):
    config = load_config(args.config)
    spec = config.build_spectrum()
    sig = config.build_signal(spec)
    c = config.bound_constants
    if args.k is not None:
        split = {"k": args.k}
    elif args.b is not None:
        split = {"b": args.b}
    elif config.k_policy["kind"] == "fixed":
        split = {"k": int(config.k_policy["k"])}
    else:
        split = {"b": float(config.k_policy.get("b", DEFAULT_B))}
    reports = []
    for lam in config.lambda_grid:
        try:
            reports.append(bounds.bound_report(
                spec, sig, config.n, lam, L=c.get("L", 1.0), t=c.get("t", 1.0), sigma_x=c.get("sigma_x", 1.0),
                sigma_eps=config.sigma_eps, calibration_c=c.get("calibration_c", 1.0), **split,
            ))
        except DomainError as err:
            raise DomainError(f"bound_report at lambda={lam!r}: {err}") from None
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(bounds.BoundReport.CSV_COLUMNS)
        for rep in reports:
            row = rep.csv_row()
            writer.writerow([experiments.format_number(row[col]) for col in bounds.BoundReport.CSV_COLUMNS])
        _emit(buf.getvalue(), args.out, "bounds.csv")
    else:
        doc = envelope("bounds", config.to_dict(), [r.to_dict() for r in reports], started, config.base_seed)
        _emit(_dump_json(doc), args.out, "bounds.json")
    return EXIT_OK


def cmd_simulate(args, started):
    config = load_config(args.config)
    if args.seed is not None:
        config.base_seed = args.seed
    sweep = experiments.run_sweep(config, threads=args.threads)
    write_sweep(sweep, args.out, started)
    if args.format == "csv":
        sys.stdout.write(sweep.to_csv())
    else:
        sys.stdout.write(json.dumps({"out": str(args.out), "lambda_opt": sweep.lambda_opt}) + "\n")
    return EXIT_OK


def write_sweep(sweep, out_dir, started, prefix=""):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{prefix}sweep.csv").write_text(sweep.to_csv())
    doc = envelope("simulate", sweep.config.to_dict(), sweep.summary(), started, sweep.config.base_seed)
    (out_dir / f"{prefix}summary.json").write_text(_dump_json(doc))


def cmd_verify(args, started):
    report = checks.run_suite(args.suite, seed=args.seed, samples=args.samples)
    config_echo = {"suite": args.suite, "seed": args.seed, "samples": report.samples}
    doc = envelope("verify", config_echo, report.to_dict(), started, args.seed)
    _emit(_dump_json(doc), args.out, f"verify_{args.suite}.json")
    return EXIT_OK if report.passed else EXIT_VERIFY


def spiked_verdict(sweep):
    """Whether the grid optimum is negative, with its margin over lambda = 0 in combined SEs."""
    opt = sweep.lambda_opt
    verdict = {"lambda_opt": opt, "lambda_opt_negative": opt is not None and opt < 0}
    if opt is not None and opt != 0.0:
        gap = -experiments.mse_gap(sweep, opt, 0.0)
        verdict.update(margin_vs_zero_in_se=gap, confident=bool(gap > 3))
    return verdict


def cmd_regimes(args, started):
    runs, verdict = [], {"regime": args.regime}
    if args.regime == "exp":
        ns = args.n or [250, 500, 1000]
        means = []
        for n in ns:
            config = experiments.preset_exponential_decay(
                n ** (-1 / 3), n, replicates=args.replicates or 20, base_seed=args.seed)
            sweep = experiments.run_sweep(config, threads=args.threads)
            write_sweep(sweep, args.out, started, prefix=f"n{n}_")
            center = config.lambda_grid[len(config.lambda_grid) // 2]
            means.append(sweep.aggregate(center)["mean"])
            runs.append(config.to_dict())
        verdict.update(n=ns, mean_mse_at_center=means,
                       mse_decreasing_in_n=bool(all(b < a for a, b in zip(means, means[1:]))))
    else:
        n = (args.n or [200])[0]
        snr = args.snr if args.snr is not None else (100.0 if args.regime == "negative" else 1.0)
        config = experiments.preset_spiked(
            args.k_spikes, args.p, args.ratio, 1.0, n, snr, replicates=args.replicates or 100, base_seed=args.seed)
        sweep = experiments.run_sweep(config, threads=args.threads)
        write_sweep(sweep, args.out, started)
        runs.append(config.to_dict())
        verdict.update(snr=snr, **spiked_verdict(sweep))
    doc = envelope("regimes", runs, verdict, started, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "verdict.json").write_text(_dump_json(doc))
    sys.stdout.write(_dump_json(verdict))
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "simulate": cmd_simulate, "verify": cmd_verify, "regimes": cmd_regimes}


def main(argv=None):
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, started)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, DomainError, NotPositiveDefinite) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (TypeError, KeyError, ValueError) as err:
        # malformed nested config fields surface here
        print(f"error: invalid input: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
