"""Command-line front end for the simulation harness.

Exit codes: 0 on success, 1 on configuration errors (the diagnostic names
the offending key or path), 2 on numeric degeneracy during evaluation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .exceptions import ConfigError, NumericDegeneracyError
from .harness import (dump_channel_files, rates_to_csv, rates_to_json,
                      run_rate_sweep, run_sinr_cdf, sinr_to_csv, sinr_to_json)

RATES_DEFAULT_SCHEMES = "upper_bound,digital_p1,hybrid,svd_mmse"
COMPARE_DEFAULT_SCHEMES = "hybrid,hybrid_q6,hybrid_q4,omp_split,greedy_split"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default="default",
                        help="config file path, or 'default' for built-ins")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", default=None,
                        help="output file (directory for dump-channels); stdout if omitted")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdbeam",
        description="Full-duplex mmWave beamforming link simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rates = sub.add_parser("rates", help="sum-rate sweep over the SNR axis")
    _add_common(p_rates)
    p_rates.add_argument("--schemes", default=RATES_DEFAULT_SCHEMES,
                         help="comma-separated scheme list")

    p_cmp = sub.add_parser("compare", help="hybrid vs split/quantized schemes")
    _add_common(p_cmp)
    p_cmp.add_argument("--schemes", default=COMPARE_DEFAULT_SCHEMES,
                       help="comma-separated scheme list")

    p_sinr = sub.add_parser("sinr-cdf", help="analog-only SINR CDF samples")
    _add_common(p_sinr)
    p_sinr.add_argument("--antennas", default="16,64",
                        help="comma-separated antenna counts (N_a per side)")
    p_sinr.add_argument("--snrs", default="0,10",
                        help="comma-separated SNR points in dB")

    p_dump = sub.add_parser("dump-channels", help="write channel realizations to files")
    _add_common(p_dump)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed must be non-negative")
        config = config.with_overrides(seed=args.seed)

    if args.command in ("rates", "compare"):
        schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
        if not schemes:
            raise ConfigError("schemes list is empty")
        try:
            results = run_rate_sweep(config, schemes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        text = rates_to_csv(results) if args.format == "csv" else rates_to_json(results)
        _emit(text, args.out)
        return 0

    if args.command == "sinr-cdf":
        try:
            antennas = [int(x) for x in args.antennas.split(",") if x.strip()]
            snrs = [float(x) for x in args.snrs.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --antennas/--snrs value: {exc}") from exc
        if not antennas or not snrs:
            raise ConfigError("--antennas and --snrs must be non-empty")
        results = run_sinr_cdf(config, antennas, snrs)
        text = sinr_to_csv(results) if args.format == "csv" else sinr_to_json(results)
        _emit(text, args.out)
        return 0

    # dump-channels
    out_dir = args.out if args.out is not None else "."
    paths = dump_channel_files(config, out_dir)
    sys.stdout.write("\n".join(paths) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericDegeneracyError as exc:
        print(f"numeric degeneracy: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
