"""Command-line interface.

Three subcommands wrap the library one-to-one:

* ``simulate CONFIG``  -- run a Monte-Carlo grid, write its CSV.
* ``denoise INPUT -o PREFIX``  -- denoise one matrix file.
* ``theory --what ... --sigma ...``  -- tabulate closed-form curves.

Exit codes: 0 success, 1 runtime failure, 2 usage or parse failure.
Standard output carries data (theory) or the run summary (simulate);
diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .estimator import (DenoiserParams, baseline_estimate, default_params,
                        denoise, denoise_entrywise)
from .kde import KdeSettings
from .linalg import read_matrix_csv, write_matrix_csv
from .shrinkage import debiased_sv, inflated_sv
from .sim import ConfigError, load_config, parse_grid, run_grid
from .theory import error_limit, overlap_limit

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _err(msg: str) -> None:
    print(f"adadenoise: {msg}", file=sys.stderr)


def cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError:
        _err(f"config file not found: {args.config}")
        return USAGE_ERROR
    except ConfigError as exc:
        _err(str(exc))
        return USAGE_ERROR

    def progress(done: int, total: int) -> None:
        print(f"\rtrial {done}/{total}", end="", file=sys.stderr, flush=True)

    t0 = time.perf_counter()
    try:
        records = run_grid(config, progress=progress)
    except OSError as exc:
        print(file=sys.stderr)
        _err(f"cannot write results: {exc}")
        return RUNTIME_ERROR
    except Exception as exc:  # pipeline failure
        print(file=sys.stderr)
        _err(f"simulation failed: {exc}")
        return RUNTIME_ERROR
    print(file=sys.stderr)
    elapsed = time.perf_counter() - t0
    cells = len(records) // config.trials
    print(f"cells={cells} trials={len(records)} wall={elapsed:.2f}s "
          f"output={config.output}")
    return 0


def _write_meta(path, fields) -> None:
    with open(path, "w") as fh:
        for key, value in fields:
            if isinstance(value, (list, tuple, np.ndarray)):
                text = ",".join(f"{v:.10g}" for v in value)
            elif isinstance(value, float):
                text = f"{value:.10g}"
            else:
                text = str(value)
            fh.write(f"{key} = {text}\n")


def cmd_denoise(args) -> int:
    try:
        y = read_matrix_csv(args.input)
    except FileNotFoundError:
        _err(f"input file not found: {args.input}")
        return USAGE_ERROR
    except ValueError as exc:
        _err(f"malformed input: {exc}")
        return USAGE_ERROR

    m, n = y.shape
    if args.mode == "baseline" and args.noise_sd is None:
        _err("--noise-sd is required with --mode baseline")
        return USAGE_ERROR

    kde = KdeSettings(h=1.0, mode=args.kde_mode, bins=args.kde_bins)
    base = default_params(m, n, eps=args.eps, delta=args.delta, kde=kde)
    try:
        params = DenoiserParams(
            h=args.h if args.h is not None else base.h,
            h_prime=args.h_prime if args.h_prime is not None else base.h_prime,
            eps=args.eps, delta=args.delta, kde=kde)
        gamma = args.gamma if args.gamma is not None else m / n
        prefix = args.output_prefix
        if args.mode == "adaptive":
            res = denoise(y, params, gamma)
            write_matrix_csv(res.x_hat, f"{prefix}_xhat.csv")
            write_matrix_csv(res.x_star, f"{prefix}_xstar.csv")
            _write_meta(f"{prefix}_meta.txt", [
                ("i_hat", res.i_hat), ("k_hat", res.k_hat),
                ("y_bar", res.y_bar), ("sigma0", res.sigma0),
                ("sigma_shrunk", res.sigma_shrunk)])
        elif args.mode == "star":
            x0, i_hat, y_bar = denoise_entrywise(y, params)
            write_matrix_csv(x0 / i_hat, f"{prefix}_xstar.csv")
            _write_meta(f"{prefix}_meta.txt",
                        [("i_hat", i_hat), ("y_bar", y_bar)])
        else:  # baseline
            res = baseline_estimate(y, noise_sd=args.noise_sd,
                                    delta=args.delta, gamma=gamma)
            write_matrix_csv(res.x_hat, f"{prefix}_xhat.csv")
            _write_meta(f"{prefix}_meta.txt", [
                ("noise_sd", args.noise_sd), ("k_hat", res.k_hat),
                ("sigma0", res.sigma0), ("sigma_shrunk", res.sigma_shrunk)])
    except ValueError as exc:
        _err(f"denoising failed: {exc}")
        return RUNTIME_ERROR
    except np.linalg.LinAlgError as exc:
        _err(f"SVD failed: {exc}")
        return RUNTIME_ERROR
    return 0


def cmd_theory(args) -> int:
    try:
        sigmas = parse_grid(args.sigma)
    except ConfigError as exc:
        _err(str(exc))
        return USAGE_ERROR
    if args.what in ("overlap", "error") and args.t is None:
        _err(f"--t is required with --what {args.what}")
        return USAGE_ERROR

    rows = []
    try:
        for sigma in sigmas:
            if args.what == "overlap":
                value = overlap_limit(sigma, args.t, args.gamma)
            elif args.what == "error":
                value = error_limit(sigma, args.t)
            elif args.what == "H":
                value = inflated_sv(sigma, args.gamma)
            else:  # Hinv
                value = debiased_sv(sigma, args.gamma)
            rows.append((sigma, value))
    except ValueError as exc:
        _err(str(exc))
        return USAGE_ERROR

    print(f"sigma,{args.what}")
    for sigma, value in rows:
        print(f"{sigma:.10g},{value:.10g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adadenoise",
        description="Noise-adaptive matrix denoising toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a Monte-Carlo grid from a config file")
    p_sim.add_argument("config", help="path to a key = value config file")
    p_sim.set_defaults(func=cmd_simulate)

    p_den = sub.add_parser("denoise", help="denoise a CSV matrix")
    p_den.add_argument("input", help="input matrix (headerless CSV)")
    p_den.add_argument("-o", "--output-prefix", required=True,
                       help="prefix for _xhat.csv/_xstar.csv/_meta.txt outputs")
    p_den.add_argument("--mode", choices=["adaptive", "baseline", "star"],
                       default="adaptive")
    p_den.add_argument("--eps", type=float, default=1e-3)
    p_den.add_argument("--delta", type=float, default=0.01)
    p_den.add_argument("--h", type=float, default=None,
                       help="density bandwidth (default 1.2 (mn)^-1/5)")
    p_den.add_argument("--h-prime", type=float, default=None,
                       help="derivative bandwidth (default (mn)^-1/7)")
    p_den.add_argument("--gamma", type=float, default=None,
                       help="aspect ratio (default m/n of the input)")
    p_den.add_argument("--noise-sd", type=float, default=None,
                       help="noise standard deviation (baseline mode)")
    p_den.add_argument("--kde-mode", choices=["binned", "exact"], default="binned")
    p_den.add_argument("--kde-bins", type=int, default=4096)
    p_den.set_defaults(func=cmd_denoise)

    p_th = sub.add_parser("theory", help="tabulate closed-form limit curves as CSV")
    p_th.add_argument("--what", choices=["overlap", "error", "H", "Hinv"],
                      required=True)
    p_th.add_argument("--gamma", type=float, default=1.0)
    p_th.add_argument("--t", type=float, default=None,
                      help="noise precision (overlap/error curves)")
    p_th.add_argument("--sigma", required=True,
                      help="grid: '2', '1,2,3' or 'start:stop:step'")
    p_th.set_defaults(func=cmd_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
