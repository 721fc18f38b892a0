"""Command line entry point: ``zalms run | predict | sweep | config | presets``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .errors import ConfigError, TheoryOutOfRangeError
from .filters import DwzaLms
from .harness import (PRESETS, compare_theory, config_to_text, load_config, preset,
                      run_experiment, write_comparison)
from .harness.config import ExperimentConfig
from .signals import InputKind, InputSpec, NoiseSpec
from .systems import Family, GgdParams, SystemSpec
from .theory import TheoryInputs, steady_state_mse

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zalms", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a preset or a config file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--config", help="flat key = value experiment file")
    p.add_argument("--trials", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("predict", help="closed-form steady-state prediction")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=float("inf"))
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--sigma-g", type=float, default=1.0)
    p.add_argument("--L", type=int, default=100)
    p.add_argument("--sigma-x2", type=float, default=1.0)
    p.add_argument("--sigma-v2", type=float, default=1e-4)

    p = sub.add_parser("sweep", help="DWZA-LMS parameter sweep against the closed form")
    p.add_argument("--param", choices=("mu", "rho", "a", "b"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--mu", type=float, default=1e-2)
    p.add_argument("--rho", type=float, default=2e-4)
    p.add_argument("--a", type=float, default=1e-2)
    p.add_argument("--b", type=float, default=0.8)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--iterations", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=20130201)
    p.add_argument("--out", default="results/sweep")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("config", help="print a preset in config-file form")
    p.add_argument("preset", choices=sorted(PRESETS))

    sub.add_parser("presets", help="list preset names")
    return parser


def _print_report(report) -> None:
    cfg = report.config
    print(f"experiment={cfg.name} config-hash={report.config_hash} trials={cfg.trials}")
    for key, curve in report.curves.items():
        msd, _ = report.steady[key]["msd"]
        conv = report.convergence_iters[key]
        db = 10 * np.log10(msd) if msd > 0 else float("nan")
        print(f"  {key}: steady_msd_db={db:.2f} first_crossing({cfg.target_db:g}dB)="
              f"{conv if conv is not None else 'never'} diverged={report.diverged[key]}")
    for path in report.files:
        print(f"  wrote {path}")


def _cmd_run(args) -> int:
    cfg = preset(args.preset) if args.preset else load_config(args.config)
    cfg = cfg.with_overrides(trials=args.trials, iterations=args.iterations,
                             base_seed=args.seed, output_dir=args.out)
    if args.preset and args.out is None:
        cfg = cfg.with_overrides(output_dir=f"results/{cfg.name}")
    report = run_experiment(cfg, workers=args.workers)
    _print_report(report)
    if not report.ok:
        print("error: more than 10% of trials diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_predict(args) -> int:
    inputs = TheoryInputs(mu=args.mu, rho=args.rho, a=args.a, b=args.b, L=args.L,
                          sigma_x2=args.sigma_x2, sigma_v2=args.sigma_v2,
                          ggd=GgdParams(0.0, args.sigma_g, args.beta))
    try:
        pred = steady_state_mse(inputs)
    except TheoryOutOfRangeError as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_DIVERGED
    fields = pred.as_dict()
    for k, v in fields.items():
        print(f"{k}={v}")
    print(",".join(fields))
    print(",".join(str(v) for v in fields.values()))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.points < 1:
        raise ConfigError("--points must be >= 1")
    base = {"mu": args.mu, "rho": args.rho, "a": args.a, "b": args.b}
    algorithms = []
    for value in np.linspace(args.start, args.stop, args.points):
        point = dict(base, **{args.param: float(value)})
        try:
            params = DwzaLms(**point)
        except ValueError as exc:
            raise ConfigError(f"sweep point {args.param}={value:g}: {exc}") from None
        algorithms.append((f"DWZA-LMS[{args.param}={value:g}]", params))
    cfg = ExperimentConfig(
        name=f"sweep_{args.param}",
        systems=(SystemSpec(Family.GGD, L=100, beta=args.beta),),
        input=InputSpec(InputKind.WHITE, 1.0),
        noise=NoiseSpec(1e-4),
        algorithms=tuple(algorithms),
        iterations=args.iterations,
        trials=args.trials,
        base_seed=args.seed,
        output_dir=args.out,
    )
    report = run_experiment(cfg, workers=args.workers)
    rows = compare_theory(cfg, report)
    print("curve,simulated_mse,predicted_mse,ratio,flag")
    for r in rows:
        pred = "out-of-range" if r.out_of_range else f"{r.predicted_mse:.4e}"
        ratio = "" if r.ratio is None else f"{r.ratio:.3f}"
        print(f"{r.curve},{r.simulated_mse:.4e},{pred},{ratio},{'FLAG' if r.flagged else 'ok'}")
    write_comparison(rows, f"{args.out}/theory.csv")
    return EXIT_OK if report.ok else EXIT_DIVERGED


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "predict":
            return _cmd_predict(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "config":
            sys.stdout.write(config_to_text(preset(args.preset)))
            return EXIT_OK
        print("\n".join(PRESETS))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
