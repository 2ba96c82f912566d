"""Command line entry point: ``run``, ``eval`` and ``pso-bench``."""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import AnswerForgeError, ValidationError
from .pso import SwarmConfig, optimize_weights
from .reports import read_ranks, write_reports

logger = logging.getLogger("answer_forge")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2

BENCHMARKS = {
    # name -> (fitness, optimum, check)
    "sphere": (
        lambda w: -float(np.sum(w.as_array() ** 2)),
        np.full(5, 0.2),
        lambda best, fit: bool(np.all(np.abs(best - 0.2) <= 1e-2) and abs(fit + 0.2) <= 1e-3),
    ),
    "linear": (
        lambda w: w.lambda3,
        np.array([0.0, 0.0, 1.0, 0.0, 0.0]),
        lambda best, fit: bool(best[2] >= 0.98),
    ),
}


def _setup_logging():
    level = os.environ.get("ANSWER_FORGE_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def cmd_run(args):
    from .pipeline import run_pipeline

    cfg = load_config(args.config)
    overrides = {}
    if args.mode:
        overrides["eval.mode"] = args.mode
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    report = run_pipeline(cfg)
    out = Path(args.out)
    paths = write_reports(report, out)
    if cfg["figures"] and not args.no_figures:
        from .plotting import render_all

        render_all(report, out / "figures")
    for sp in report["splits"]:
        m = sp["metrics"]
        print(
            f"split {sp['split_id']} ({sp['mode']}): hit1={m['hit1']:.2f} hit3={m['hit3']:.2f} "
            f"hit10={m['hit10']:.2f} mrr={m['mrr']:.4f} mr={m['mr']:.2f} n={m['n_samples']} "
            f"pso_triggers={[t['epoch'] for t in sp['pso_triggers']]}"
        )
    print(f"report: {paths['report']}")
    return EXIT_OK


def cmd_eval(args):
    reports = read_ranks(args.ranks)
    out = {k: r.metrics() for k, r in reports.items()}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_pso_bench(args):
    fitness, optimum, check = BENCHMARKS[args.function]
    cfg = SwarmConfig(seed=args.seed)
    t0 = time.perf_counter()
    result = optimize_weights(fitness, cfg)
    elapsed = time.perf_counter() - t0
    best = result.best.as_array()
    ok = check(best, result.best_fitness) and elapsed < 1.0
    print(f"function={args.function} best={np.round(best, 4).tolist()} fitness={result.best_fitness:.6f}")
    print(f"optimum={optimum.tolist()} max_abs_err={float(np.max(np.abs(best - optimum))):.2e} elapsed={elapsed:.3f}s")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_RUNTIME


def build_parser():
    parser = argparse.ArgumentParser(prog="answer-forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train, search weights and evaluate")
    run.add_argument("--config", required=True, help="flat key = value config file")
    run.add_argument("--mode", choices=("zsl", "gzsl"), help="override eval.mode")
    run.add_argument("--seed", type=int, help="override seed")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser("eval", help="recompute metrics from a ranks CSV")
    ev.add_argument("--ranks", required=True)
    ev.set_defaults(func=cmd_eval)

    bench = sub.add_parser("pso-bench", help="run the optimizer on a known objective")
    bench.add_argument("--function", choices=sorted(BENCHMARKS), required=True)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_pso_bench)
    return parser


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AnswerForgeError, OSError) as exc:
        logger.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
