"""
Command-line interface

    python main.py train --config configs/dormancy_shift.toml [--seed N] [--variant NAME]
    python main.py diagnose --checkpoint net.hrck --features obs.csv [--out neurons.csv]
    python main.py simulate-saturation --p-grid 0.05:0.95:0.05 --trials 1000000
    python main.py score --table scores.csv --method success --aggregate iqm
    python main.py serve --port 8000

Exit codes: 0 success, 1 a run or command failed, 2 bad configuration.
"""

import argparse
import json
import logging
import os
from pathlib import Path
from typing import List, Optional

from src.errors import ConfigError, HrLabError
from src.logging_setup import configure_logging
from src.models.config import DiagnosticsConfig
from src.parsers.checkpoint import atomic_write_text, load_checkpoint
from src.parsers.tables import read_features, read_score_table
from src.services.diagnose_service import diagnose_network, dump_neuron_csv
from src.services.saturation_service import dump_sweep_csv, parse_p_grid, run_saturation_sweep
from src.services.scoring_service import score_table
from src.services.suite_service import OUT_ENV_VAR, run_experiment_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _cmd_train(args) -> int:
    manifest = run_experiment_suite(args.config, out_dir=args.out, variant=args.variant, seed=args.seed)
    for status in manifest.failed:
        logger.error("Run %s failed: %s", status.run_id, status.error)
    return EXIT_FAILED if manifest.failed else EXIT_OK


def _cmd_diagnose(args) -> int:
    net = load_checkpoint(args.checkpoint)
    observations = read_features(args.features)
    settings = DiagnosticsConfig(threshold=args.threshold, jitter_variance=args.jitter_variance)
    report = diagnose_network(net, observations, settings, seed=args.seed)
    neurons = report.pop("neurons")
    if args.out:
        atomic_write_text(args.out, dump_neuron_csv(neurons))
        logger.info("Per-neuron report written to %s", args.out)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _cmd_simulate_saturation(args) -> int:
    rows = run_saturation_sweep(parse_p_grid(args.p_grid), args.trials, args.seed, args.workers)
    out = Path(args.out) if args.out else Path(os.getenv(OUT_ENV_VAR) or "out") / "saturation.csv"
    atomic_write_text(out, dump_sweep_csv(rows))
    for row in rows:
        print(f"p={row['p']:.3f} {row['activation']:<4} closed={row['closed_form']:.6f} mc={row['monte_carlo']:.6f}")
    logger.info("Saturation table written to %s", out)
    return EXIT_OK


def _cmd_score(args) -> int:
    result = score_table(read_score_table(args.table), args.method, args.aggregate)
    print(json.dumps(result, indent=2))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hr-lab", description="Hadamard representation experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run the experiment suite of a TOML config")
    train.add_argument("--config", required=True)
    train.add_argument("--seed", type=int)
    train.add_argument("--variant", choices=["baseline", "hr", "widen", "hr2"])
    train.add_argument("--out", help=f"output directory (default: ${OUT_ENV_VAR} or [output] dir)")
    train.set_defaults(handler=_cmd_train)

    diagnose = sub.add_parser("diagnose", help="diagnose the final hidden layer of a checkpoint")
    diagnose.add_argument("--checkpoint", required=True)
    diagnose.add_argument("--features", required=True, help="CSV observation batch")
    diagnose.add_argument("--out", help="per-neuron CSV")
    diagnose.add_argument("--threshold", type=float, default=20.0)
    diagnose.add_argument("--jitter-variance", type=float, default=1e-5)
    diagnose.add_argument("--seed", type=int, default=0)
    diagnose.set_defaults(handler=_cmd_diagnose)

    saturation = sub.add_parser("simulate-saturation", help="closed form vs Monte-Carlo collapse probability")
    saturation.add_argument("--p-grid", default="0.05:0.95:0.05")
    saturation.add_argument("--trials", type=int, default=1_000_000)
    saturation.add_argument("--seed", type=int, default=0)
    saturation.add_argument("--workers", type=int, default=1)
    saturation.add_argument("--out", help="CSV path (default: <output dir>/saturation.csv)")
    saturation.set_defaults(handler=_cmd_simulate_saturation)

    score = sub.add_parser("score", help="normalize and aggregate a score table")
    score.add_argument("--table", required=True)
    score.add_argument("--method", choices=["baseline", "human", "success"], required=True)
    score.add_argument("--aggregate", choices=["median", "iqm"], required=True)
    score.set_defaults(handler=_cmd_score)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except (HrLabError, OSError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_FAILED
