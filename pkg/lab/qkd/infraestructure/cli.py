"""
Command-line front end: `qkd-lab run|table|sweep|converge|landscape|train`.

Flags override the fields of an optional JSON config file; flags left
out keep the file (or default) values.
"""

import argparse
import asyncio
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from lab.qkd.application.use_cases import (
    ProtocolRunner,
    RunConvergenceUseCase,
    RunLandscapeUseCase,
    RunSingleUseCase,
    RunSweepUseCase,
    RunTableUseCase,
    TrainUseCase,
)
from lab.qkd.domain.entities import ExperimentConfig
from lab.qkd.domain.exceptions import QkdError
from lab.qkd.domain.utils.decorators import configure_logging
from lab.qkd.domain.value_objects import (
    Ansatz,
    B92Mode,
    ChannelKind,
    EvalMode,
    OptimizerKind,
    ProtocolName,
    QberDefinition,
    QrlVersion,
)

from .config_loader import load_config, merge_overrides
from .gradient_optimizer import ParameterShiftOptimizer
from .pandas_reporter import PandasReportWriter
from .scipy_optimizer import CobylaOptimizer
from .sklearn_metrics import SklearnMetricsEngine


logger = logging.getLogger("qkd.cli")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

_VERBOSITY = {0: logging.WARNING, 1: logging.INFO}


def _values(enum) -> List[str]:
    return [member.value for member in enum]


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _kind_list(text: str) -> tuple:
    kinds = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [k for k in kinds if k not in _values(ChannelKind)]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown channel kinds {unknown}; choose from {_values(ChannelKind)}")
    return kinds


def _common() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, help="JSON config file (schema_version 1)")
    parent.add_argument("--protocol", choices=_values(ProtocolName))
    parent.add_argument("--bits", type=int, dest="n_bits", help="key bits per sample")
    parent.add_argument("--samples", type=int, help="independent samples S")
    parent.add_argument("--shots", type=int)
    parent.add_argument("--channel", choices=_values(ChannelKind))
    parent.add_argument("--strength", type=float)
    parent.add_argument("--seed", type=int)
    parent.add_argument("--out", type=Path, help="output directory")
    parent.add_argument("--mode", choices=_values(EvalMode), help="learner reward: exact or sampled")
    parent.add_argument("--b92-mode", choices=B92Mode.choices(), dest="b92_mode")
    parent.add_argument("--qber-def", choices=_values(QberDefinition), dest="qber_def")
    parent.add_argument("--eve", action="store_true", default=None, help="intercept-resend eavesdropper")
    parent.add_argument("--threshold", type=float, help="QBER abort threshold")
    parent.add_argument("--workers", type=int)
    parent.add_argument("--optimizer", choices=_values(OptimizerKind))
    parent.add_argument("--ansatz", choices=_values(Ansatz))
    parent.add_argument("--layers", type=int)
    parent.add_argument("--max-iterations", type=int, dest="max_iterations")
    parent.add_argument("--learning-rate", type=float, dest="learning_rate")
    parent.add_argument("--frozen", action="store_true", help="keep the PQC at its initial angles")
    parent.add_argument("--epsilon", type=float, help="learner convergence width")
    parent.add_argument("--episodes", type=int, dest="max_episodes", help="learner episode budget")
    parent.add_argument("-v", "--verbose", action="count", default=0)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkd-lab", description="QKD protocol laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    sub.add_parser("run", parents=[common], help="one configuration, full artifacts")

    table = sub.add_parser("table", parents=[common], help="comparison table across protocols")
    table.add_argument(
        "--protocols",
        type=lambda s: tuple(p.strip() for p in s.split(",") if p.strip()),
        help="comma-separated protocols (default: all eight)",
    )

    sweep = sub.add_parser("sweep", parents=[common], help="accuracy over channel kinds and strengths")
    sweep.add_argument("--grid", type=_float_list, help="comma-separated strengths in [0, 1]")
    sweep.add_argument("--kinds", type=_kind_list, help="comma-separated channel kinds")

    converge = sub.add_parser("converge", parents=[common], help="learner trajectories")
    converge.add_argument("--version", choices=_values(QrlVersion), default=QrlVersion.V1.value, dest="qrl_version")
    converge.add_argument("--trials", type=int)

    landscape = sub.add_parser("landscape", parents=[common], help="P(outcome | bit) and reward over delta_theta")
    landscape.add_argument("--points", type=int, default=201, help="grid points over [-pi, pi]")
    landscape.add_argument("--theta1", type=float, default=math.pi / 2, help="Alice's encoding angle")

    sub.add_parser("train", parents=[common], help="train a QNN protocol's PQC and write the loss trace")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        name: getattr(args, name, None)
        for name in (
            "protocol", "n_bits", "samples", "shots", "channel", "strength",
            "seed", "out", "b92_mode", "qber_def", "eve", "threshold",
            "workers", "grid", "kinds", "trials",
        )
    }
    training = {
        "optimizer": args.optimizer,
        "ansatz": args.ansatz,
        "layers": args.layers,
        "max_iterations": args.max_iterations,
        "learning_rate": args.learning_rate,
        "train": False if args.frozen else None,
    }
    qrl = {"mode": args.mode, "epsilon": args.epsilon, "max_episodes": args.max_episodes}
    return merge_overrides(config, overrides, training=training, qrl=qrl)


def _runner() -> ProtocolRunner:
    return ProtocolRunner({
        OptimizerKind.DERIVATIVE_FREE: CobylaOptimizer(),
        OptimizerKind.GRADIENT_DESCENT: ParameterShiftOptimizer(),
    })


def _execute(args: argparse.Namespace, config: ExperimentConfig) -> None:
    writer = PandasReportWriter(config.out)
    engine = SklearnMetricsEngine()

    match args.command:
        case "run":
            report = asyncio.run(RunSingleUseCase(_runner(), engine, writer).execute(config))
            s = report.summary
            print(f"{config.protocol.label}: accuracy {s.accuracy}  qber_sifted {s.qber_sifted}  "
                  f"qber_all {s.qber_all}  sift {s.sift_fraction}")
            if report.roc is not None:
                print(f"AUC {report.roc.auc:.4f}")
            if report.aborted:
                print(f"{report.aborted}/{len(report.qber_reports)} samples abort at QBER > {config.threshold}")
        case "table":
            protocols = args.protocols or _values(ProtocolName)
            configs = [merge_overrides(config, {"protocol": p}) for p in protocols]
            report = asyncio.run(RunTableUseCase(_runner(), engine, writer).execute(configs))
            print(report.text)
        case "sweep":
            result = asyncio.run(RunSweepUseCase(_runner(), engine, writer).execute(config))
            print(f"{len(result.rows)} cells written to {result.path}")
        case "converge":
            report = asyncio.run(RunConvergenceUseCase(writer).execute(QrlVersion(args.qrl_version), config))
            converged = sum(1 for r in report.results if r.converged)
            print(f"{converged}/{len(report.results)} trials converged; trajectories in {report.episodes_path}")
        case "landscape":
            report = asyncio.run(RunLandscapeUseCase(writer).execute(config, args.points, args.theta1))
            print(f"{len(report.points)} points written to {report.path}")
        case "train":
            report = asyncio.run(TrainUseCase(_runner(), writer).execute(config))
            print(f"loss {report.trace.initial_loss:.6f} -> {report.trace.best_loss:.6f}; "
                  f"thetas {[round(t, 6) for t in report.params.thetas]}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(_VERBOSITY.get(args.verbose, logging.DEBUG))
    try:
        config = resolve_config(args)
        logger.info(f"{args.command}: {config.protocol.value} seed={config.seed} hash={config.fingerprint()}")
        _execute(args, config)
    except QkdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
