""" Command line entry point.

    shapeservo run --config scenario.json [--seed N] [--out DIR]
    shapeservo study --preset {variance,noise,broyden,correlation,unreachable,forms}
    shapeservo study --config study.json [--workers N]
    shapeservo export-target --config scenario.json

Output goes to --out, else $SHAPESERVO_OUT, else ./shapeservo_out.
"""
import argparse
import sys
import pandas as pd
from shapeservo import __version__
from shapeservo.common.errors import AppError, ConfigError
from shapeservo.harness.scenario import (
    load_scenario,
    make_target,
    output_directory,
    run_scenario,
)
from shapeservo.harness.studies import PRESETS, load_study, run_preset, run_study
import logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64 bit integer")
    return value


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapeservo",
        description="Shape servoing of deformable and rigid planar objects.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--seed", type=_seed, help="override the configured seed")
        sub.add_argument("--out", help="output directory")

    run = commands.add_parser("run", help="run a single scenario")
    run.add_argument("--config", required=True, help="scenario JSON file")
    common(run)

    study = commands.add_parser("study", help="run a preset study or a study file")
    source = study.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=PRESETS)
    source.add_argument("--config", help="study JSON file")
    study.add_argument("--workers", type=int, default=1, help="worker processes")
    common(study)

    export = commands.add_parser("export-target", help="write a scenario's target contour")
    export.add_argument("--config", required=True, help="scenario JSON file")
    common(export)
    return parser


def _run(args) -> int:
    scenario = load_scenario(args.config)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    out_dir = output_directory(args.out)
    result = run_scenario(scenario, out_dir)
    path = out_dir / "summary.csv"
    pd.DataFrame([result.summary()]).to_csv(path, index=False, float_format="%.12g")
    logger.info("Wrote {}".format(path))
    return EXIT_OK


def _study(args) -> int:
    out_dir = output_directory(args.out)
    if args.config is not None:
        config = load_study(args.config)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        report = run_study(config, out_dir=out_dir, workers=args.workers)
    else:
        seed = args.seed if args.seed is not None else 0
        report = run_preset(args.preset, seed=seed, out_dir=out_dir, workers=args.workers)
    report.write(out_dir)
    return EXIT_OK


def _export_target(args) -> int:
    scenario = load_scenario(args.config)
    out_dir = output_directory(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    make_target(scenario).to_csv(out_dir / "target_{}.csv".format(scenario.name))
    return EXIT_OK


COMMANDS = {"run": _run, "study": _study, "export-target": _export_target}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as error:
        logger.error("Invalid configuration: {}".format(error))
        return EXIT_CONFIG
    except AppError as error:
        logger.error(str(error))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
