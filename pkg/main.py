"""
Kinetic Limit Command Line
Runs one subcommand against a resolved configuration and writes its CSV tables
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from commands.acceptance import runAcceptAll
from commands.diagrams import runDiagramBounds
from commands.dyson import runLadderCheck, runMixing, runPole
from commands.kinetic import (
    runBranch,
    runDiffusion,
    runDrift,
    runEinstein,
    runGap,
    runStationary,
)
from commands.lattice import runBloch, runCombesThomas
from commands.reservoir import runCorrelation, runPsd
from config.env import RunConfig
from constants.defaults import DEFAULT_CONFIG, SUBCOMMANDS
from log.logging import logger
from utils.errors import KineticLimitError, exitCodeFor
from utils.output import writeErrorFile, writeResolvedConfig

COMMANDS: Dict[str, Callable[[RunConfig, str], None]] = {
    "psd": runPsd,
    "correlation": runCorrelation,
    "combes-thomas": runCombesThomas,
    "bloch": runBloch,
    "kinetic-stationary": runStationary,
    "kinetic-gap": runGap,
    "drift": runDrift,
    "diffusion": runDiffusion,
    "branch": runBranch,
    "einstein": runEinstein,
    "diagram-bounds": runDiagramBounds,
    "ladder-check": runLadderCheck,
    "pole": runPole,
    "mixing": runMixing,
    "accept-all": runAcceptAll,
}


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Kinetic limit, Einstein relation and diagram resummation checks"
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=str, default=None, help="key=value configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--quiet", action="store_true", help="console shows warnings and errors only")
    parser.add_argument("--verbose", action="store_true", help="prefix console records with the module")
    return parser.parse_args(argv)


def run(
    subcommand: str,
    config_path: Optional[str],
    overrides: List[str],
    out_dir: Optional[str] = None,
    seed: Optional[int] = None,
) -> int:
    """
    Resolve the configuration, run one subcommand and map failures to exit codes.

    --out and --seed win over the file and the overrides; a configuration
    that cannot be read reports into --out or the default directory.
    """
    target = out_dir or DEFAULT_CONFIG["run.out"]
    try:
        cfg = RunConfig(config_path, overrides)
        if seed is not None:
            cfg.setVar("run.seed", str(seed))
        if out_dir is not None:
            cfg.setVar("run.out", out_dir)
        out_dir = target = cfg.getStr("run.out")
        writeResolvedConfig(out_dir, cfg.resolvedText())

        logger.note(f"Running {subcommand} (config: {cfg.source}, output: {out_dir})")
        COMMANDS[subcommand](cfg, out_dir)
    except KineticLimitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        writeErrorFile(target, e, subcommand)
        return exitCodeFor(e)
    except Exception as e:
        logger.error(f"Fatal error: {e}")
        writeErrorFile(target, e, subcommand)
        return exitCodeFor(e)

    logger.success(f"{subcommand} finished, results in {out_dir}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    args = parse_args(argv)
    if args.quiet:
        logger.setConsoleLevel(logging.WARNING)
    if args.verbose:
        logger.enableVerboseFormat()
    return run(args.subcommand, args.config, args.overrides, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
