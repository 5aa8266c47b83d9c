"""
Batch front door
    python main.py --config run.json [--force] [--jobs N] [--out DIR] [--log-level LEVEL]
Exit codes: 0 success, 2 invalid config, 3 regime violation, 4 non-convergence,
1 any other failure. Failures leave error.json in the output directory.
"""

import argparse
import asyncio
import json
import logging
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, List, Dict, Any

import numpy as np
import pydantic
import scipy
from pydantic import ValidationError

from . import __version__
from .base import BozkError, ContractError, ConvergenceError
from .commands import REGISTRY
from .config import DEFAULT_OUTPUT_DIR, RunConfig, load_config, config_hash, get_settings

logger = logging.getLogger(__name__)


def manifest(config: RunConfig, seed: int, jobs: int, force: bool) -> Dict[str, Any]:
    return {
        "command": config.command,
        "config_sha256": config_hash(config),
        "config": config.model_dump(mode="json"),
        "seed": seed,
        "jobs": jobs,
        "force": force,
        "started": datetime.now(timezone.utc).isoformat(),
        "versions": {
            "bozk": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pydantic": pydantic.VERSION
        }
    }


def write_error(out_dir: Path, error: Dict[str, Any]):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "error.json").write_text(json.dumps(error, indent=2, default=str))
    print(json.dumps(error), file=sys.stderr)


def run(
    config: RunConfig,
    out_dir: Optional[Path] = None,
    force: bool = False,
    jobs: Optional[int] = None,
    seed: Optional[int] = None
) -> int:
    """Execute one validated run; returns the process exit status."""

    settings = get_settings()
    out_dir = Path(out_dir or config.output_dir or settings.output_dir)
    jobs = jobs or settings.jobs
    if seed is None:
        seed = config.seed if config.seed is not None else settings.seed
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(json.dumps(manifest(config, seed, jobs, force), indent=2))

    logger.info(f"running {config.command} into {out_dir}")
    try:
        command = REGISTRY[config.command](config, out_dir, force=force, jobs=jobs, seed=seed)
        result = asyncio.run(command.execute())
    except BozkError as e:
        logger.error(f"{config.command} failed: {e}")
        error = e.to_dict()
        if isinstance(e, ConvergenceError):
            error["c"] = e.c
            error["diagnostics"] = e.diagnostics
        write_error(out_dir, error)
        return e.exit_code
    except Exception as e:
        logger.exception(f"{config.command} crashed")
        write_error(out_dir, {"error": type(e).__name__, "message": str(e), "exit_code": 1})
        return 1

    (out_dir / "result.json").write_text(json.dumps(result, indent=2, default=str))
    logger.info(f"{config.command} finished, artifacts in {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bozk", description="BO-ZK solitary-wave laboratory")
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--force", action="store_true", help="Override the regime gate")
    parser.add_argument("--jobs", type=int, default=None, help="Concurrent jobs for sweeps")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except BozkError as e:
        write_error(Path(args.out or DEFAULT_OUTPUT_DIR), e.to_dict())
        return e.exit_code
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    if args.jobs is not None and args.jobs < 1:
        write_error(Path(args.out or settings.output_dir),
                    ContractError("--jobs must be at least 1").to_dict())
        return 2

    try:
        config = load_config(args.config)
    except ValidationError as e:
        write_error(Path(args.out or settings.output_dir), {
            "error": "ValidationError",
            "message": str(e),
            "details": json.loads(e.json()),
            "exit_code": 2
        })
        return 2
    except BozkError as e:
        write_error(Path(args.out or settings.output_dir), e.to_dict())
        return e.exit_code

    return run(config, args.out, force=args.force, jobs=args.jobs)
