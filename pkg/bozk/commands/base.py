import asyncio
import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Any, Optional

from ..base import Params, Verdict, RegimeError, ConvergenceError
from ..config import RunConfig
from ..fieldio import write_field, read_field
from ..solver import SolitaryWave, SolverOptions, classify, petviashvili_solve
from ..spectral import Grid2D, Field

logger = logging.getLogger(__name__)


class Command(ABC):
    """One batch command: validated config in, artifacts in out_dir, JSON summary back."""

    name: str = ""
    needs_grid = True

    def __init__(self, config: RunConfig, out_dir: Path, force: bool = False, jobs: int = 1, seed: int = 0):
        self.config = config
        self.out_dir = Path(out_dir)
        self.force = force
        self.jobs = jobs
        self.seed = seed
        self.params: Params = config.params.to_params()
        self.grid: Optional[Grid2D] = config.grid.to_grid() if config.grid and self.needs_grid else None

    @abstractmethod
    async def execute(self) -> Dict[str, Any]:
        pass

    def write_json(self, name: str, data: Dict[str, Any], directory: Optional[Path] = None) -> Path:
        path = (directory or self.out_dir) / name
        path.write_text(json.dumps(data, indent=2, default=str))
        logger.info(f"wrote {path}")
        return path

    def gate(self, params: Optional[Params] = None):
        """Refuse to compute outside the existence branch unless forced."""
        params = params or self.params
        verdict = classify(params)
        if verdict.verdict != Verdict.EXISTS and not self.force:
            raise RegimeError(
                f"{verdict.verdict.value} regime ({verdict.matched_case}) for {params.to_dict()}; "
                "use --force to run anyway"
            )
        return verdict

    def solver_options(self) -> SolverOptions:
        opts = self.config.solver
        guess = None
        if opts.initial_guess:
            guess, _ = read_field(opts.initial_guess)
        return SolverOptions(
            gamma=opts.gamma,
            tol=opts.tol,
            max_iter=opts.max_iter,
            initial_guess=guess,
            amplitude=opts.amplitude,
            tail_tol=opts.tail_tol,
            override=self.force
        )

    async def solve(self, params: Optional[Params] = None, directory: Optional[Path] = None) -> SolitaryWave:
        """Solve off the event loop; diagnostics are written even when the solver fails to converge."""
        params = params or self.params
        directory = directory or self.out_dir
        wave = await asyncio.to_thread(petviashvili_solve, params, self.grid, self.solver_options())
        self.write_json("wave.json", wave.to_dict(), directory)
        write_field(directory / "profile.bozk", wave.profile, params)
        if not wave.converged:
            raise ConvergenceError(
                f"petviashvili did not converge in {wave.iterations} iterations "
                f"(residual {wave.eq_residual_inf:.2e})",
                diagnostics=wave.to_dict(),
                c=params.c
            )
        return wave

    def save_field(self, name: str, field: Field, params: Optional[Params] = None) -> Path:
        return write_field(self.out_dir / name, field, params)
