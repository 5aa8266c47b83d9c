import logging
from typing import Dict, Any, List, Tuple

import numpy as np

from .base import Command
from ..base import FitError
from ..kernel import KernelSpec, KERNEL_CONSTANT, kernel_field, kernel_decay_fit, kernel_constant, kernel_l1

logger = logging.getLogger(__name__)

SAMPLE_RANGE = (0.5, 5.0)


def sample_indices(grid, count: int, seed: int) -> List[Tuple[int, int]]:
    """Grid points with 0.5 <= |x|, |y| <= 5, drawn reproducibly."""
    lo, hi = SAMPLE_RANGE
    xs = np.flatnonzero((np.abs(grid.x) >= lo) & (np.abs(grid.x) <= hi))
    ys = np.flatnonzero((np.abs(grid.y) >= lo) & (np.abs(grid.y) <= hi))
    if len(xs) == 0 or len(ys) == 0:
        raise FitError(f"no grid points with {lo} <= |x|, |y| <= {hi}")
    rng = np.random.default_rng(seed)
    return [(int(rng.choice(xs)), int(rng.choice(ys))) for _ in range(count)]


class KernelCommand(Command):
    name = "kernel"

    async def execute(self) -> Dict[str, Any]:
        spec = KernelSpec(self.params)
        field = kernel_field(spec, self.grid)
        self.save_field("kernel.bozk", field, spec.canonical)
        opts = self.config.kernel
        summary: Dict[str, Any] = {
            "params": spec.canonical.to_dict(),
            "integral": kernel_l1(spec),
            "analytic_constant": KERNEL_CONSTANT
        }
        try:
            summary["decay"] = kernel_decay_fit(spec, self.grid).to_dict()
        except FitError as e:
            logger.warning(f"kernel decay fit skipped: {e}")
            summary["decay"] = {"error": str(e)}
        indices = sample_indices(self.grid, opts.samples, self.seed)
        summary["constant_fit"] = kernel_constant(spec, self.grid, indices, opts.tol, opts.images).to_dict()
        self.write_json("kernel.json", summary)
        return summary
