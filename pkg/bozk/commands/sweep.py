import asyncio
import csv
import logging
from typing import Dict, Any, Tuple

from .base import Command
from ..functionals import d_of_c_curve, loglog_slope, second_difference

logger = logging.getLogger(__name__)


class SweepCommand(Command):
    """d(c) along the solitary-wave branch; one job and one subdirectory per speed."""

    name = "sweep-dc"

    async def sample(self, c: float, semaphore: asyncio.Semaphore) -> Tuple[float, float]:
        async with semaphore:
            params = self.params.with_speed(c)
            directory = self.out_dir / f"c_{c:g}"
            directory.mkdir(parents=True, exist_ok=True)
            wave = await self.solve(params, directory)
            (point,) = d_of_c_curve(self.params, [c], lambda _: wave)
            return point

    async def execute(self) -> Dict[str, Any]:
        c_values = self.config.sweep.c_values
        self.gate(self.params.with_speed(c_values[0]))
        semaphore = asyncio.Semaphore(self.jobs)
        curve = list(await asyncio.gather(*[self.sample(c, semaphore) for c in c_values]))

        with (self.out_dir / "dc.csv").open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(("c", "d"))
            for c, d in curve:
                writer.writerow((repr(c), repr(d)))

        p = self.params.p
        summary = {
            "curve": [{"c": c, "d": d} for c, d in curve],
            "loglog_slope": loglog_slope(curve),
            "expected_slope": 2.0 / p - 0.5,
            "second_differences": {
                f"{c:g}": second_difference(curve, c) for c, _ in curve[1:-1]
            },
            "convex_expected": p < 4.0 / 3.0
        }
        self.write_json("summary.json", summary)
        return summary
