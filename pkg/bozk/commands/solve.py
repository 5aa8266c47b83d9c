import logging
from typing import Dict, Any

from .base import Command
from ..base import FitError
from ..functionals import mass_ratio_check, ground_state_relations
from ..solver import wave_decay_report, symmetry_report

logger = logging.getLogger(__name__)


class SolveCommand(Command):
    name = "solve"

    async def execute(self) -> Dict[str, Any]:
        verdict = self.gate()
        wave = await self.solve()
        summary = {
            "classification": verdict.to_dict(),
            "wave": wave.to_dict(),
            "symmetry": symmetry_report(wave)
        }
        if self.params.p != 4:
            summary["mass_ratio_mismatch"] = mass_ratio_check(wave.profile, self.params)
        if verdict.matched_case in ("(i)", "(ii)"):
            summary["ground_state_relations"] = ground_state_relations(wave.profile, self.params)
        try:
            summary["decay"] = wave_decay_report(
                wave, contamination_threshold=self.config.solver.contamination_threshold
            ).to_dict()
        except FitError as e:
            logger.warning(f"decay fits skipped: {e}")
            summary["decay"] = {"error": str(e)}
        self.write_json("summary.json", summary)
        return summary
