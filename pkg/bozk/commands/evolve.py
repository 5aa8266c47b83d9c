import asyncio
import logging
from typing import Dict, Any, Optional

from .base import Command
from ..base import BlowUpError, ContractError, DealiasRule
from ..evolve import EvolveOptions, EvolveReport, evolve, stability_experiment
from ..fieldio import read_field, write_field

logger = logging.getLogger(__name__)


class EvolveCommand(Command):
    name = "evolve"

    def options(self, record_every: int, snapshot_every: Optional[int] = None) -> EvolveOptions:
        section = self.config.evolve
        return EvolveOptions(
            dealias=section.dealias if section else DealiasRule.TWO_THIRDS,
            direction=section.direction if section else 1,
            record_every=record_every,
            snapshot_every=snapshot_every
        )

    def finish(self, report: EvolveReport, csv_name: str) -> Dict[str, Any]:
        report.to_csv(self.out_dir / csv_name)
        self.save_field("final.bozk", report.final_field, self.params)
        if report.snapshots:
            snap_dir = self.out_dir / "snapshots"
            snap_dir.mkdir(exist_ok=True)
            for n, (t, snapshot) in enumerate(report.snapshots):
                write_field(snap_dir / f"snap_{n:05d}.bozk", snapshot, self.params)
        summary = report.to_dict()
        self.write_json("evolve.json", summary)
        return summary

    async def run_guarded(self, fn, csv_name: str, *args, **kwargs) -> Dict[str, Any]:
        try:
            report = await asyncio.to_thread(fn, *args, **kwargs)
        except BlowUpError as e:
            if e.report is not None:
                self.finish(e.report, csv_name)
            raise
        return self.finish(report, csv_name)

    async def execute(self) -> Dict[str, Any]:
        section = self.config.evolve
        reference = None
        if section.initial_field:
            u0, _ = read_field(section.initial_field)
            if u0.grid != self.grid:
                raise ContractError("initial field does not live on the configured grid")
        else:
            self.gate()
            wave = await self.solve()
            u0 = reference = wave.profile
        opts = self.options(section.record_every, section.snapshot_every)
        return await self.run_guarded(
            evolve, "evolution.csv", u0, self.params, section.dt, section.t_end, opts, reference
        )


class StabilityCommand(EvolveCommand):
    name = "stability"

    async def execute(self) -> Dict[str, Any]:
        section = self.config.stability
        self.gate()
        wave = await self.solve()
        return await self.run_guarded(
            stability_experiment, "stability.csv",
            self.params, section.perturbation_size, section.t_end, section.dt,
            wave=wave, seed=self.seed, opts=self.options(section.record_every)
        )
