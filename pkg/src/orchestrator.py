import asyncio
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

import config
from errors import InadmissibleSweep
from services import geometry
from services.geometry import PhysicalParams
from services.run_config import RunConfig
from services.solver_service import EigenvalueSolver, create_solver
from services.spectrum import QuantumNumbers, energy_exact, level_table, radial_mode
from utils import LEVEL_COLUMNS, levels_frame

logger = logging.getLogger(__name__)


class SpectrumOrchestrator:
    """Coordinates level tables, sweeps and wavefunctions on a worker pool.

    Work items are pure, so they run in any order; every table is sorted before
    it is returned, which keeps output bytes independent of the worker count.
    """

    def __init__(self, solver: EigenvalueSolver, workers: Optional[int] = None):
        self.solver = solver
        self.workers = workers or config.worker_count()
        self.executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="dspec")

    @classmethod
    def from_config(cls, run_config: RunConfig) -> "SpectrumOrchestrator":
        kwargs = {}
        if run_config.solver == "oracle":
            kwargs["points"] = config.ORACLE_POINTS
        return cls(create_solver(run_config.solver, **kwargs))

    async def initialize(self):
        await self.solver.initialize()
        logger.debug("orchestrator ready: solver=%s workers=%d", self.solver.name, self.workers)

    async def _run(self, func, *args, **kwargs):
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self.executor, partial(func, *args, **kwargs))

    async def _levels(self, params: PhysicalParams, run_config: RunConfig) -> list:
        """Level table for one parameter set, one worker job per l."""
        jobs = [
            self._run(level_table, params, (l, l), run_config.n_max, run_config.spins, self.solver)
            for l in range(run_config.l_min, run_config.l_max + 1)
        ]
        levels = []
        for part in await asyncio.gather(*jobs):
            levels.extend(part)
        return levels

    async def spectrum(self, run_config: RunConfig) -> pd.DataFrame:
        """Level table sorted by E_exact."""
        params = run_config.physical_params()
        levels = await self._levels(params, run_config)
        logger.info(
            "Computed %d levels (rho0=%.6g, solver=%s)", len(levels), geometry.singular_radius(params), self.solver.name
        )
        return levels_frame(levels)

    def validate_sweep(self, run_config: RunConfig) -> List[float]:
        """Sweep values, after checking every one of them leaves an admissible region."""
        offending = run_config.offending_sweep_values()
        if offending:
            raise InadmissibleSweep(run_config.sweep_param, offending)
        return run_config.sweep_values()

    async def sweep(self, run_config: RunConfig) -> pd.DataFrame:
        """Long-format table: one row per (sweep value, level), sweep order then E_exact."""
        values = self.validate_sweep(run_config)

        async def one(index: int, value: float):
            levels = await self._levels(run_config.params_at(value), run_config)
            return index, levels

        tasks = [one(i, v) for i, v in enumerate(values)]
        results: Dict[int, list] = {}
        for future in tqdm(
            asyncio.as_completed(tasks),
            total=len(tasks),
            desc=f"sweep {run_config.sweep_param}",
            disable=not sys.stderr.isatty(),
        ):
            index, levels = await future
            results[index] = levels

        frames = []
        for index, value in enumerate(values):
            frame = levels_frame(results[index])
            frame.insert(0, "value", value)
            frame.insert(0, "param", run_config.sweep_param)
            frames.append(frame)
        logger.info("Swept %s over %d values", run_config.sweep_param, len(values))
        if not frames:
            return pd.DataFrame(columns=["param", "value"] + LEVEL_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    async def wavefunction(
        self, qn: QuantumNumbers, params: PhysicalParams, samples: int
    ) -> Tuple[pd.DataFrame, Dict[str, Any]]:
        """Sampled R(rho) plus the level data that belongs in the file header."""
        mode, level = await asyncio.gather(
            self._run(radial_mode, qn, params, samples),
            self._run(energy_exact, qn, params),
        )
        frame = pd.DataFrame({"rho": mode.grid, "R": mode.values})
        meta = {
            "n": qn.n,
            "l": qn.l,
            "s": qn.s,
            "E_exact": level.energy_exact,
            "nu": level.nu,
            "eta": level.eta_exact,
            "rho0": level.rho0,
        }
        return frame, meta

    @staticmethod
    def geometry_report(params: PhysicalParams, rho: float) -> Dict[str, Any]:
        """Frame data at one radius, JSON-ready."""
        field = geometry.frame_field(params, rho)
        return {
            "rho": rho,
            "rho0": geometry.singular_radius(params),
            "inside_region": field.inside_region,
            "timelike_observer": geometry.timelike_observer(params, rho),
            "g": field.g.tolist(),
            "g_det": geometry.metric_determinant(params, rho),
            "g_inverse_tt": float(geometry.inverse_metric(params, rho)[geometry.T, geometry.T]),
            "tetrad": field.tetrad.tolist(),
            "tetrad_residual": geometry.tetrad_residual(params, rho),
            "connection": [[c.mu, c.a, c.b, c.value] for c in field.connection],
            "structure_residual": geometry.structure_equation_residual(params, rho),
            "structure_residual_fd": geometry.structure_equation_residual(
                params, rho, method="finite_difference", h=min(1e-3, 0.5 * rho)
            ),
            "torsion_coefficient": field.torsion_coefficient,
        }

    def cleanup(self):
        self.executor.shutdown(wait=True)
