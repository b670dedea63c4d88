from abc import ABC, abstractmethod
import asyncio
import logging
import math
from typing import List

import config
from services import oracle
from services.specfun import bessel_zeros

logger = logging.getLogger(__name__)


class EigenvalueSolver(ABC):
    """Abstract source of hard-wall eigenvalues eta * rho0 for a Bessel order"""

    name: str = "abstract"

    @abstractmethod
    async def initialize(self) -> None:
        """Prepare the solver (compile kernels, warm caches)"""
        pass

    @abstractmethod
    def eta_rho0_values(self, nu: float, count: int) -> List[float]:
        """First ``count`` values of eta * rho0 for order |nu|, increasing

        Entry i belongs to radial index n = i, i.e. to the (i+1)-th Bessel zero.
        """
        pass


class BesselZeroSolver(EigenvalueSolver):
    """Exact quantization: zeros of J_|nu| from services.specfun."""

    name = "bessel"

    async def initialize(self) -> None:
        pass

    def eta_rho0_values(self, nu: float, count: int) -> List[float]:
        return bessel_zeros(abs(nu), count)


class FiniteDifferenceSolver(EigenvalueSolver):
    """Richardson-extrapolated finite-difference eigenvalues on the unit disc.

    The operator scales exactly as 1/rho0^2, so sqrt(lambda) on rho0 = 1 is eta * rho0.
    """

    name = "oracle"

    def __init__(self, points: int = config.ORACLE_POINTS):
        self.points = points

    async def initialize(self) -> None:
        loop = asyncio.get_running_loop()
        # first call compiles the Sturm kernel
        await loop.run_in_executor(
            None, oracle.lowest_eigenvalues, oracle.discretize(0.0, 1.0, config.MIN_ORACLE_POINTS), 1,
        )
        logger.debug("finite-difference solver ready (%d points)", self.points)

    def eta_rho0_values(self, nu: float, count: int) -> List[float]:
        return [
            math.sqrt(oracle.eigenvalue_extrapolated(abs(nu), 1.0, index, self.points))
            for index in range(1, count + 1)
        ]


SOLVERS = {
    BesselZeroSolver.name: BesselZeroSolver,
    FiniteDifferenceSolver.name: FiniteDifferenceSolver,
}


def create_solver(name: str, **kwargs) -> EigenvalueSolver:
    try:
        return SOLVERS[name](**kwargs)
    except KeyError:
        raise ValueError(f"unknown solver {name!r}, expected one of {sorted(SOLVERS)}") from None
