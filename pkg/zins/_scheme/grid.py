"""Time grids with an exact delay offset"""
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from zins.errors import DivisibilityError, DomainError

log = getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    """the grid :math:`t_k = k\\Delta` for :math:`k = -M, .., K`

    args
    ----
    delta: float
        the effective step size τ/M
    M: int
        number of steps per delay, X(t - τ) is found M columns back
    K: int
        number of steps on [0, T]
    tau: float
        the delay
    """

    delta: float
    M: int
    K: int
    tau: float

    @property
    def horizon(self) -> float:
        "the effective horizon K·Δ"
        return self.K * self.delta

    @property
    def size(self) -> int:
        "number of grid points, M + K + 1"
        return self.M + self.K + 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(-self.M, self.K + 1) * self.delta

    def coarsen(self, factor: int) -> "Grid":
        """the grid with a step size factor times larger

        raises :class:`~.DivisibilityError` unless factor divides M and K
        """
        if factor < 1 or self.M % factor or self.K % factor:
            raise DivisibilityError(
                f"Δ = {self.delta * factor:g} does not divide the delay or horizon "
                f"into whole steps (M = {self.M}, K = {self.K}, factor {factor})"
            )
        M = self.M // factor
        return Grid(self.tau / M, M, self.K // factor, self.tau)


def make_grid(tau: float, delta: float, horizon: float) -> Grid:
    """snap a step size to τ/M and a horizon to a multiple of it

    args
    ----
    tau: float
        the delay
    delta: float
        the requested step size, M = round(τ/Δ)
    horizon: float
        the requested horizon T, K = round(T/Δ) with the effective Δ

    returns
    -------
    grid: Grid
    """
    if not delta > 0:
        raise DomainError(f"step size must be positive, got {delta}")
    if horizon < 0:
        raise DomainError(f"horizon must be nonnegative, got {horizon}")
    M = max(1, int(round(tau / delta)))
    effective = tau / M
    K = int(round(horizon / effective))
    grid = Grid(effective, M, K, float(tau))
    if not np.isclose(effective, delta, rtol=1e-12, atol=0):
        log.info(f"Snapped Δ = {delta:g} to τ/M = {effective:.12g} with M = {M}")
    if not np.isclose(grid.horizon, horizon, rtol=1e-12, atol=1e-15):
        log.info(f"Snapped T = {horizon:g} to {grid.horizon:.12g} with K = {K}")
    return grid
