# -*- coding: utf-8 -*-
"""
The truncated Euler-Maruyama scheme
...................................

.. math::

    X(t_{k+1}) = X(t_k) + f_\\Delta(X(t_k), r_k)\\Delta
        + \\varphi(X(t_{k-M}), r_k)\\,g_\\Delta(X(t_k))\\,\\Delta B_k
        + h(X(t_k), r_k)\\,\\Delta N_k

Paths are simulated in batches. A :class:`PathState` holds one row per
path, with the initial segment in the first M + 1 columns, so the delayed
value of step k is found in column k and the current value in column k + M.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Tuple

import numpy as np

from zins._model.coefficients import jump_h
from zins._scheme.grid import Grid, make_grid
from zins._scheme.noise import NoiseIncrements, make_noise
from zins._scheme.streams import PathStream
from zins.errors import NumericalError
from zins.truncation import clamped_diffusion, clamped_drift

log = getLogger(__name__)


@dataclass(eq=False)
class PathState:
    """simulated trajectories on [-τ, T]

    args
    ----
    grid: Grid
        the grid, with Δ·M = τ
    values: ndarray
        shape (paths, M + K + 1), X(t_k) for k = -M..K
    regimes: ndarray
        shape (paths, K + 1), r(t_k) for k = 0..K
    noise: NoiseIncrements
        the increments the paths were driven by
    """

    grid: Grid
    values: np.ndarray
    regimes: np.ndarray
    noise: NoiseIncrements = None

    @property
    def num_paths(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def path(self) -> np.ndarray:
        "the values at t_k >= 0"
        return self.values[:, self.grid.M :]

    @property
    def terminal(self) -> np.ndarray:
        "X(T) of every path"
        return self.values[:, -1]

    def current(self, k: int) -> np.ndarray:
        "X(t_k)"
        return self.values[:, k + self.grid.M]

    def delayed(self, k: int) -> np.ndarray:
        "X(t_k - τ) = X(t_{k-M})"
        return self.values[:, k]

    def step_value(self, t) -> np.ndarray:
        """the step process at time t, constant on [t_k, t_{k+1})

        args
        ----
        t: float or ndarray
            times in [-τ, T]

        returns
        -------
        values: ndarray
            shape (paths,) for a scalar t, else (paths, len(t))
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < -self.grid.tau - 1e-12) or np.any(t > self.grid.horizon + 1e-12):
            raise ValueError(f"t must lie in [-{self.grid.tau:g}, {self.grid.horizon:g}]")
        k = np.floor(t / self.grid.delta + 1e-9).astype(int)
        k = np.clip(k, -self.grid.M, self.grid.K)
        return self.values[:, k + self.grid.M]

    def integral(self) -> np.ndarray:
        "∫₀ᵀ x̄(t) dt of every path, an exact left rectangle sum"
        return self.values[:, self.grid.M : -1].sum(axis=1) * self.grid.delta

    def running_max(self) -> np.ndarray:
        "max of x̄ over [0, T] for every path"
        return self.path.max(axis=1)


def new_state(spec, grid: Grid, noise: NoiseIncrements) -> PathState:
    "a state with the initial segment filled in"
    values = np.empty((noise.num_paths, grid.size))
    segment = np.asarray(spec.initial_segment.eval(grid.times[: grid.M + 1]), dtype=float)
    values[:, : grid.M + 1] = segment
    values[:, grid.M + 1 :] = np.nan
    return PathState(grid, values, noise.regimes, noise)


def _increment(x, y, r, dB, dN, delta, band: Tuple[float, float], spec):
    f = np.asarray(clamped_drift(x, r, band, spec))
    g = clamped_diffusion(x, band, spec)
    phi = np.asarray(spec.volatility.eval(y, r))
    h = np.asarray(jump_h(x, r, spec))
    return x + f * delta + phi * g * dB + h * dN


def tem_step(state: PathState, k: int, dB, dN, spec, policy) -> np.ndarray:
    """advance all paths of a state from t_k to t_{k+1}

    args
    ----
    state: PathState
        populated through step k
    k: int
        the step, 0 <= k < K
    dB: float or ndarray
        Brownian increment per path
    dN: int or ndarray
        Poisson increment per path
    spec: ModelSpec
        the model
    policy: TruncationPolicy
        the truncation

    returns
    -------
    values: ndarray
        X(t_{k+1}) per path, also written into the state
    """
    band = policy.band(state.grid.delta, warn=False)
    nxt = _increment(
        state.current(k),
        state.delayed(k),
        state.regimes[:, k],
        np.asarray(dB, dtype=float),
        np.asarray(dN, dtype=float),
        state.grid.delta,
        band,
        spec,
    )
    state.values[:, k + state.grid.M + 1] = nxt
    return nxt


def check_finite(state: PathState):
    """raise :class:`~.NumericalError` if a path is not finite

    the error carries the replay record of the first offending path
    """
    finite = np.isfinite(state.values)
    if finite.all():
        return state
    row = int(np.flatnonzero(~finite.all(axis=1))[0])
    column = int(np.flatnonzero(~finite[row])[0])
    replay = state.noise.replay(row) if state.noise is not None else {}
    replay.update({"step": column - state.grid.M - 1, "M": state.grid.M})
    raise NumericalError(
        f"path {replay.get('path_index', row)} is not finite after step {replay['step']}",
        replay,
    )


def simulate_tem(
    spec, policy, noise: NoiseIncrements, grid: Grid, warn: bool = True
) -> PathState:
    """run the truncated scheme for all paths of a noise batch

    args
    ----
    spec: ModelSpec
        the model
    policy: TruncationPolicy
        the truncation, its Δ* must admit the step size of the grid
    noise: NoiseIncrements
        one row per path with K increments
    grid: Grid
        the grid, its step size must match the noise
    warn: bool
        emit a :class:`~.TruncationWarning` if ψ violates the growth condition

    returns
    -------
    state: PathState
        the trajectories on [-τ, T]
    """
    if noise.num_steps != grid.K:
        raise ValueError(f"noise has {noise.num_steps} steps, the grid {grid.K}")
    policy.check_step(grid.delta)
    policy.psi(grid.delta, warn=warn)
    band = policy.band(grid.delta, warn=False)
    state = new_state(spec, grid, noise)
    values, M = state.values, grid.M
    dN = noise.poisson.astype(float)
    for k in range(grid.K):
        values[:, k + M + 1] = _increment(
            values[:, k + M],
            values[:, k],
            noise.regimes[:, k],
            noise.brownian[:, k],
            dN[:, k],
            grid.delta,
            band,
            spec,
        )
    return check_finite(state)


def simulate_tem_path(
    spec, policy, delta: float, horizon: float, stream: PathStream
) -> PathState:
    """simulate a single path on [-τ, T]

    The step size is snapped to τ/M and the horizon to a multiple of the
    snapped step, see :func:`~.make_grid`.
    """
    grid = make_grid(spec.tau, delta, horizon)
    noise = make_noise(
        grid.delta, grid.K, spec.jump_intensity, stream, spec.generator, spec.initial_regime
    )
    return simulate_tem(spec, policy, noise, grid)
