"""Monte Carlo estimators on paths of the truncated scheme"""
from dataclasses import dataclass
from logging import getLogger
from typing import Callable, Dict, Tuple

import numpy as np

from zins._montecarlo.moments import RunningMoments, merge_all
from zins._montecarlo.pool import run_batches
from zins._scheme.bem import simulate_bem
from zins._scheme.grid import Grid, make_grid
from zins._scheme.noise import make_noise_batch
from zins._scheme.tem import PathState, simulate_tem

log = getLogger(__name__)

#: quantiles of the distance distribution reported by scheme_comparison
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class EstimatorResult:
    """a Monte Carlo estimate

    args
    ----
    estimate: float
        the sample mean
    std_error: float
        sample standard deviation over the square root of num_paths
    num_paths: int
        the sample size
    """

    estimate: float
    std_error: float
    num_paths: int

    @property
    def confidence_95(self) -> Tuple[float, float]:
        "the interval estimate ± 1.96·std_error"
        half = 1.96 * self.std_error
        return self.estimate - half, self.estimate + half

    @classmethod
    def from_moments(cls, moments: RunningMoments) -> "EstimatorResult":
        return cls(float(moments.mean), float(moments.std_error), int(moments.count))

    def to_dict(self) -> dict:
        low, high = self.confidence_95
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "ci_low": low,
            "ci_high": high,
            "num_paths": self.num_paths,
        }


def prepare_grid(spec, policy, delta: float, horizon: float) -> Grid:
    "snap the grid, check it against Δ* and warn once about ψ"
    grid = make_grid(spec.tau, delta, horizon)
    policy.check_step(grid.delta)
    policy.psi(grid.delta, warn=True)
    return grid


def simulate_batch(spec, policy, grid: Grid, seed: int, paths: range) -> PathState:
    "simulate the paths with the given indices"
    noise = make_noise_batch(
        seed, paths, grid.delta, grid.K, spec.jump_intensity, spec.generator, spec.initial_regime
    )
    return simulate_tem(spec, policy, noise, grid, warn=False)


def estimate(
    spec,
    policy,
    delta: float,
    horizon: float,
    payoff: Callable[[PathState], np.ndarray],
    num_paths: int,
    seed: int = 0,
    batch_size: int = 256,
    threads: int = None,
) -> EstimatorResult:
    """the Monte Carlo mean of a payoff of the step process

    args
    ----
    spec: ModelSpec
        the model
    policy: TruncationPolicy
        the truncation
    delta: float
        step size, snapped to τ/M
    horizon: float
        T, snapped to a multiple of the step size
    payoff: callable
        maps a :class:`~.PathState` to one value per path
    num_paths: int
        the sample size
    seed: int
        the master seed
    batch_size: int
        paths simulated at once
    threads: int
        size of the pool

    returns
    -------
    result: EstimatorResult
    """
    grid = prepare_grid(spec, policy, delta, horizon)

    def work(paths: range) -> RunningMoments:
        return RunningMoments.from_samples(payoff(simulate_batch(spec, policy, grid, seed, paths)))

    return EstimatorResult.from_moments(merge_all(run_batches(work, num_paths, batch_size, threads)))


def bond_payoff(state: PathState) -> np.ndarray:
    "exp(-∫₀ᵀ x̄(t) dt)"
    return np.exp(-state.integral())


def barrier_payoff(strike: float, barrier: float) -> Callable[[PathState], np.ndarray]:
    "(x̄(T) - Λ)⁺ if the path stays below the barrier on [0, T], else 0"
    if strike < 0:
        raise ValueError(f"strike must be nonnegative, got {strike}")
    if not barrier > 0:
        raise ValueError(f"barrier must be positive, got {barrier}")

    def payoff(state: PathState) -> np.ndarray:
        alive = state.running_max() < barrier
        return np.where(alive, np.maximum(state.terminal - strike, 0.0), 0.0)

    return payoff


def bond_price(
    spec, policy, delta: float, horizon: float, num_paths: int, seed: int = 0, **kwargs
) -> EstimatorResult:
    """price of a zero coupon bond paying 1 at T

    the mean of :math:`\\exp(-\\sum_k \\bar{x}(t_k)\\Delta)` over paths, see
    :func:`estimate` for the arguments
    """
    result = estimate(spec, policy, delta, horizon, bond_payoff, num_paths, seed, **kwargs)
    log.info(f"Bond price {result.estimate:.6g} ± {result.std_error:.3g}")
    return result


def barrier_option_price(
    spec,
    policy,
    delta: float,
    horizon: float,
    strike: float,
    barrier: float,
    num_paths: int,
    seed: int = 0,
    **kwargs,
) -> EstimatorResult:
    """price of an up-and-out call on the short rate

    the mean of :math:`(\\bar{x}(T) - \\Lambda)^+ 1\\{\\max_k \\bar{x}(t_k) < B\\}`,
    the maximum over the grid being the supremum of the step process
    """
    payoff = barrier_payoff(strike, barrier)
    result = estimate(spec, policy, delta, horizon, payoff, num_paths, seed, **kwargs)
    log.info(f"Barrier option price {result.estimate:.6g} ± {result.std_error:.3g}")
    return result


def terminal_mean(
    spec, policy, delta: float, horizon: float, num_paths: int, seed: int = 0, **kwargs
) -> EstimatorResult:
    "the plain mean of x̄(T)"
    return estimate(
        spec, policy, delta, horizon, lambda s: s.terminal, num_paths, seed, **kwargs
    )


def positivity_fraction(
    spec, policy, delta: float, horizon: float, num_paths: int, seed: int = 0, **kwargs
) -> EstimatorResult:
    "the share of paths staying strictly positive on [0, T]"
    return estimate(
        spec,
        policy,
        delta,
        horizon,
        lambda s: (s.path.min(axis=1) > 0).astype(float),
        num_paths,
        seed,
        **kwargs,
    )


@dataclass(frozen=True)
class MomentProfile:
    """sample moments E|x̄(t_k)|^p on [0, T]

    args
    ----
    times: ndarray
        the grid times t_k >= 0
    moments: ndarray
        the sample moment per grid time
    std_errors: ndarray
        its standard error
    p: float
        the moment order
    num_paths: int
        the sample size
    """

    times: np.ndarray
    moments: np.ndarray
    std_errors: np.ndarray
    p: float
    num_paths: int

    @property
    def maximum(self) -> float:
        "the largest moment over time"
        return float(np.max(self.moments))

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.moments)))


def moment_profile(
    spec,
    policy,
    delta: float,
    horizon: float,
    p: float,
    num_paths: int,
    seed: int = 0,
    batch_size: int = 256,
    threads: int = None,
) -> MomentProfile:
    "the p-th sample moment of the step process at every grid time"
    grid = prepare_grid(spec, policy, delta, horizon)

    def work(paths: range) -> RunningMoments:
        state = simulate_batch(spec, policy, grid, seed, paths)
        return RunningMoments.from_samples(np.abs(state.path) ** p)

    total = merge_all(run_batches(work, num_paths, batch_size, threads))
    return MomentProfile(
        grid.times[grid.M :],
        np.asarray(total.mean),
        np.asarray(total.std_error),
        float(p),
        total.count,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """pathwise sup-norm distances between the truncated and the backward scheme

    args
    ----
    delta: float
        the effective step size
    distances: ndarray
        max over [0, T] of |TEM - BEM|, one per path in path order
    """

    delta: float
    distances: np.ndarray

    @property
    def num_paths(self) -> int:
        return int(self.distances.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.distances))

    @property
    def std_error(self) -> float:
        if self.num_paths < 2:
            return 0.0
        return float(np.std(self.distances, ddof=1) / np.sqrt(self.num_paths))

    @property
    def max(self) -> float:
        return float(np.max(self.distances))

    @property
    def quantiles(self) -> Dict[float, float]:
        values = np.quantile(self.distances, QUANTILES)
        return {q: float(v) for q, v in zip(QUANTILES, values)}

    @property
    def confidence_95(self) -> Tuple[float, float]:
        half = 1.96 * self.std_error
        return self.mean - half, self.mean + half


def scheme_comparison(
    spec,
    policy,
    delta: float,
    horizon: float,
    num_paths: int,
    seed: int = 0,
    batch_size: int = 256,
    threads: int = None,
) -> ComparisonReport:
    """drive both schemes with the same noise and compare them path by path

    raises :class:`~.NumericalError` with the replay record of the path if
    the backward scheme cannot be solved
    """
    grid = prepare_grid(spec, policy, delta, horizon)

    def work(paths: range) -> np.ndarray:
        noise = make_noise_batch(
            seed, paths, grid.delta, grid.K, spec.jump_intensity, spec.generator,
            spec.initial_regime,
        )
        tem = simulate_tem(spec, policy, noise, grid, warn=False)
        bem = simulate_bem(spec, noise, grid)
        return np.max(np.abs(tem.path - bem.path), axis=1)

    distances = np.concatenate(run_batches(work, num_paths, batch_size, threads))
    report = ComparisonReport(grid.delta, distances)
    log.info(f"Mean sup distance TEM-BEM {report.mean:.4g} at Δ = {grid.delta:.4g}")
    return report
