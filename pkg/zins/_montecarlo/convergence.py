"""Empirical strong convergence

The exact solution is not available, so the truncated scheme on a fine
reference grid serves as its proxy. Every coarse path is driven by the
block sums of the reference increments and the subsampled reference
regimes, so coarse and reference paths share their randomness.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Sequence, Tuple

import numpy as np

from zins._montecarlo.moments import RunningMoments, merge_all
from zins._montecarlo.pool import run_batches
from zins._montecarlo.estimators import prepare_grid
from zins._scheme.grid import Grid
from zins._scheme.noise import coarsen_noise, make_noise_batch
from zins._scheme.tem import simulate_tem
from zins.errors import DivisibilityError

log = getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceReport:
    """strong errors for a family of step sizes

    args
    ----
    step_sizes: tuple
        the effective step sizes, strictly decreasing
    errors: tuple
        :math:`(\\mathbb{E}\\sup_{0 \\leq t \\leq T}|x_\\Delta(t) - x_{ref}(t)|^p)^{1/p}`
        per step size
    std_errors: tuple
        standard errors of the errors, by the delta method
    fitted_order: float
        least squares slope of log₂ error against log₂ Δ, NaN if fewer than
        two errors are positive
    reference_delta: float
        the effective step size of the reference
    p: float
        the moment order
    num_paths: int
        the sample size
    """

    step_sizes: Tuple[float, ...]
    errors: Tuple[float, ...]
    std_errors: Tuple[float, ...]
    fitted_order: float
    reference_delta: float
    p: float
    num_paths: int

    def rows(self):
        "(Δ, error, std_error) per step size"
        return list(zip(self.step_sizes, self.errors, self.std_errors))


def fit_order(step_sizes: Sequence[float], errors: Sequence[float]) -> float:
    "slope of log₂ error against log₂ Δ by unweighted least squares"
    d = np.asarray(step_sizes, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > 0
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log2(d[keep]), np.log2(e[keep]), 1)
    return float(slope)


def coupled_grids(reference: Grid, deltas: Sequence[float]) -> Tuple[Tuple[int, Grid], ...]:
    """the coarse grids of a family, each with its factor over the reference

    raises
    ------
    DivisibilityError
        naming the first step size which is not a whole multiple of the
        reference step, or does not divide the delay and horizon
    """
    grids = []
    for delta in deltas:
        ratio = delta / reference.delta
        factor = int(round(ratio))
        if factor < 1 or abs(ratio - factor) > 1e-6 * ratio:
            raise DivisibilityError(
                f"Δ = {delta:g} is not a multiple of the reference step {reference.delta:g}"
            )
        try:
            grids.append((factor, reference.coarsen(factor)))
        except DivisibilityError:
            raise DivisibilityError(
                f"Δ = {delta:g} does not divide the delay {reference.tau:g} and the "
                f"horizon {reference.horizon:g} into whole steps"
            ) from None
    grids.sort(key=lambda item: -item[0])
    factors = [f for f, _ in grids]
    if len(set(factors)) != len(factors):
        raise ValueError("step sizes must be distinct")
    return tuple(grids)


def strong_error(
    spec,
    policy,
    deltas: Sequence[float],
    reference_delta: float,
    horizon: float,
    p: float = 2.0,
    num_paths: int = 1000,
    seed: int = 0,
    batch_size: int = 256,
    threads: int = None,
) -> ConvergenceReport:
    """estimate strong errors against a fine reference

    args
    ----
    spec: ModelSpec
        the model
    policy: TruncationPolicy
        the truncation, its Δ* must admit all step sizes
    deltas: sequence
        the coarse step sizes, whole multiples of the reference step
    reference_delta: float
        step size of the reference, snapped to τ/M
    horizon: float
        T
    p: float
        the moment order
    num_paths: int
        the sample size
    seed: int
        the master seed

    returns
    -------
    report: ConvergenceReport
    """
    if p < 1:
        raise ValueError(f"p must be at least 1, got {p}")
    reference = prepare_grid(spec, policy, reference_delta, horizon)
    grids = coupled_grids(reference, deltas)
    for _, grid in grids:
        policy.check_step(grid.delta)

    def work(paths: range):
        noise = make_noise_batch(
            seed, paths, reference.delta, reference.K, spec.jump_intensity,
            spec.generator, spec.initial_regime,
        )
        fine = simulate_tem(spec, policy, noise, reference, warn=False)
        moments = []
        for factor, grid in grids:
            coarse = simulate_tem(spec, policy, coarsen_noise(noise, factor), grid, warn=False)
            sup = np.max(np.abs(coarse.path - fine.path[:, ::factor]), axis=1)
            moments.append(RunningMoments.from_samples(sup ** p))
        return moments

    results = run_batches(work, num_paths, batch_size, threads)
    errors, std_errors = [], []
    for j in range(len(grids)):
        total = merge_all(batch[j] for batch in results)
        mean = float(total.mean)
        errors.append(mean ** (1.0 / p))
        # delta method for the p-th root of the mean
        if mean > 0:
            std_errors.append(float(total.std_error) * mean ** (1.0 / p - 1.0) / p)
        else:
            std_errors.append(0.0)
    step_sizes = tuple(grid.delta for _, grid in grids)
    order = fit_order(step_sizes, errors)
    log.info(f"Fitted strong order {order:.3f} from {len(step_sizes)} step sizes")
    return ConvergenceReport(
        step_sizes, tuple(errors), tuple(std_errors), order, reference.delta, float(p),
        num_paths,
    )
