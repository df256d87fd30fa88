"""Estimating prices and errors

All estimators draw paths in batches from per-path streams keyed by a
master seed, fan the batches out over a thread pool and reduce them in
batch order. Estimates are thereby pure functions of the inputs and the
seed, independent of the number of threads and of the batch size, up to
the rounding of the merge.

.. currentmodule:: zins._montecarlo.estimators
.. autosummary::
   :template: module.rst

    EstimatorResult
    bond_price
    barrier_option_price
    terminal_mean
    positivity_fraction
    moment_profile
    scheme_comparison

.. currentmodule:: zins._montecarlo.convergence
.. autosummary::
   :template: module.rst

    ConvergenceReport
    strong_error

"""
from zins._montecarlo.moments import RunningMoments, merge_all
from zins._montecarlo.pool import batches, run_batches
from zins._montecarlo.estimators import (
    EstimatorResult,
    MomentProfile,
    ComparisonReport,
    estimate,
    bond_price,
    barrier_option_price,
    terminal_mean,
    positivity_fraction,
    moment_profile,
    scheme_comparison,
)
from zins._montecarlo.convergence import ConvergenceReport, strong_error, fit_order
