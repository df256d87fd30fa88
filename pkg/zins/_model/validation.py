# -*- coding: utf-8 -*-
"""
Checking the standing assumptions
.................................

The analytic assumptions of the model cannot all be verified symbolically.
:func:`validate_assumptions` checks them on dense grids and returns a
report instead of raising, so a caller can decide how to proceed.
"""
from dataclasses import dataclass, field
from logging import getLogger
from typing import List, Tuple

import numpy as np

from zins._model.coefficients import diffusion_g, drift_f

log = getLogger(__name__)


@dataclass(frozen=True)
class Check:
    "outcome of a single check"
    name: str
    passed: bool
    detail: str = ""

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    "a list of checks, passing if all of them passed"
    checks: Tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self):
        return "\n".join(str(c) for c in self.checks)


def volatility_lipschitz(spec, R: float = 10.0, grid_size: int = 10_000) -> float:
    """estimate the Lipschitz constant of φ(·, i) on [1/R, R]

    The estimate is the largest difference quotient between neighbouring
    points of a uniform grid, over all regimes.
    """
    y = np.linspace(1.0 / R, R, grid_size)
    slope = 0.0
    for i in range(1, spec.num_regimes + 1):
        level = np.asarray(spec.volatility.eval(y, np.full(y.shape, i)))
        slope = max(slope, float(np.max(np.abs(np.diff(level)) / np.diff(y))))
    return slope


def _check_coefficients(spec) -> Check:
    alphas = spec.alphas
    positive = alphas[:, :4] > 0
    if not spec.include_inverse_drift:
        positive[:, 0] = True
    bad = [
        f"regimes[{k}].{name}"
        for k, row in enumerate(positive)
        for name, ok in zip(("alpha_m1", "alpha_0", "alpha_1", "alpha_2"), row)
        if not ok
    ]
    bad += [f"regimes[{k}].alpha_3" for k in np.flatnonzero(alphas[:, 4] < 0)]
    if bad:
        return Check("coefficients_positive", False, "not positive: " + ", ".join(bad))
    return Check("coefficients_positive", True, "α₋₁, α₀, α₁, α₂ > 0 and α₃ >= 0")


def _check_exponents(spec) -> Check:
    ok = spec.rho > 1 and spec.theta > 1 and 1 + spec.rho > 2 * spec.theta
    detail = (
        f"1 + ρ = {1 + spec.rho:g} {'>' if 1 + spec.rho > 2 * spec.theta else '<='} "
        f"2θ = {2 * spec.theta:g}, ρ = {spec.rho:g}, θ = {spec.theta:g}"
    )
    return Check("exponent_balance", ok, detail)


def _check_volatility(spec, grid_size: int) -> Check:
    y = np.concatenate([np.linspace(-10.0, 10.0, grid_size), np.geomspace(10.0, 1e4, 64)])
    largest, smallest = -np.inf, np.inf
    for i in range(1, spec.num_regimes + 1):
        level = np.asarray(spec.volatility.eval(y, np.full(y.shape, i)))
        largest = max(largest, float(np.max(level)))
        smallest = min(smallest, float(np.min(level)))
    sigma = spec.volatility.bound_sigma
    ok = bool(np.isfinite(largest)) and smallest >= 0 and largest <= sigma
    detail = f"sampled range [{smallest:.6g}, {largest:.6g}] against σ = {sigma:.6g}"
    return Check("volatility_bounded", ok, detail)


def _check_segment(spec, grid_size: int) -> List[Check]:
    segment = spec.initial_segment
    t = np.linspace(-spec.tau, 0.0, grid_size)
    xi = np.asarray(segment.eval(t), dtype=float)
    positive = Check(
        "initial_segment_positive",
        bool(np.all(xi > 0)),
        f"min ξ = {float(np.min(xi)):.6g} on [-τ, 0]",
    )
    K, upsilon = segment.holder_constant, segment.holder_exponent
    # neighbours and distances to both end points
    pairs = [(xi[1:], xi[:-1], np.diff(t))]
    pairs.append((xi, np.full(xi.shape, xi[-1]), np.abs(t - t[-1])))
    pairs.append((xi, np.full(xi.shape, xi[0]), np.abs(t - t[0])))
    worst = 0.0
    for a, b, dt in pairs:
        mask = dt > 0
        ratio = np.abs(a[mask] - b[mask]) / dt[mask] ** upsilon
        if ratio.size:
            worst = max(worst, float(np.max(ratio)))
    holder = Check(
        "initial_segment_holder",
        0 < upsilon <= 1 and K > 0 and worst <= K,
        f"largest sampled quotient {worst:.6g} against K₃ = {K:g}, Υ = {upsilon:g}",
    )
    return [positive, holder]


def validate_assumptions(spec, grid_size: int = 10_000) -> ValidationReport:
    """check the standing assumptions of a model on dense grids

    args
    ----
    spec: ModelSpec
        the model to check
    grid_size: int
        number of grid points used for sampled checks

    returns
    -------
    report: ValidationReport
        one :class:`Check` per assumption. This function never raises on a
        failed assumption.
    """
    checks = [_check_coefficients(spec), _check_exponents(spec)]
    checks.append(_check_volatility(spec, grid_size))
    lipschitz = volatility_lipschitz(spec, grid_size=grid_size)
    checks.append(
        Check(
            "volatility_lipschitz",
            bool(np.isfinite(lipschitz)),
            f"sampled Lipschitz constant on [0.1, 10] is {lipschitz:.6g}",
        )
    )
    checks.extend(_check_segment(spec, grid_size))
    problems = spec.generator.violations()
    checks.append(
        Check("generator_valid", not problems, "; ".join(problems) or "rates and row sums ok")
    )
    report = ValidationReport(tuple(checks))
    for failure in report.failures:
        log.warning(str(failure))
    return report


def khasminskii_check(
    spec,
    p: float = 2.0,
    x: np.ndarray = None,
    y: np.ndarray = None,
) -> Tuple[bool, float]:
    """check the one-sided growth condition of the coefficients on a grid

    Evaluates :math:`[x f(x,i) + \\frac{p-1}{2}|\\varphi(y,i) g(x)|^2]/(1+x^2)`,
    maximised over y and the regimes for every x of the grid.

    args
    ----
    spec: ModelSpec
        the model
    p: float
        moment order, at least 2
    x: ndarray
        positive states, defaults to 2000 points in [0.01, 100]
    y: ndarray
        delayed states, defaults to 401 points in [-10, 10]

    returns
    -------
    holds: bool
        True if the ratio has a finite maximum and is not increasing at the
        upper end of the grid
    K4: float
        the largest ratio on the grid
    """
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p}")
    x = np.geomspace(0.01, 100.0, 2000) if x is None else np.asarray(x, dtype=float)
    y = np.linspace(-10.0, 10.0, 401) if y is None else np.asarray(y, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"x must be a grid of at least two states, got shape {x.shape}")
    ratio = np.full(x.shape, -np.inf)
    gx = np.asarray(diffusion_g(x, spec))
    for i in range(1, spec.num_regimes + 1):
        level = np.max(np.asarray(spec.volatility.eval(y, np.full(y.shape, i))))
        value = x * np.asarray(drift_f(x, i, spec)) + 0.5 * (p - 1) * (level * gx) ** 2
        ratio = np.maximum(ratio, value / (1 + x * x))
    K4 = float(np.max(ratio))
    holds = bool(np.isfinite(K4)) and ratio[-1] <= ratio[-2]
    return holds, K4
