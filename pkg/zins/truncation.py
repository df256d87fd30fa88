"""Truncating superlinear coefficients

The truncated scheme evaluates drift and diffusion at states clamped into a
band :math:`[1/\\mu^{-1}(\\psi(\\Delta)), \\mu^{-1}(\\psi(\\Delta))]` which widens as
the step size shrinks. Here :math:`\\mu` is a strictly increasing function
dominating the coefficients on :math:`[1/r, r]` and
:math:`\\psi(\\Delta) = \\Delta^{-q}` grows without bound as :math:`\\Delta \\to 0`.

Within the band the truncated coefficients agree with the raw ones, and
everywhere :math:`|f_\\Delta(x,i)| \\vee g_\\Delta(x) \\leq \\psi(\\Delta)`.
"""
import warnings
from dataclasses import dataclass, replace
from logging import getLogger
from typing import Dict, Sequence, Tuple

import numpy as np

from zins._model.coefficients import diffusion_g, drift_f
from zins.errors import DomainError, TruncationError, TruncationWarning

log = getLogger(__name__)

#: lower end of the Δ* search
DELTA_STAR_FLOOR = 1e-12
#: resolution of the Δ* bisection
DELTA_STAR_RESOLUTION = 1e-6
#: margin applied to a fitted μ constant
FIT_MARGIN = 1.05


@dataclass(frozen=True)
class TruncationPolicy:
    """the truncation machinery μ, μ⁻¹, ψ and Δ*

    μ is a power law :math:`\\mu(u) = C u^e` so that its inverse is known
    in closed form.

    args
    ----
    mu_constant: float
        the constant C
    mu_exponent: float
        the exponent e
    psi_exponent: float
        the exponent q of :math:`\\psi(\\Delta) = \\Delta^{-q}`
    delta_star: float
        the largest admissible step size, see :func:`delta_star_search`
    mu_name: str
        how μ was chosen, ``quadratic`` or ``fitted``
    """

    mu_constant: float = 3.0
    mu_exponent: float = 2.0
    psi_exponent: float = 0.25
    delta_star: float = None
    mu_name: str = "quadratic"

    def __post_init__(self):
        if not (self.mu_constant > 0 and self.mu_exponent > 0):
            raise TruncationError("μ must be a positive increasing power law")
        if not self.psi_exponent > 0:
            raise TruncationError(f"ψ exponent must be positive, got {self.psi_exponent}")

    def mu(self, u):
        "μ(u) = C·u^e"
        return self.mu_constant * np.asarray(u, dtype=float) ** self.mu_exponent

    def mu_inverse(self, u):
        "μ⁻¹(u) = (u/C)^(1/e)"
        return (np.asarray(u, dtype=float) / self.mu_constant) ** (1.0 / self.mu_exponent)

    def psi(self, delta: float, warn: bool = True) -> float:
        "shorthand for :func:`psi`"
        return psi(delta, self, warn)

    def band(self, delta: float, warn: bool = True) -> Tuple[float, float]:
        """the clamping band for a step size

        returns
        -------
        lower: float
            :math:`1/\\mu^{-1}(\\psi(\\Delta))`
        upper: float
            :math:`\\mu^{-1}(\\psi(\\Delta))`
        """
        upper = float(self.mu_inverse(psi(delta, self, warn)))
        return 1.0 / upper, upper

    def check_step(self, delta: float) -> float:
        "raise :class:`~.TruncationError` if delta exceeds Δ*"
        if self.delta_star is not None and delta > self.delta_star:
            raise TruncationError(
                f"step size {delta:g} exceeds the admissible Δ* = {self.delta_star:g}"
            )
        return delta

    def to_dict(self) -> dict:
        return {
            "psi_exponent": self.psi_exponent,
            "mu": self.mu_name,
            "mu_constant": self.mu_constant,
            "mu_exponent": self.mu_exponent,
            "delta_star": self.delta_star,
        }


def psi(delta: float, policy: TruncationPolicy, warn: bool = True) -> float:
    """ψ(Δ) = Δ^(-q)

    args
    ----
    delta: float
        the step size, must be positive
    policy: TruncationPolicy
        provides the exponent q
    warn: bool
        emit a :class:`~.TruncationWarning` if :math:`\\Delta^{1/4}\\psi(\\Delta) > 1`

    returns
    -------
    psi: float
    """
    if not delta > 0:
        raise DomainError(f"ψ is only defined for positive step sizes, got {delta}")
    value = float(delta) ** -policy.psi_exponent
    if warn and float(delta) ** 0.25 * value > 1 + 1e-12:
        warnings.warn(
            f"Δ^(1/4)·ψ(Δ) = {float(delta) ** 0.25 * value:.4g} > 1 for Δ = {delta:g} "
            f"and ψ exponent {policy.psi_exponent:g}",
            TruncationWarning,
            stacklevel=2,
        )
    return value


def clamped_drift(x, i, band: Tuple[float, float], spec):
    "f at x clamped into a band (lower, upper)"
    lower, upper = band
    return drift_f(np.minimum(np.maximum(x, lower), upper), i, spec)


def clamped_diffusion(x, band: Tuple[float, float], spec) -> np.ndarray:
    "g at min(x, upper) for nonnegative x, 0 otherwise"
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, np.asarray(diffusion_g(np.minimum(np.abs(x), band[1]), spec)), 0.0)


def truncated_drift(x, i, delta: float, spec, policy: TruncationPolicy, warn: bool = True):
    """f evaluated at x clamped into the band of delta

    requires delta <= Δ*, otherwise the band is empty
    """
    return clamped_drift(x, i, policy.band(delta, warn), spec)


def truncated_diffusion(x, delta: float, spec, policy: TruncationPolicy, warn: bool = True):
    """g evaluated at min(x, upper band), and 0 for negative x"""
    value = clamped_diffusion(x, policy.band(delta, warn), spec)
    return float(value) if np.ndim(value) == 0 else value


def _envelope(spec, R: float, grid_size: int):
    """sup of |f(x,i)| ∨ g(x) over 1/r <= x <= r for r on a log grid

    the grid is symmetric around 1 in log scale, so the window [1/r, r]
    grows by one point on each side from one r to the next
    """
    half = np.geomspace(1.0, R, grid_size)
    x = np.concatenate([1.0 / half[:0:-1], half])
    level = np.asarray(diffusion_g(x, spec))
    for i in range(1, spec.num_regimes + 1):
        level = np.maximum(level, np.abs(np.asarray(drift_f(x, i, spec))))
    n = grid_size - 1
    pairs = np.maximum(level[n::-1], level[n:])
    return half, np.maximum.accumulate(pairs)


def _verify_mu(spec, C: float, e: float, R: float, grid_size: int) -> bool:
    r, sup = _envelope(spec, R, grid_size)
    return bool(np.all(sup <= C * r ** e * (1 + 1e-12)))


def default_mu_for(
    spec,
    mu: str = "auto",
    psi_exponent: float = 0.25,
    R: float = 1e3,
    grid_size: int = 4000,
) -> TruncationPolicy:
    """construct μ for a model

    args
    ----
    spec: ModelSpec
        the model
    mu: str
        ``quadratic`` for :math:`\\mu(u)=3u^2`, ``fitted`` for
        :math:`\\mu(u)=C u^{\\max(\\rho,\\theta,1)+1}` with C fitted on a grid,
        or ``auto`` to use the quadratic μ if it dominates the coefficients and
        the fitted one otherwise
    psi_exponent: float
        the exponent q of ψ
    R: float
        μ is fitted and verified for r in [1, R]
    grid_size: int
        number of grid points in [1, R] for fitting, verification uses five
        times as many

    returns
    -------
    policy: TruncationPolicy
        without Δ*, see :func:`make_policy`

    raises
    ------
    TruncationError
        if μ does not dominate the coefficients on the verification grid
    """
    name = mu.lower()
    if name not in ("auto", "quadratic", "fitted"):
        raise TruncationError(f"unknown μ {mu}, choose from auto, quadratic, fitted")
    verify = 5 * grid_size
    if name in ("auto", "quadratic"):
        if _verify_mu(spec, 3.0, 2.0, R, verify):
            return TruncationPolicy(3.0, 2.0, psi_exponent, None, "quadratic")
        if name == "quadratic":
            raise TruncationError("μ(u) = 3u² does not dominate the coefficients")
        log.info("μ(u) = 3u² does not dominate the coefficients, fitting μ instead")
    exponent = max(spec.rho, spec.theta, 1.0) + 1.0
    r, sup = _envelope(spec, R, grid_size)
    C = FIT_MARGIN * float(np.max(sup / r ** exponent))
    if not (np.isfinite(C) and C > 0) or not _verify_mu(spec, C, exponent, R, verify):
        raise TruncationError(f"fitted μ(u) = {C:.4g}·u^{exponent:g} fails verification")
    log.debug(f"Fitted μ(u) = {C:.6g}·u^{exponent:g}")
    return TruncationPolicy(C, exponent, psi_exponent, None, "fitted")


def _admissible(delta: float, spec, policy: TruncationPolicy) -> bool:
    if not float(policy.mu_inverse(psi(delta, policy, warn=False))) > 1:
        return False
    if spec.include_inverse_drift:
        x = np.geomspace(delta * 1e-9, delta, 1000)
        for i in range(1, spec.num_regimes + 1):
            if np.any(np.asarray(drift_f(x, i, spec)) <= 0):
                return False
    return True


def delta_star_search(spec, policy: TruncationPolicy) -> float:
    """the largest admissible step size Δ* in (0, 1)

    Δ is admissible if :math:`\\mu^{-1}(\\psi(\\Delta)) > 1` and, with the
    inverse drift enabled, :math:`f(x,i) > 0` for :math:`0 < x < \\Delta` in all
    regimes. Both conditions only get harder to meet as Δ grows, so the
    boundary is found by bisection.

    raises
    ------
    TruncationError
        if no admissible Δ exists above 1e-12
    """
    lo, hi = DELTA_STAR_FLOOR, 1.0
    if not _admissible(lo, spec, policy):
        raise TruncationError(f"no admissible step size above {DELTA_STAR_FLOOR:g}")
    while hi - lo > DELTA_STAR_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if _admissible(mid, spec, policy):
            lo = mid
        else:
            hi = mid
    return lo


def make_policy(
    spec,
    psi_exponent: float = 0.25,
    mu: str = "auto",
    delta_star: float = None,
) -> TruncationPolicy:
    """construct a complete policy with μ and Δ*

    args
    ----
    spec: ModelSpec
        the model
    psi_exponent: float
        the exponent q of ψ
    mu: str
        passed to :func:`default_mu_for`
    delta_star: float
        overrides the searched Δ*, must still satisfy :math:`\\mu^{-1}(\\psi(\\Delta^*)) > 1`

    returns
    -------
    policy: TruncationPolicy
    """
    policy = default_mu_for(spec, mu, psi_exponent)
    if delta_star is None:
        delta_star = delta_star_search(spec, policy)
    elif not (0 < delta_star < 1 and float(policy.mu_inverse(psi(delta_star, policy, False))) > 1):
        raise TruncationError(f"Δ* = {delta_star:g} is not admissible for this μ and ψ")
    policy = replace(policy, delta_star=float(delta_star))
    log.info(
        f"Truncation μ(u) = {policy.mu_constant:.4g}·u^{policy.mu_exponent:g}, "
        f"ψ(Δ) = Δ^-{psi_exponent:g}, Δ* = {policy.delta_star:.6g}"
    )
    return policy


def _default_deltas(policy: TruncationPolicy) -> list:
    deltas = [10.0 ** -k for k in range(1, 6)]
    if policy.delta_star is not None:
        deltas = [d for d in deltas if d <= policy.delta_star]
    return deltas


def khasminskii_truncated(
    spec,
    policy: TruncationPolicy,
    p: float = 2.0,
    deltas: Sequence[float] = None,
    x: np.ndarray = None,
) -> Dict[float, float]:
    """grid constants of the growth condition of the truncated coefficients

    For every Δ computes the smallest K₅ with
    :math:`x f_\\Delta(x,i) + \\frac{p-1}{2}(\\sigma g_\\Delta(x))^2 \\leq K_5(1+x^2)`
    on the grid. Bounded constants across Δ indicate that the condition holds
    independently of the step size.

    returns
    -------
    constants: dict
        step size to K₅
    """
    deltas = _default_deltas(policy) if deltas is None else list(deltas)
    if x is None:
        x = np.concatenate([np.linspace(-10.0, 0.0, 200), np.geomspace(1e-3, 1e3, 2000)])
    sigma = spec.volatility.bound_sigma
    constants = {}
    for delta in deltas:
        gx = np.asarray(truncated_diffusion(x, delta, spec, policy, warn=False))
        worst = -np.inf
        for i in range(1, spec.num_regimes + 1):
            fx = np.asarray(truncated_drift(x, i, delta, spec, policy, warn=False))
            value = x * fx + 0.5 * (p - 1) * (sigma * gx) ** 2
            worst = max(worst, float(np.max(value / (1 + x * x))))
        constants[float(delta)] = worst
    return constants


@dataclass(frozen=True)
class AuditRow:
    "the band and growth checks of a policy for one step size"
    delta: float
    lower: float
    upper: float
    psi: float
    growth: float
    sampled_max: float

    @property
    def growth_ok(self) -> bool:
        "whether Δ^(1/4)·ψ(Δ) <= 1"
        return self.growth <= 1 + 1e-12

    @property
    def bound_ok(self) -> bool:
        "whether the sampled |f_Δ| ∨ g_Δ stayed below ψ(Δ)"
        return self.sampled_max <= self.psi * (1 + 1e-12)

    def __str__(self):
        return (
            f"Δ = {self.delta:<10.4g} band [{self.lower:.6g}, {self.upper:.6g}] "
            f"ψ = {self.psi:<10.6g} Δ^(1/4)ψ = {self.growth:<8.4g} "
            f"{'ok' if self.growth_ok else 'WARN'} "
            f"max|f_Δ|∨g_Δ = {self.sampled_max:.6g} {'ok' if self.bound_ok else 'FAIL'}"
        )


@dataclass(frozen=True)
class PolicyAudit:
    "the audit of a policy over several step sizes"
    delta_star: float
    rows: Tuple[AuditRow, ...]

    @property
    def passed(self) -> bool:
        "the bound must hold for all rows, the growth condition only warns"
        return all(row.bound_ok for row in self.rows)

    @property
    def warnings(self) -> list:
        return [row for row in self.rows if not row.growth_ok]

    def __str__(self):
        lines = [f"Δ* = {self.delta_star:.6g}"]
        lines.extend(str(row) for row in self.rows)
        return "\n".join(lines)


def audit(
    spec,
    policy: TruncationPolicy,
    deltas: Sequence[float] = None,
    samples: int = 100_000,
    seed: int = 0,
) -> PolicyAudit:
    """audit a policy over several step sizes

    For every Δ reports the band, ψ(Δ), the growth condition
    :math:`\\Delta^{1/4}\\psi(\\Delta) \\leq 1` and the largest value of
    :math:`|f_\\Delta| \\vee g_\\Delta` on random states around the band.
    """
    deltas = _default_deltas(policy) if deltas is None else list(deltas)
    rng = np.random.default_rng(seed)
    rows = []
    for delta in deltas:
        policy.check_step(delta)
        lower, upper = policy.band(delta, warn=False)
        value = psi(delta, policy, warn=False)
        x = np.concatenate([rng.uniform(-2 * upper, 2 * upper, samples), [lower, upper]])
        regime = rng.integers(1, spec.num_regimes + 1, x.size)
        sampled = np.maximum(
            np.abs(np.asarray(truncated_drift(x, regime, delta, spec, policy, False))),
            np.asarray(truncated_diffusion(x, delta, spec, policy, False)),
        )
        rows.append(
            AuditRow(float(delta), lower, upper, value, delta ** 0.25 * value, float(sampled.max()))
        )
    return PolicyAudit(policy.delta_star, tuple(rows))
