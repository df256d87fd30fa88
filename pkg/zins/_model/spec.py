# -*- coding: utf-8 -*-
"""
Model specification
...................

A :class:`ModelSpec` holds everything that defines the hybrid short-rate
model: per-regime coefficients, the exponents ρ and θ, the delay τ, the jump
intensity λ, the delayed volatility, the initial segment ξ on [-τ, 0], the
initial regime and the generator of the regime chain.

Specs are immutable and can be shared between concurrently simulated paths.
They are converted from and to the ``model`` section of a run configuration
with :meth:`ModelSpec.from_dict` and :meth:`ModelSpec.to_dict`.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Tuple

import numpy as np

from zins.chain import GeneratorMatrix
from zins.errors import ConfigError, GeneratorError
from zins._model.volatility import VolatilitySpec, make_volatility

_REQUIRED = object()


def _get(section: dict, key: str, path: str, default=_REQUIRED):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be a section of key-value pairs")
    if key not in section or section[key] is None:
        if default is _REQUIRED:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    return section[key]


def _number(section: dict, key: str, path: str, default=_REQUIRED) -> float:
    value = _get(section, key, path, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class RegimeParams:
    """coefficients of one regime

    args
    ----
    alpha_m1: float
        coefficient of the :math:`x^{-1}` drift term
    alpha_0: float
        constant drift
    alpha_1: float
        linear drift
    alpha_2: float
        superlinear drift, multiplies :math:`x^\\rho`
    alpha_3: float
        jump scale, :math:`h(x, i) = \\alpha_3(i) x`
    """

    alpha_m1: float
    alpha_0: float
    alpha_1: float
    alpha_2: float
    alpha_3: float = 0.0

    FIELDS = ("alpha_m1", "alpha_0", "alpha_1", "alpha_2", "alpha_3")

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.FIELDS)

    @classmethod
    def from_dict(cls, section: dict, path: str) -> "RegimeParams":
        values = {}
        for name in cls.FIELDS:
            default = 0.0 if name == "alpha_3" else _REQUIRED
            values[name] = _number(section, name, path, default)
        unknown = set(section) - set(cls.FIELDS)
        if unknown:
            raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
        return cls(**values)

    def to_dict(self) -> dict:
        return dict(zip(self.FIELDS, self.as_tuple()))


def _constant_segment(value: float = 0.02):
    def func(t):
        return np.full(np.shape(t), float(value))

    return func


def _linear_segment(value: float = 0.02, slope: float = 0.0):
    def func(t):
        return float(value) + float(slope) * np.asarray(t, dtype=float)

    return func


#: factories of initial segments by registered name
SEGMENTS: Dict[str, Callable] = {
    "constant": _constant_segment,
    "linear": _linear_segment,
}


@dataclass(frozen=True)
class InitialSegment:
    """initial data ξ on [-τ, 0]

    args
    ----
    name: str
        registered name, see :data:`~.SEGMENTS`
    params: tuple
        name-value pairs the segment was built with
    holder_constant: float
        the constant K₃ of the Hölder condition
    holder_exponent: float
        the exponent Υ in (0, 1] of the Hölder condition
    """

    name: str = "constant"
    params: Tuple[Tuple[str, float], ...] = (("value", 0.02),)
    holder_constant: float = 1.0
    holder_exponent: float = 1.0
    func: Callable = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.func is None:
            try:
                factory = SEGMENTS[self.name]
            except KeyError:
                raise ConfigError(
                    "model.initial_segment.name",
                    f"{self.name} is not registered, choose from {', '.join(SEGMENTS)}",
                ) from None
            try:
                object.__setattr__(self, "func", factory(**dict(self.params)))
            except TypeError as e:
                raise ConfigError("model.initial_segment", str(e)) from None

    def eval(self, t):
        "ξ(t) for t in [-τ, 0]"
        value = self.func(t)
        if np.ndim(value) == 0:
            return float(value)
        return value

    @classmethod
    def from_dict(cls, section: dict, path: str) -> "InitialSegment":
        section = dict(section)
        name = str(section.pop("name", "constant"))
        holder_constant = _number(section, "holder_constant", path, 1.0)
        holder_exponent = _number(section, "holder_exponent", path, 1.0)
        section.pop("holder_constant", None)
        section.pop("holder_exponent", None)
        params = []
        for key in sorted(section):
            params.append((key, _number(section, key, path)))
        return cls(name, tuple(params), holder_constant, holder_exponent)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            **dict(self.params),
            "holder_constant": self.holder_constant,
            "holder_exponent": self.holder_exponent,
        }


@dataclass(frozen=True)
class ModelSpec:
    """full parameterization of the hybrid delay model

    args
    ----
    regimes:
        one :class:`RegimeParams` per state of the chain
    rho:
        drift exponent ρ
    theta:
        diffusion exponent θ
    tau:
        delay τ of the volatility
    jump_intensity:
        intensity λ of the Poisson process
    volatility:
        the delayed volatility φ
    initial_segment:
        the initial data ξ
    initial_regime:
        r(0), numbered from 1
    include_inverse_drift:
        whether the drift contains the :math:`\\alpha_{-1}x^{-1}` term
    generator:
        the generator of the regime chain, N×N
    """

    regimes: Tuple[RegimeParams, ...]
    rho: float
    theta: float
    tau: float = 1.0
    jump_intensity: float = 1.0
    volatility: VolatilitySpec = field(default_factory=make_volatility)
    initial_segment: InitialSegment = field(default_factory=InitialSegment)
    initial_regime: int = 1
    include_inverse_drift: bool = True
    generator: GeneratorMatrix = None
    alphas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        regimes = tuple(self.regimes)
        if len(regimes) == 0:
            raise ConfigError("model.regimes", "at least one regime is required")
        object.__setattr__(self, "regimes", regimes)
        n = len(regimes)
        if not 1 <= self.initial_regime <= n:
            raise ConfigError(
                "model.initial_regime", f"must be in 1..{n}, got {self.initial_regime}"
            )
        generator = self.generator
        if generator is None:
            generator = GeneratorMatrix(np.zeros((n, n)))
        elif not isinstance(generator, GeneratorMatrix):
            generator = GeneratorMatrix(generator)
        if generator.size != n:
            raise ConfigError(
                "model.generator", f"expected {n}x{n} for {n} regimes, got {generator.size}"
            )
        object.__setattr__(self, "generator", generator)
        if not self.tau > 0:
            raise ConfigError("model.tau", f"delay must be positive, got {self.tau}")
        if self.jump_intensity < 0:
            raise ConfigError("model.lambda", "jump intensity must be nonnegative")
        alphas = np.array([r.as_tuple() for r in regimes], dtype=float)
        alphas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)

    @property
    def num_regimes(self) -> int:
        return len(self.regimes)

    def replace(self, **changes) -> "ModelSpec":
        "a copy with some fields changed, e.g. ``spec.replace(tau=2.0)``"
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, section: dict, path: str = "model") -> "ModelSpec":
        """create a spec from the ``model`` section of a configuration

        raises :class:`~.ConfigError` naming the dotted path of the first
        missing or malformed field
        """
        known = {
            "regimes", "rho", "theta", "tau", "lambda", "volatility",
            "initial_segment", "initial_regime", "include_inverse_drift",
            "generator",
        }
        raw_regimes = _get(section, "regimes", path)
        if not isinstance(raw_regimes, (list, tuple)) or len(raw_regimes) == 0:
            raise ConfigError(f"{path}.regimes", "expected a nonempty list of regimes")
        regimes = tuple(
            RegimeParams.from_dict(r, f"{path}.regimes[{k}]")
            for k, r in enumerate(raw_regimes)
        )
        rho = _number(section, "rho", path)
        theta = _number(section, "theta", path)
        raw_generator = _get(section, "generator", path)
        try:
            generator = GeneratorMatrix(np.asarray(raw_generator, dtype=float))
        except (ValueError, TypeError, GeneratorError) as e:
            raise ConfigError(f"{path}.generator", str(e)) from None
        unknown = set(section) - known
        if unknown:
            raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
        volatility = dict(_get(section, "volatility", path, {"name": "sigmoid_s5"}))
        segment = _get(section, "initial_segment", path, {"name": "constant"})
        include = _get(section, "include_inverse_drift", path, True)
        if not isinstance(include, bool):
            raise ConfigError(f"{path}.include_inverse_drift", "expected true or false")
        initial_regime = _get(section, "initial_regime", path, 1)
        if isinstance(initial_regime, bool) or not isinstance(initial_regime, int):
            raise ConfigError(f"{path}.initial_regime", "expected an integer state")
        return cls(
            regimes=regimes,
            rho=rho,
            theta=theta,
            tau=_number(section, "tau", path, 1.0),
            jump_intensity=_number(section, "lambda", path, 1.0),
            volatility=make_volatility(**volatility),
            initial_segment=InitialSegment.from_dict(segment, f"{path}.initial_segment"),
            initial_regime=initial_regime,
            include_inverse_drift=include,
            generator=generator,
        )

    def to_dict(self) -> dict:
        "the ``model`` section with all defaults materialized"
        return {
            "regimes": [r.to_dict() for r in self.regimes],
            "rho": self.rho,
            "theta": self.theta,
            "tau": self.tau,
            "lambda": self.jump_intensity,
            "volatility": self.volatility.to_dict(),
            "initial_segment": self.initial_segment.to_dict(),
            "initial_regime": self.initial_regime,
            "include_inverse_drift": self.include_inverse_drift,
            "generator": self.generator.to_list(),
        }
