# -*- coding: utf-8 -*-
"""
Delayed volatility functions
............................

A volatility function :math:`\\varphi(y, i)` scales the diffusion by a level
depending on the delayed state y and the regime i. It is bounded by
``bound_sigma`` and extended to negative y by :math:`\\varphi(y,i)=\\varphi(0,i)`.

Volatilities are registered by name, so they can be selected from a
configuration file: ``sigmoid``, ``constant`` and ``zero``.
"""
from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Dict, Tuple

import numpy as np

from zins.errors import ConfigError


def _scalar_or_array(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


#: regime scale of the sigmoid, 1/2 in regime 1 and 1/4 in regime 2
SIGMOID_SCALES = (0.5, 0.25)


def sigmoid_volatility(y, i):
    """sigmoid-type volatility of the two-regime example

    For y >= 0 this is :math:`c_i (1 + (e^y - e^{-y})) / (e^y + e^{-y})`
    with :math:`c_1 = 1/2, c_2 = 1/4`, and :math:`c_i/2` otherwise. The
    ratio is evaluated as :math:`c_i(e^{-y}/(1+e^{-2y}) + \\tanh y)`, which
    cannot overflow.

    args
    ----
    y: float or ndarray
        delayed state
    i: int or ndarray of int
        regime, 1 or 2

    returns
    -------
    level: float or ndarray
        the volatility level
    """
    y = np.asarray(y, dtype=float)
    scale = np.asarray(SIGMOID_SCALES)[np.asarray(i, dtype=int) - 1]
    pos = np.maximum(y, 0.0)
    decay = np.exp(-pos)
    ratio = decay / (1.0 + decay * decay) + np.tanh(pos)
    level = np.where(y >= 0, scale * ratio, 0.5 * scale)
    return _scalar_or_array(level)


#: supremum of the sigmoid, attained at y = asinh(2)
SIGMOID_BOUND = sqrt(5) / 4


@dataclass(frozen=True)
class VolatilitySpec:
    """a bounded delayed volatility function

    args
    ----
    name: str
        registered name, see :data:`~.REGISTRY`
    bound_sigma: float
        the uniform bound σ
    params: tuple
        name-value pairs the function was built with
    func: callable
        vectorized (y, i) -> level for y >= 0
    """

    name: str
    bound_sigma: float
    params: Tuple[Tuple[str, object], ...] = ()
    func: Callable = field(default=None, compare=False, repr=False)

    def eval(self, y, i):
        """evaluate φ(y, i), using φ(0, i) for negative y"""
        y = np.maximum(np.asarray(y, dtype=float), 0.0)
        return _scalar_or_array(self.func(y, i))

    def to_dict(self) -> dict:
        return {"name": self.name, "bound_sigma": self.bound_sigma, **dict(self.params)}


def _sigmoid(bound_sigma: float = SIGMOID_BOUND) -> VolatilitySpec:
    return VolatilitySpec("sigmoid_s5", float(bound_sigma), (), sigmoid_volatility)


def _constant(level=0.1, bound_sigma: float = None) -> VolatilitySpec:
    levels = np.atleast_1d(np.asarray(level, dtype=float))
    if np.any(levels < 0):
        raise ConfigError("model.volatility.level", "must be nonnegative")

    def func(y, i):
        if levels.size == 1:
            return np.broadcast_to(levels[0], np.broadcast(y, i).shape) * 1.0
        return levels[np.asarray(i, dtype=int) - 1] + 0.0 * y

    bound = float(levels.max()) if bound_sigma is None else float(bound_sigma)
    stored = float(levels[0]) if levels.size == 1 else tuple(levels.tolist())
    return VolatilitySpec("constant", bound, (("level", stored),), func)


def _zero(bound_sigma: float = 1.0) -> VolatilitySpec:
    def func(y, i):
        return np.zeros(np.broadcast(y, i).shape)

    return VolatilitySpec("zero", float(bound_sigma), (), func)


#: factories of volatility functions by registered name
REGISTRY: Dict[str, Callable[..., VolatilitySpec]] = {
    "sigmoid_s5": _sigmoid,
    "sigmoid": _sigmoid,
    "constant": _constant,
    "zero": _zero,
}


def make_volatility(name: str = "sigmoid_s5", **kwargs) -> VolatilitySpec:
    """create a volatility function by its registered name

    args
    ----
    name: str
        one of the keys of :data:`~.REGISTRY`
    kwargs:
        forwarded to the factory, e.g. ``level`` for ``constant``

    returns
    -------
    volatility: VolatilitySpec
    """
    try:
        factory = REGISTRY[name.lower()]
    except KeyError:
        raise ConfigError(
            "model.volatility.name",
            f"{name} is not registered, choose from {', '.join(REGISTRY)}",
        ) from None
    try:
        return factory(**kwargs)
    except TypeError as e:
        raise ConfigError("model.volatility", str(e)) from None
