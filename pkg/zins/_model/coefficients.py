# -*- coding: utf-8 -*-
"""
Coefficients of the model
.........................

.. math::

    dx = f(x, r)\\,dt + \\varphi(x(t-\\tau), r)\\,g(x)\\,dB + h(x, r)\\,dN

with drift :math:`f(x,i)=\\alpha_{-1}(i)x^{-1}-\\alpha_0(i)+\\alpha_1(i)x-\\alpha_2(i)x^\\rho`,
diffusion :math:`g(x)=x^\\theta` and jump :math:`h(x,i)=\\alpha_3(i)x`. Diffusion
and jump vanish for negative x.

All functions accept scalars or numpy arrays for x and the regime i
(numbered from 1), and broadcast them against each other.
"""
import numpy as np

from zins.errors import DomainError


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _signed_power(x, exponent):
    return np.sign(x) * np.abs(x) ** exponent


def drift_f(x, i, spec):
    """drift f(x, i)

    args
    ----
    x: float or ndarray
        state, must be nonzero if the inverse drift is enabled
    i: int or ndarray of int
        regime
    spec: ModelSpec
        the model

    returns
    -------
    drift: float or ndarray

    raises
    ------
    DomainError
        if x is zero while ``spec.include_inverse_drift`` is set
    """
    x = np.asarray(x, dtype=float)
    a = spec.alphas[np.asarray(i, dtype=int) - 1]
    value = -a[..., 1] + a[..., 2] * x - a[..., 3] * _signed_power(x, spec.rho)
    if spec.include_inverse_drift:
        if np.any(x == 0):
            raise DomainError("the inverse drift is undefined at x = 0")
        value = value + a[..., 0] / x
    return _out(value)


def drift_derivative(x, i, spec):
    "derivative of :func:`drift_f` with respect to x, used by implicit solvers"
    x = np.asarray(x, dtype=float)
    a = spec.alphas[np.asarray(i, dtype=int) - 1]
    value = a[..., 2] - a[..., 3] * spec.rho * np.abs(x) ** (spec.rho - 1)
    if spec.include_inverse_drift:
        value = value - a[..., 0] / (x * x)
    return _out(value)


def diffusion_g(x, spec):
    """diffusion g(x) = x^θ, and 0 for x < 0"""
    x = np.asarray(x, dtype=float)
    return _out(np.where(x >= 0, np.abs(x) ** spec.theta, 0.0))


def jump_h(x, i, spec):
    """jump coefficient h(x, i) = α₃(i)·x, and 0 for x < 0"""
    x = np.asarray(x, dtype=float)
    a3 = spec.alphas[np.asarray(i, dtype=int) - 1, 4]
    return _out(np.where(x >= 0, a3 * x, 0.0))
