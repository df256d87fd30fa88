# -*- coding: utf-8 -*-
"""
The backward Euler-Maruyama reference scheme
............................................

The drift is implicit, diffusion and jump are explicit:

.. math::

    Z = X(t_k) + f(Z, r_k)\\Delta + \\varphi(X(t_{k-M}), r_k)\\,g(X(t_k))\\,\\Delta B_k
        + h(X(t_k), r_k)\\,\\Delta N_k

The map :math:`Z \\mapsto Z - \\Delta f(Z, i)` is strictly increasing when
:math:`\\Delta\\alpha_1(i) < 1`, so the root is unique. With the inverse drift
it tends to :math:`-\\infty` as :math:`Z \\to 0^+` and the root is positive,
without it the root is searched on the whole real line.

The equations of all paths are solved at once with Newton's method,
starting from the explicit predictor. Paths where Newton fails are
bracketed and solved with Brent's method.
"""
import warnings
from logging import getLogger

import numpy as np
from scipy.optimize import brentq, newton

from zins._model.coefficients import diffusion_g, drift_derivative, drift_f, jump_h
from zins._scheme.grid import Grid
from zins._scheme.noise import NoiseIncrements
from zins._scheme.tem import PathState, check_finite, new_state
from zins.errors import DomainError, NumericalError

log = getLogger(__name__)

#: absolute tolerance of the Newton iteration
NEWTON_TOLERANCE = 1e-13
#: how often a bracket is widened before giving up
MAX_EXPANSIONS = 200


def _residual(z, c, r, delta, spec):
    return z - delta * np.asarray(drift_f(z, r, spec)) - c


def _slope(z, c, r, delta, spec):
    return 1.0 - delta * np.asarray(drift_derivative(z, r, spec))


def _accepted(z, c, r, delta, spec) -> np.ndarray:
    ok = np.isfinite(z)
    if spec.include_inverse_drift:
        ok &= z > 0
    safe = np.where(ok, z, 1.0)
    with np.errstate(all="ignore"):
        res = _residual(safe, c, r, delta, spec)
    return ok & (np.abs(res) <= 1e-9 * (1.0 + np.abs(c)))


def _bracket(c: float, r: int, delta: float, spec, guess: float):
    def F(z):
        return float(_residual(z, c, r, delta, spec))

    hi = abs(guess) + abs(c) + 1.0
    for _ in range(MAX_EXPANSIONS):
        if F(hi) > 0:
            break
        hi *= 2.0
    else:
        return None
    if spec.include_inverse_drift:
        lo = min(hi, abs(c) if c > 0 else 1.0) / 2.0
        for _ in range(MAX_EXPANSIONS):
            if F(lo) < 0:
                return lo, hi
            lo /= 2.0
    else:
        lo = -hi
        for _ in range(MAX_EXPANSIONS):
            if F(lo) < 0:
                return lo, hi
            lo *= 2.0
    return None


def solve_implicit(c, r, delta: float, spec, guess=None) -> np.ndarray:
    """solve Z - Δ·f(Z, r) = c for every entry

    args
    ----
    c: ndarray
        the explicit part per path
    r: ndarray
        the regime per path
    delta: float
        the step size
    spec: ModelSpec
        the model
    guess: ndarray
        initial iterate, defaults to c

    returns
    -------
    roots: ndarray
        NaN where no root could be found
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=int), c.shape)
    guess = c.copy() if guess is None else np.atleast_1d(np.asarray(guess, dtype=float)).copy()
    if spec.include_inverse_drift:
        guess = np.where(guess > 0, guess, np.maximum(c, 1.0))
    roots = np.full(c.shape, np.nan)
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            out = newton(
                _residual,
                guess if guess.size > 1 else guess[0],
                fprime=_slope,
                args=(c if c.size > 1 else c[0], r if r.size > 1 else r[0], delta, spec),
                tol=NEWTON_TOLERANCE,
                maxiter=50,
                full_output=True,
                disp=False,
            )
            roots = np.atleast_1d(np.asarray(out[0], dtype=float)).copy()
        except (RuntimeError, DomainError, ZeroDivisionError, FloatingPointError):
            pass
    failed = np.flatnonzero(~_accepted(roots, c, r, delta, spec))
    for j in failed:
        log.debug(f"Newton failed for c = {c[j]:g}, bracketing instead")
        bracket = _bracket(c[j], r[j], delta, spec, guess[j])
        if bracket is None:
            roots[j] = np.nan
            continue
        roots[j] = brentq(
            lambda z: float(_residual(z, c[j], r[j], delta, spec)),
            *bracket,
            xtol=NEWTON_TOLERANCE,
        )
    return roots


def _explicit_part(x, y, r, dB, dN, spec):
    phi = np.asarray(spec.volatility.eval(y, r))
    g = np.asarray(diffusion_g(x, spec))
    h = np.asarray(jump_h(x, r, spec))
    return x + phi * g * dB + h * dN


def _advance(x, y, r, dB, dN, delta, spec):
    c = _explicit_part(x, y, r, dB, dN, spec)
    with np.errstate(all="ignore"):
        guess = c + delta * np.asarray(drift_f(np.where(x != 0, x, 1.0), r, spec))
    return solve_implicit(c, r, delta, spec, guess)


def _raise_unsolved(nxt, state: PathState, k: int):
    if np.all(np.isfinite(nxt)):
        return
    row = int(np.flatnonzero(~np.isfinite(nxt))[0])
    replay = state.noise.replay(row) if state.noise is not None else {}
    replay.update({"step": k, "M": state.grid.M})
    raise NumericalError(
        f"backward Euler found no root for path {replay.get('path_index', row)} at step {k}",
        replay,
    )


def bem_step(state: PathState, k: int, dB, dN, spec) -> np.ndarray:
    """advance all paths of a state from t_k to t_{k+1} implicitly

    returns X(t_{k+1}) per path, also written into the state, and raises
    :class:`~.NumericalError` with the step if a root cannot be found
    """
    nxt = _advance(
        state.current(k),
        state.delayed(k),
        state.regimes[:, k],
        np.asarray(dB, dtype=float),
        np.asarray(dN, dtype=float),
        state.grid.delta,
        spec,
    )
    _raise_unsolved(nxt, state, k)
    state.values[:, k + state.grid.M + 1] = nxt
    return nxt


def simulate_bem(spec, noise: NoiseIncrements, grid: Grid) -> PathState:
    """run the backward scheme for all paths of a noise batch

    No truncation is applied. With the same noise as
    :func:`~.simulate_tem` the two schemes are coupled pathwise.
    """
    if noise.num_steps != grid.K:
        raise ValueError(f"noise has {noise.num_steps} steps, the grid {grid.K}")
    state = new_state(spec, grid, noise)
    dN = noise.poisson.astype(float)
    for k in range(grid.K):
        bem_step(state, k, noise.brownian[:, k], dN[:, k], spec)
    return check_finite(state)
