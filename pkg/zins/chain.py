"""Markovian regime switching

The regime :math:`r(t)` is a continuous-time Markov chain on
:math:`\\{1, .., N\\}` with generator :math:`\\Gamma`. On a grid of step
:math:`\\Delta` it is sampled as a discrete chain with the one-step
transition matrix :math:`P(\\Delta) = e^{\\Delta\\Gamma}`.

States are numbered from 1, as in the model description; arrays are
indexed from 0 internally.
"""
import csv
from dataclasses import dataclass
from logging import getLogger
from math import ceil, log2
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from zins.errors import GeneratorError

log = getLogger(__name__)

#: tolerance of the generator invariants
GENERATOR_TOLERANCE = 1e-10
#: number of taylor terms after scaling
TAYLOR_ORDER = 18


def _frozen(entries) -> np.ndarray:
    arr = np.array(entries, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """the generator :math:`\\Gamma = (\\gamma_{ij})` of the regime chain

    args
    ----
    entries:
        a square N×N array of transition rates. Off-diagonal entries must be
        nonnegative and every row must sum to zero, see :meth:`~.check`.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(np.atleast_2d(self.entries))
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise GeneratorError(f"generator must be square, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        "number of states N"
        return self.entries.shape[0]

    def violations(self, tol: float = GENERATOR_TOLERANCE) -> list:
        "list of human readable invariant violations, empty if valid"
        problems = []
        off = self.entries - np.diag(np.diag(self.entries))
        if np.any(off < -tol):
            i, j = np.argwhere(off < -tol)[0]
            problems.append(
                f"negative rate {off[i, j]} from state {i + 1} to {j + 1}"
            )
        sums = self.entries.sum(axis=1)
        for i in np.flatnonzero(np.abs(sums) > tol):
            problems.append(f"row {i + 1} sums to {sums[i]}, not 0")
        if not np.all(np.isfinite(self.entries)):
            problems.append("entries are not finite")
        return problems

    def check(self, tol: float = GENERATOR_TOLERANCE):
        "raise :class:`~.GeneratorError` if an invariant is violated"
        problems = self.violations(tol)
        if problems:
            raise GeneratorError("; ".join(problems))
        return self

    def to_list(self) -> list:
        "row-major nested list, as stored in the config file"
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"GeneratorMatrix({self.to_list()})"


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """one-step transition probabilities :math:`P(\\Delta)`

    args
    ----
    entries:
        N×N row-stochastic matrix
    step:
        the step size Δ it was computed for
    """

    entries: np.ndarray
    step: float

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def cumulative(self) -> np.ndarray:
        "row-wise cumulative sums used by the sampler"
        return np.cumsum(self.entries, axis=1)

    def __repr__(self):
        return f"TransitionMatrix({self.entries.tolist()}, step={self.step})"


def matrix_exponential(G: GeneratorMatrix, delta: float) -> TransitionMatrix:
    """one-step transition matrix :math:`e^{\\Delta\\Gamma}`

    Scaling and squaring: :math:`\\Delta\\Gamma` is scaled by :math:`2^{-s}`
    until its infinity norm is at most 1/2, the exponential of the scaled
    matrix is summed as a Taylor polynomial of order :data:`TAYLOR_ORDER`
    and squared s times.

    args
    ----
    G: GeneratorMatrix
        a valid generator
    delta: float
        the step size, must be positive

    returns
    -------
    P: TransitionMatrix
        the transition matrix for the step delta
    """
    if not delta > 0:
        raise ValueError(f"step size must be positive, got {delta}")
    G.check()
    A = delta * G.entries
    norm = np.abs(A).sum(axis=1).max()
    squarings = max(0, ceil(log2(norm / 0.5))) if norm > 0 else 0
    B = A / 2.0 ** squarings
    eye = np.eye(G.size)
    E = eye.copy()
    for k in range(TAYLOR_ORDER, 0, -1):  # horner
        E = eye + B @ E / k
    for _ in range(squarings):
        E = E @ E
    # rates are nonnegative, so only rounding can push entries below zero
    E = np.maximum(E, 0.0)
    return TransitionMatrix(E, float(delta))


def sample_chain_step(current, P: TransitionMatrix, u):
    """draw the next state of the discrete chain

    The next state is the smallest j whose cumulative row sum strictly
    exceeds u, and N if u is at least the cumulative sum through N-1. The
    lower bound of each bucket is inclusive.

    args
    ----
    current: int or array of int
        the current state(s), numbered from 1
    P: TransitionMatrix
        the one-step transition matrix
    u: float or array of float
        uniform draws from [0, 1), one per current state

    returns
    -------
    state: int or array of int
        the next state(s), numbered from 1
    """
    cumulative = P.cumulative
    cur = np.asarray(current, dtype=int)
    uu = np.asarray(u, dtype=float)
    rows = cumulative[cur - 1, :-1]
    nxt = (rows <= uu[..., None]).sum(axis=-1) + 1
    if np.ndim(nxt) == 0:
        return int(nxt)
    return nxt


def chain_from_uniforms(P: TransitionMatrix, r0, uniforms: np.ndarray) -> np.ndarray:
    """run the chain for many paths at once

    args
    ----
    P: TransitionMatrix
        one-step transition matrix
    r0: int or array of int
        initial state of each path
    uniforms: ndarray
        shape (paths, steps) of uniform draws, one row per path

    returns
    -------
    regimes: ndarray
        shape (paths, steps + 1) of int states, starting with r0
    """
    uniforms = np.atleast_2d(uniforms)
    paths, steps = uniforms.shape
    regimes = np.empty((paths, steps + 1), dtype=np.int64)
    regimes[:, 0] = r0
    if P.size == 1:
        regimes[:] = 1
        return regimes
    cumulative = P.cumulative[:, :-1]
    for k in range(steps):
        rows = cumulative[regimes[:, k] - 1]
        regimes[:, k + 1] = (rows <= uniforms[:, k, None]).sum(axis=1) + 1
    return regimes


def sample_chain_path(
    G: GeneratorMatrix,
    r0: int,
    delta: float,
    num_steps: int,
    stream: np.random.Generator,
) -> np.ndarray:
    """sample a regime trajectory on a grid of step delta

    args
    ----
    G: GeneratorMatrix
        the generator of the chain
    r0: int
        initial state
    delta: float
        step size
    num_steps: int
        number of transitions to draw
    stream: numpy.random.Generator
        source of the uniform draws, one per step

    returns
    -------
    trajectory: ndarray
        num_steps + 1 states, the first being r0
    """
    if num_steps < 0:
        raise ValueError(f"num_steps must be nonnegative, got {num_steps}")
    P = matrix_exponential(G, delta)
    uniforms = stream.random(num_steps)
    return chain_from_uniforms(P, r0, uniforms[None, :])[0]


def stationary_distribution(G: GeneratorMatrix) -> np.ndarray:
    """the probability vector π with πΓ = 0

    args
    ----
    G: GeneratorMatrix
        an irreducible generator

    returns
    -------
    pi: ndarray
        the stationary distribution, summing to one
    """
    G.check()
    n = G.size
    if n > 1:
        adjacency = (np.abs(G.entries) > 0).astype(int)
        components, _ = connected_components(
            adjacency, directed=True, connection="strong"
        )
        if components > 1:
            raise GeneratorError(
                f"generator is reducible ({components} communicating classes)"
            )
    A = G.entries.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        return np.linalg.solve(A, b)
    except np.linalg.LinAlgError as e:
        raise GeneratorError(f"stationary system is singular: {e}") from e


def write_regime_csv(
    fname: Union[str, Path], regimes: Sequence[int], delta: float, header: str = ""
):
    """export a regime trajectory as csv with columns step, time, state

    args
    ----
    fname:
        where to write
    regimes:
        the trajectory, one state per grid point starting at t=0
    delta:
        the step size of the grid
    header:
        optional text, written as comment lines prefixed by '#'
    """
    with Path(fname).open("w", newline="", encoding="utf-8") as f:
        for line in header.splitlines():
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["step", "time", "state"])
        for k, state in enumerate(regimes):
            writer.writerow([k, repr(k * delta), int(state)])
    log.debug(f"Wrote {len(regimes)} regimes to {fname}")
