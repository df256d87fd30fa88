"""Noise increments of the scheme

The Brownian increments, the Poisson increments and the regime trajectory
of one or many paths, drawn from the independent channels of a
:class:`~.PathStream`.
"""
from dataclasses import dataclass
from logging import getLogger
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from zins.chain import GeneratorMatrix, chain_from_uniforms, matrix_exponential
from zins.errors import DivisibilityError, DomainError
from zins._scheme.streams import PathStream

log = getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NoiseIncrements:
    """increments of B and N and the regimes on a grid

    All arrays hold one row per path.

    args
    ----
    brownian: ndarray
        shape (paths, K), the increments ΔB_k ~ Normal(0, Δ)
    poisson: ndarray
        shape (paths, K), the increments ΔN_k ~ Poisson(λΔ)
    regimes: ndarray
        shape (paths, K + 1), the regime at every grid point t_k >= 0
    delta: float
        the step size
    seed: int
        the master seed the increments were drawn with, if known
    path_indices: tuple
        the index of every row within the experiment, if known
    """

    brownian: np.ndarray
    poisson: np.ndarray
    regimes: np.ndarray
    delta: float
    seed: int = None
    path_indices: Tuple[int, ...] = None

    def __post_init__(self):
        brownian = np.atleast_2d(np.asarray(self.brownian, dtype=float))
        poisson = np.atleast_2d(np.asarray(self.poisson, dtype=np.int64))
        regimes = np.atleast_2d(np.asarray(self.regimes, dtype=np.int64))
        if poisson.shape != brownian.shape:
            raise ValueError(f"poisson {poisson.shape} does not match brownian {brownian.shape}")
        if regimes.shape != (brownian.shape[0], brownian.shape[1] + 1):
            raise ValueError(f"expected regimes of shape {brownian.shape} plus one step")
        if np.any(poisson < 0):
            raise ValueError("poisson increments must be nonnegative")
        object.__setattr__(self, "brownian", brownian)
        object.__setattr__(self, "poisson", poisson)
        object.__setattr__(self, "regimes", regimes)
        if self.path_indices is None:
            object.__setattr__(self, "path_indices", tuple(range(brownian.shape[0])))

    @property
    def num_paths(self) -> int:
        return self.brownian.shape[0]

    @property
    def num_steps(self) -> int:
        return self.brownian.shape[1]

    def path(self, row: int) -> "NoiseIncrements":
        "the increments of a single row"
        return NoiseIncrements(
            self.brownian[row],
            self.poisson[row],
            self.regimes[row],
            self.delta,
            self.seed,
            (self.path_indices[row],),
        )

    def replay(self, row: int) -> dict:
        "what is needed to redraw one row"
        return {
            "seed": self.seed,
            "path_index": self.path_indices[row],
            "delta": self.delta,
            "num_steps": self.num_steps,
        }


def _draw(stream: PathStream, delta: float, num_steps: int, lam: float):
    brownian = stream.channel("brownian").normal(0.0, np.sqrt(delta), num_steps)
    poisson = stream.channel("poisson").poisson(lam * delta, num_steps)
    uniforms = stream.channel("chain").random(num_steps)
    return brownian, poisson, uniforms


def make_noise(
    delta: float,
    num_steps: int,
    lam: float,
    stream: PathStream,
    generator: GeneratorMatrix = None,
    r0: int = 1,
) -> NoiseIncrements:
    """draw the increments of a single path

    args
    ----
    delta: float
        step size
    num_steps: int
        number of increments K
    lam: float
        intensity λ of the Poisson process
    stream: PathStream
        the streams of the path
    generator: GeneratorMatrix
        generator of the regime chain, the regime stays at r0 if None
    r0: int
        initial regime

    returns
    -------
    noise: NoiseIncrements
        with a single row
    """
    return make_noise_batch(stream.seed, [stream.path_index], delta, num_steps, lam, generator, r0)


def make_noise_batch(
    seed: int,
    path_indices: Sequence[int],
    delta: float,
    num_steps: int,
    lam: float,
    generator: GeneratorMatrix = None,
    r0: int = 1,
) -> NoiseIncrements:
    """draw the increments of many paths, each from its own streams

    Row j holds exactly what :func:`make_noise` returns for path
    ``path_indices[j]``.
    """
    if not delta > 0:
        raise DomainError(f"step size must be positive, got {delta}")
    if lam < 0:
        raise DomainError(f"jump intensity must be nonnegative, got {lam}")
    path_indices = tuple(int(j) for j in path_indices)
    paths = len(path_indices)
    brownian = np.empty((paths, num_steps))
    poisson = np.empty((paths, num_steps), dtype=np.int64)
    uniforms = np.empty((paths, num_steps))
    for row, index in enumerate(path_indices):
        brownian[row], poisson[row], uniforms[row] = _draw(
            PathStream(seed, index), delta, num_steps, lam
        )
    if generator is None:
        regimes = np.full((paths, num_steps + 1), r0, dtype=np.int64)
    else:
        P = matrix_exponential(generator, delta)
        regimes = chain_from_uniforms(P, r0, uniforms)
    return NoiseIncrements(brownian, poisson, regimes, float(delta), seed, path_indices)


def coarsen_noise(fine: NoiseIncrements, factor: int) -> NoiseIncrements:
    """the increments of the grid with a step size factor times larger

    Coarse increments are block sums of fine increments. The coarse regime
    at a coarse node is the fine regime at the same node.

    raises
    ------
    DivisibilityError
        if factor does not divide the number of fine steps
    """
    factor = int(factor)
    if factor < 1 or fine.num_steps % factor:
        raise DivisibilityError(
            f"factor {factor} does not divide the {fine.num_steps} fine steps "
            f"(Δ = {fine.delta * factor:g})"
        )
    if factor == 1:
        return fine
    shape = (fine.num_paths, fine.num_steps // factor, factor)
    return NoiseIncrements(
        fine.brownian.reshape(shape).sum(axis=2),
        fine.poisson.reshape(shape).sum(axis=2),
        fine.regimes[:, ::factor],
        fine.delta * factor,
        fine.seed,
        fine.path_indices,
    )


#: little-endian header of a binary noise record
RECORD_HEADER = np.dtype(
    [
        ("magic", "S8"),
        ("seed", "<u8"),
        ("path_index", "<i8"),
        ("delta", "<f8"),
        ("M", "<i8"),
        ("K", "<i8"),
        ("lam", "<f8"),
    ]
)
RECORD_MAGIC = b"ZINSNR01"


def write_noise_record(
    fname: Union[str, Path], noise: NoiseIncrements, M: int, lam: float, row: int = 0
):
    """write the increments of one path as a binary record for replay

    The record is little-endian: a header with magic, seed, path index, Δ,
    M, K and λ, followed by K float64 Brownian increments, K int64 Poisson
    increments and K + 1 int64 regimes.
    """
    header = np.zeros(1, dtype=RECORD_HEADER)
    header["magic"] = RECORD_MAGIC
    header["seed"] = 0 if noise.seed is None else noise.seed
    header["path_index"] = noise.path_indices[row]
    header["delta"] = noise.delta
    header["M"] = M
    header["K"] = noise.num_steps
    header["lam"] = lam
    with Path(fname).open("wb") as f:
        f.write(header.tobytes())
        f.write(noise.brownian[row].astype("<f8").tobytes())
        f.write(noise.poisson[row].astype("<i8").tobytes())
        f.write(noise.regimes[row].astype("<i8").tobytes())
    log.info(f"Wrote noise record of path {noise.path_indices[row]} to {fname}")


def read_noise_record(fname: Union[str, Path]) -> Tuple[NoiseIncrements, dict]:
    """read a record written by :func:`write_noise_record`

    returns
    -------
    noise: NoiseIncrements
        the increments of the recorded path
    meta: dict
        the header fields
    """
    data = Path(fname).read_bytes()
    header = np.frombuffer(data, dtype=RECORD_HEADER, count=1)[0]
    if bytes(header["magic"]) != RECORD_MAGIC:
        raise ValueError(f"{fname} is not a noise record")
    K = int(header["K"])
    offset = RECORD_HEADER.itemsize
    brownian = np.frombuffer(data, dtype="<f8", count=K, offset=offset)
    offset += 8 * K
    poisson = np.frombuffer(data, dtype="<i8", count=K, offset=offset)
    offset += 8 * K
    regimes = np.frombuffer(data, dtype="<i8", count=K + 1, offset=offset)
    meta = {
        "seed": int(header["seed"]),
        "path_index": int(header["path_index"]),
        "delta": float(header["delta"]),
        "M": int(header["M"]),
        "K": K,
        "lam": float(header["lam"]),
    }
    noise = NoiseIncrements(
        brownian, poisson, regimes, meta["delta"], meta["seed"], (meta["path_index"],)
    )
    return noise, meta
