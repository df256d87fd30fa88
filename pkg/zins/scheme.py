"""Simulating paths

Paths live on the grid :math:`t_k = k\\Delta`, :math:`k = -M, .., K`, where
:math:`\\Delta = \\tau/M` exactly, so the delayed state is always a grid value
and never interpolated. A requested step size is snapped to τ/M with
M = round(τ/Δ), and a requested horizon to a whole number of steps.

Noise
-----

Every path owns three independent random streams, for the Brownian
increments, the Poisson increments and the uniforms of the regime chain.
They are keyed by the master seed and the index of the path, so any path
can be redrawn in isolation. :func:`~.coarsen_noise` turns the increments of
a fine grid into those of a coarser one, coupling the paths pathwise.

.. currentmodule:: zins._scheme.noise
.. autosummary::
   :template: module.rst

    NoiseIncrements
    make_noise
    make_noise_batch
    coarsen_noise
    write_noise_record
    read_noise_record

Schemes
-------

The truncated scheme is the workhorse. The backward scheme solves the
drift implicitly without truncation and serves as a reference. Both accept
a batch of noise and return a :class:`~.PathState`, whose rows are the
paths. The exported observable is the step process, constant on
:math:`[t_k, t_{k+1})`.

.. currentmodule:: zins._scheme.tem
.. autosummary::
   :template: module.rst

    PathState
    tem_step
    simulate_tem
    simulate_tem_path

.. currentmodule:: zins._scheme.bem
.. autosummary::
   :template: module.rst

    bem_step
    simulate_bem
    simulate_bem_path

"""
from zins._scheme.grid import Grid, make_grid
from zins._scheme.streams import PathStream, CHANNELS
from zins._scheme.noise import (
    NoiseIncrements,
    make_noise,
    make_noise_batch,
    coarsen_noise,
    write_noise_record,
    read_noise_record,
)
from zins._scheme.tem import PathState, tem_step, simulate_tem, simulate_tem_path
from zins._scheme.bem import bem_step, simulate_bem, solve_implicit


def simulate_bem_path(spec, delta: float, horizon: float, stream: PathStream) -> PathState:
    "simulate a single path with the backward scheme, see :func:`~.simulate_tem_path`"
    grid = make_grid(spec.tau, delta, horizon)
    noise = make_noise(
        grid.delta, grid.K, spec.jump_intensity, stream, spec.generator, spec.initial_regime
    )
    return simulate_bem(spec, noise, grid)


def replay_noise(replay: dict, spec) -> NoiseIncrements:
    """redraw the increments of a path from the replay record of an error

    args
    ----
    replay: dict
        the ``replay`` attribute of a :class:`~.NumericalError`
    spec: ModelSpec
        the model the path was simulated with

    returns
    -------
    noise: NoiseIncrements
        the increments of the offending path
    """
    return make_noise_batch(
        replay["seed"],
        [replay["path_index"]],
        replay["delta"],
        replay["num_steps"],
        spec.jump_intensity,
        spec.generator,
        spec.initial_regime,
    )
