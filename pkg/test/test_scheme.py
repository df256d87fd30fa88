import numpy as np
from pytest import approx, mark, raises, warns
from scipy.integrate import solve_ivp

from zins.errors import (
    DivisibilityError,
    DomainError,
    NumericalError,
    TruncationError,
    TruncationWarning,
)
from zins.model import diffusion_g, drift_f, jump_h, sigmoid_volatility
from zins.scheme import (
    Grid,
    NoiseIncrements,
    PathStream,
    bem_step,
    coarsen_noise,
    make_grid,
    make_noise,
    make_noise_batch,
    read_noise_record,
    replay_noise,
    simulate_bem,
    simulate_bem_path,
    simulate_tem,
    simulate_tem_path,
    solve_implicit,
    tem_step,
    write_noise_record,
)
from zins.truncation import truncated_diffusion, truncated_drift
from zins._scheme.tem import check_finite, new_state


def quiet_noise(grid: Grid, regime: int = 1) -> NoiseIncrements:
    "no Brownian motion and no jumps"
    return NoiseIncrements(
        np.zeros((1, grid.K)),
        np.zeros((1, grid.K), dtype=int),
        np.full((1, grid.K + 1), regime),
        grid.delta,
    )


def test_grid():
    grid = make_grid(1.0, 1e-3, 2.0)
    assert (grid.M, grid.K) == (1000, 2000)
    assert grid.delta * grid.M == 1.0
    assert grid.size == 3001
    assert grid.times[0] == -1.0
    assert grid.times[grid.M] == 0.0
    assert grid.horizon == approx(2.0)
    snapped = make_grid(1.0, 0.0013, 2.0)
    assert snapped.M == 769
    assert snapped.delta == 1.0 / 769
    short = make_grid(1.0, 0.25, 1.1)
    assert (short.K, short.horizon) == (4, 1.0)
    assert make_grid(1.0, 5.0, 0.0).M == 1
    with raises(DomainError):
        make_grid(1.0, 0.0, 1.0)
    with raises(DomainError):
        make_grid(1.0, 0.1, -1.0)


def test_grid_coarsen():
    grid = make_grid(1.0, 1 / 8, 2.0)
    coarse = grid.coarsen(4)
    assert (coarse.M, coarse.K, coarse.delta) == (2, 4, 0.5)
    with raises(DivisibilityError):
        grid.coarsen(3)


def test_streams():
    stream = PathStream(7, 3)
    a = stream.channel("brownian").random(5)
    assert np.array_equal(a, stream.channel("brownian").random(5))
    assert not np.array_equal(a, stream.channel("poisson").random(5))
    assert not np.array_equal(a, PathStream(7, 4).channel("brownian").random(5))
    assert not np.array_equal(a, PathStream(8, 3).channel("brownian").random(5))
    with raises(ValueError):
        stream.channel("volatility")


def test_noise_statistics():
    stream = PathStream(1, 0)
    noise = make_noise(0.01, 1_000_000, 1.0, stream)
    assert noise.poisson.mean() == approx(0.01, abs=3 * np.sqrt(0.01 / 1e6))
    assert noise.brownian.var() == approx(0.01, rel=0.01)
    assert np.all(noise.regimes == 1)
    silent = make_noise(0.01, 1000, 0.0, stream)
    assert np.all(silent.poisson == 0)
    with raises(DomainError):
        make_noise(0.01, 10, -1.0, stream)


def test_noise_batch_rows_match_single_paths(spec):
    batch = make_noise_batch(5, [3, 4, 5], 0.01, 200, 1.0, spec.generator, 1)
    single = make_noise(0.01, 200, 1.0, PathStream(5, 4), spec.generator, 1)
    assert batch.num_paths == 3
    assert np.array_equal(batch.brownian[1], single.brownian[0])
    assert np.array_equal(batch.poisson[1], single.poisson[0])
    assert np.array_equal(batch.regimes[1], single.regimes[0])
    assert batch.replay(1) == {"seed": 5, "path_index": 4, "delta": 0.01, "num_steps": 200}
    assert np.array_equal(batch.path(2).brownian, batch.brownian[2:])


def test_noise_shapes():
    with raises(ValueError):
        NoiseIncrements(np.zeros((1, 3)), np.zeros((1, 2)), np.ones((1, 4)), 0.1)
    with raises(ValueError):
        NoiseIncrements(np.zeros((1, 3)), np.zeros((1, 3)), np.ones((1, 3)), 0.1)
    with raises(ValueError):
        NoiseIncrements(np.zeros(3), -np.ones(3), np.ones(4), 0.1)


def test_coarsen_noise():
    fine = NoiseIncrements(
        [[0.1, 0.2, 0.3, 0.4]], [[0, 1, 2, 0]], [[1, 2, 2, 1, 1]], 0.25, 9, (17,)
    )
    assert coarsen_noise(fine, 1) is fine
    coarse = coarsen_noise(fine, 2)
    assert coarse.brownian[0] == approx([0.1 + 0.2, 0.3 + 0.4])
    assert list(coarse.poisson[0]) == [1, 2]
    assert list(coarse.regimes[0]) == [1, 2, 1]
    assert coarse.delta == 0.5
    assert coarse.path_indices == (17,)
    with raises(DivisibilityError):
        coarsen_noise(fine, 3)


def test_coarsen_noise_conserves_totals(spec):
    fine = make_noise_batch(2, range(4), 1 / 64, 128, 3.0, spec.generator)
    for factor in (2, 4, 8):
        coarse = coarsen_noise(fine, factor)
        assert np.array_equal(coarse.poisson.sum(axis=1), fine.poisson.sum(axis=1))
        assert coarse.brownian.sum(axis=1) == approx(fine.brownian.sum(axis=1), abs=1e-12)


def test_noise_record(tmp_path, spec):
    noise = make_noise_batch(11, [6, 9], 0.01, 50, 1.0, spec.generator)
    fname = tmp_path / "path.replay.bin"
    write_noise_record(fname, noise, 100, 1.0, row=1)
    restored, meta = read_noise_record(fname)
    assert meta == {"seed": 11, "path_index": 9, "delta": 0.01, "M": 100, "K": 50, "lam": 1.0}
    assert np.array_equal(restored.brownian[0], noise.brownian[1])
    assert np.array_equal(restored.poisson[0], noise.poisson[1])
    assert np.array_equal(restored.regimes[0], noise.regimes[1])
    fname.write_bytes(b"NOTNOISE" + fname.read_bytes()[8:])
    with raises(ValueError):
        read_noise_record(fname)


def test_tem_step_example(spec, policy):
    grid = make_grid(spec.tau, 1e-3, 1e-3)
    state = new_state(spec, grid, quiet_noise(grid))
    assert np.all(state.values[:, : grid.M + 1] == 0.02)
    nxt = tem_step(state, 0, 0.01, 0, spec, policy)
    # 0.02 lies below the band, the drift is taken at its lower end
    lower, _ = policy.band(1e-3, warn=False)
    assert 0.02 < lower
    expected = (
        0.02
        + drift_f(lower, 1, spec) * 1e-3
        + sigmoid_volatility(0.02, 1) * diffusion_g(0.02, spec) * 0.01
    )
    assert nxt[0] == approx(expected, rel=1e-14)
    assert state.terminal[0] == nxt[0]


def test_tem_step_uses_the_truncated_coefficients(spec, policy):
    x = np.array([-0.3, 0.0, 0.01, 0.5, 3.0, 40.0])
    n = x.size
    grid = make_grid(spec.tau, 1e-3, 1e-3)
    noise = NoiseIncrements(
        np.zeros((n, grid.K)), np.zeros((n, grid.K), dtype=int), np.full((n, grid.K + 1), 2), grid.delta
    )
    state = new_state(spec, grid, noise)
    state.values[:, grid.M] = x
    dB = np.linspace(-0.05, 0.05, n)
    dN = np.array([0, 1, 0, 1, 0, 1])
    nxt = tem_step(state, 0, dB, dN, spec, policy)
    expected = (
        x
        + truncated_drift(x, 2, 1e-3, spec, policy, warn=False) * 1e-3
        + spec.volatility.eval(0.02, 2) * truncated_diffusion(x, 1e-3, spec, policy, warn=False) * dB
        + jump_h(x, 2, spec) * dN
    )
    assert nxt == approx(expected, rel=1e-14, abs=1e-15)


def test_tem_step_jump(policy):
    from zins.model import ModelSpec, RegimeParams, make_volatility

    jumpy = ModelSpec(
        (RegimeParams(0, 0, 0, 0, 1.0), RegimeParams(0, 0, 0, 0, 2.0)),
        rho=2.0,
        theta=1.25,
        volatility=make_volatility("zero"),
        include_inverse_drift=False,
    )
    grid = make_grid(1.0, 1e-3, 1e-3)
    state = new_state(jumpy, grid, quiet_noise(grid, regime=2))
    state.values[:, grid.M] = 0.5
    assert tem_step(state, 0, 0.3, 2, jumpy, policy)[0] == 2.5


def test_tem_without_noise_is_euler(spec, policy):
    grid = make_grid(spec.tau, 1e-3, 0.5)
    state = simulate_tem(spec, policy, quiet_noise(grid), grid, warn=False)
    x = 0.02
    for k in range(grid.K):
        x = x + truncated_drift(x, 1, grid.delta, spec, policy, warn=False) * grid.delta
        assert state.path[0, k + 1] == x


@mark.filterwarnings("ignore::zins.errors.TruncationWarning")
def test_tem_deterministic_order(ode_spec, ode_policy):
    def rhs(t, x):
        return drift_f(x, 1, ode_spec)

    exact = solve_ivp(rhs, (0.0, 1.0), [0.5], method="DOP853", rtol=1e-12, atol=1e-14)
    errors = []
    for k in range(6, 10):
        state = simulate_tem_path(ode_spec, ode_policy, 2.0 ** -k, 1.0, PathStream(0, 0))
        errors.append(abs(state.terminal[0] - exact.y[0, -1]))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    assert ratios == approx(2.0, abs=0.2)


def test_tem_reproducible(spec, policy):
    with warns(TruncationWarning) as record:
        a = simulate_tem_path(spec, policy, 1e-2, 1.0, PathStream(1, 0))
    assert len([w for w in record if w.category is TruncationWarning]) == 1
    b = simulate_tem_path(spec, policy, 1e-2, 1.0, PathStream(1, 0))
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.regimes, b.regimes)
    c = simulate_tem_path(spec, policy, 1e-2, 1.0, PathStream(2, 0))
    assert not np.array_equal(a.values, c.values)


def test_tem_horizon_zero(spec, policy):
    grid = make_grid(1.0, 1e-2, 0.0)
    state = simulate_tem(spec, policy, quiet_noise(grid), grid, warn=False)
    assert state.values.shape == (1, 101)
    assert np.all(state.values == 0.02)
    assert state.path.shape == (1, 1)


def test_tem_rejects_large_steps(spec, policy):
    with raises(TruncationError):
        simulate_tem_path(spec, policy, 0.5, 1.0, PathStream())
    grid = make_grid(1.0, 1e-2, 1.0)
    with raises(ValueError):
        simulate_tem(spec, policy, quiet_noise(make_grid(1.0, 1e-2, 0.5)), grid)


def test_path_state_accessors(spec, policy):
    grid = make_grid(spec.tau, 0.25, 1.0)
    noise = make_noise_batch(0, range(3), grid.delta, grid.K, 1.0, spec.generator)
    state = new_state(spec, grid, noise)
    state.values[:, grid.M + 1 :] = np.arange(1, 5) * 0.1
    assert state.num_paths == 3
    assert np.array_equal(state.current(2), np.full(3, 0.2))
    # the delay is exactly M columns back
    assert np.array_equal(state.delayed(2), state.values[:, 2])
    assert np.array_equal(state.delayed(grid.M + 1), state.current(1))
    assert state.step_value(0.3)[0] == 0.1
    assert state.step_value(0.5)[0] == 0.2
    assert state.step_value(-1.0)[0] == 0.02
    assert state.step_value([0.0, 1.0])[0] == approx([0.02, 0.4])
    assert state.integral()[0] == approx((0.02 + 0.1 + 0.2 + 0.3) * 0.25)
    assert state.running_max()[0] == 0.4
    with raises(ValueError):
        state.step_value(1.5)


def test_check_finite(spec):
    grid = make_grid(spec.tau, 0.25, 1.0)
    noise = make_noise_batch(3, [10, 11], grid.delta, grid.K, 1.0, spec.generator)
    state = new_state(spec, grid, noise)
    state.values[:, grid.M + 1 :] = 1.0
    assert check_finite(state) is state
    state.values[1, grid.M + 3] = np.inf
    with raises(NumericalError) as error:
        check_finite(state)
    replay = error.value.replay
    assert (replay["seed"], replay["path_index"], replay["step"], replay["M"]) == (3, 11, 2, 4)
    redrawn = replay_noise(replay, spec)
    assert np.array_equal(redrawn.brownian[0], noise.brownian[1])


def test_bem_linear_drift():
    from zins.model import ModelSpec, RegimeParams

    decay = ModelSpec((RegimeParams(0, 0, -1.0, 0),), rho=2.0, theta=1.25, include_inverse_drift=False)
    assert solve_implicit(np.array([1.0]), 1, 0.1, decay)[0] == approx(1 / 1.1, rel=1e-12)
    roots = solve_implicit(np.array([1.0, -2.0, 0.0]), 1, 0.1, decay)
    assert roots == approx(np.array([1.0, -2.0, 0.0]) / 1.1, abs=1e-12)


def test_bem_inverse_drift_root_is_positive(spec):
    c = np.array([-1.0, 1e-4, 0.02, 3.0])
    roots = solve_implicit(c, np.array([1, 2, 1, 2]), 1e-3, spec)
    assert np.all(roots > 0)
    residual = roots - 1e-3 * drift_f(roots, np.array([1, 2, 1, 2]), spec) - c
    assert residual == approx(np.zeros(4), abs=1e-8)


def test_bem_step_without_drift(driftless_spec):
    grid = make_grid(1.0, 1e-2, 1e-2)
    state = new_state(driftless_spec, grid, quiet_noise(grid))
    assert bem_step(state, 0, 0.0, 0, driftless_spec)[0] == 0.02


def test_bem_stays_positive(spec):
    state = simulate_bem_path(spec, 1e-3, 0.5, PathStream(4, 0))
    assert np.all(state.path > 0)
    grid = make_grid(spec.tau, 1e-3, 0.5)
    noise = make_noise_batch(4, range(8), grid.delta, grid.K, 1.0, spec.generator)
    batch = simulate_bem(spec, noise, grid)
    assert np.all(batch.path > 0)
    assert batch.path[0] == approx(state.path[0], rel=1e-9)


def test_tem_equals_bem_without_drift(driftless_spec, driftless_policy):
    grid = make_grid(1.0, 1e-2, 1.0)
    noise = make_noise_batch(6, range(20), grid.delta, grid.K, 1.0)
    tem = simulate_tem(driftless_spec, driftless_policy, noise, grid, warn=False)
    bem = simulate_bem(driftless_spec, noise, grid)
    assert noise.poisson.sum() > 0
    assert np.array_equal(tem.values, bem.values)
