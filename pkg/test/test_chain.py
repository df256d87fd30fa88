import numpy as np
from pytest import approx, fixture, raises
from scipy.linalg import expm

from zins.chain import (
    GeneratorMatrix,
    TransitionMatrix,
    matrix_exponential,
    sample_chain_path,
    sample_chain_step,
    stationary_distribution,
    write_regime_csv,
)
from zins.errors import GeneratorError


@fixture
def gamma():
    return GeneratorMatrix([[-2.0, 2.0], [1.0, -1.0]])


def random_generator(rng, n):
    rates = rng.uniform(0, 3, (n, n))
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=1))
    return GeneratorMatrix(rates)


def test_generator_invariants():
    with raises(GeneratorError):
        GeneratorMatrix([[0.0, 1.0, 2.0]])
    broken = GeneratorMatrix([[-1.0, 1.0], [-0.5, 0.5]])
    assert len(broken.violations()) == 1
    with raises(GeneratorError, match="negative rate"):
        broken.check()
    with raises(GeneratorError, match="sums to"):
        GeneratorMatrix([[-1.0, 2.0], [1.0, -1.0]]).check()
    assert GeneratorMatrix([[0.0]]).check().size == 1


def test_expm_closed_form(gamma):
    delta = 0.001
    P = matrix_exponential(gamma, delta)
    closed = np.eye(2) + (1 - np.exp(-3 * delta)) / 3 * gamma.entries
    assert np.max(np.abs(P.entries - closed)) < 1e-9
    expected = [[0.9980030, 0.0019970], [0.0009985, 0.9990015]]
    assert np.max(np.abs(P.entries - expected)) < 1e-7
    assert P.step == delta


def test_expm_identity(gamma):
    assert np.max(np.abs(matrix_exponential(gamma, 1e-12).entries - np.eye(2))) < 1e-10
    zero = GeneratorMatrix(np.zeros((3, 3)))
    assert np.array_equal(matrix_exponential(zero, 1.0).entries, np.eye(3))
    with raises(ValueError):
        matrix_exponential(gamma, 0.0)
    with raises(GeneratorError):
        matrix_exponential(GeneratorMatrix([[-1.0, 2.0], [1.0, -1.0]]), 0.1)


def test_expm_random_generators():
    rng = np.random.default_rng(1)
    for _ in range(100):
        G = random_generator(rng, int(rng.integers(1, 6)))
        d1, d2 = rng.uniform(0.01, 2.0, 2)
        P1, P2 = matrix_exponential(G, d1), matrix_exponential(G, d2)
        P12 = matrix_exponential(G, d1 + d2)
        assert np.max(np.abs(P1.entries @ P2.entries - P12.entries)) < 1e-10
        assert np.max(np.abs(P12.entries - expm((d1 + d2) * G.entries))) < 1e-10
        assert np.all(P12.entries >= 0)
        assert np.max(np.abs(P12.entries.sum(axis=1) - 1)) < 1e-12


def test_sample_step(gamma):
    P = matrix_exponential(gamma, 0.001)
    assert sample_chain_step(1, P, 0.5) == 1
    assert sample_chain_step(1, P, 0.999) == 2
    # the lower end of a bucket belongs to it
    assert sample_chain_step(1, P, P.cumulative[0, 0]) == 2
    identity = TransitionMatrix(np.eye(3), 1.0)
    for current in (1, 2, 3):
        for u in (0.0, 0.3, 0.999999):
            assert sample_chain_step(current, identity, u) == current
    states = sample_chain_step(np.array([1, 2]), P, np.array([0.999, 0.0005]))
    assert list(states) == [2, 1]


def test_sample_step_frequencies(gamma):
    P = matrix_exponential(gamma, 0.1)
    n = 1_000_000
    u = np.random.default_rng(2).random(n)
    for current in (1, 2):
        nxt = sample_chain_step(np.full(n, current), P, u)
        for j in (1, 2):
            p = P.entries[current - 1, j - 1]
            frequency = np.mean(nxt == j)
            assert abs(frequency - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_sample_path(gamma):
    stream = np.random.default_rng(3)
    assert list(sample_chain_path(gamma, 2, 0.01, 0, stream)) == [2]
    zero = GeneratorMatrix(np.zeros((2, 2)))
    assert np.all(sample_chain_path(zero, 2, 0.01, 100, stream) == 2)
    path = sample_chain_path(gamma, 1, 0.01, 100_000, stream)
    assert path.shape == (100_001,)
    assert path[0] == 1
    # over t = 1000 one path has an occupation fraction of sd 0.012
    assert np.mean(path == 1) == approx(1 / 3, abs=0.06)
    paths = [sample_chain_path(gamma, 1, 0.01, 100_000, stream) for _ in range(8)]
    occupation = [np.mean([np.mean(p == j) for p in paths]) for j in (1, 2)]
    assert occupation == approx([1 / 3, 2 / 3], abs=0.02)
    with raises(ValueError):
        sample_chain_path(gamma, 1, 0.01, -1, stream)


def test_sample_path_is_deterministic(gamma):
    a = sample_chain_path(gamma, 1, 0.01, 500, np.random.default_rng(4))
    b = sample_chain_path(gamma, 1, 0.01, 500, np.random.default_rng(4))
    assert np.array_equal(a, b)


def test_stationary(gamma):
    assert stationary_distribution(gamma) == approx([1 / 3, 2 / 3])
    symmetric = GeneratorMatrix([[-0.7, 0.7], [0.7, -0.7]])
    assert stationary_distribution(symmetric) == approx([0.5, 0.5])
    assert stationary_distribution(GeneratorMatrix([[0.0]])) == approx([1.0])
    with raises(GeneratorError, match="reducible"):
        stationary_distribution(GeneratorMatrix([[-1.0, 1.0], [0.0, 0.0]]))


def test_regime_csv(tmp_path, gamma):
    fname = tmp_path / "regimes.csv"
    write_regime_csv(fname, [1, 1, 2], 0.5, "zins simulate\nseed 1")
    lines = fname.read_text().splitlines()
    assert lines == [
        "# zins simulate",
        "# seed 1",
        "step,time,state",
        "0,0.0,1",
        "1,0.5,1",
        "2,1.0,2",
    ]
