import warnings

import numpy as np
from pytest import approx, raises, warns

from zins.errors import DomainError, TruncationError, TruncationWarning
from zins.model import RegimeParams, diffusion_g, drift_f
from zins.truncation import (
    TruncationPolicy,
    audit,
    default_mu_for,
    delta_star_search,
    khasminskii_truncated,
    make_policy,
    psi,
    truncated_diffusion,
    truncated_drift,
)


def test_quadratic_mu(spec, policy):
    assert policy.mu_name == "quadratic"
    assert policy.mu(2.0) == approx(12.0)
    assert policy.mu_inverse(12.0) == approx(2.0)
    for r in (1.0, 2.0, 10.0):
        assert policy.mu_inverse(policy.mu(r)) == approx(r, rel=1e-12)
    # on [1, 1] the coefficients are |f(1, 1)| = 0.3, |f(1, 2)| = 0.5 and g(1) = 1
    assert max(abs(drift_f(1.0, 1, spec)), abs(drift_f(1.0, 2, spec)), 1.0) <= policy.mu(1.0)
    assert default_mu_for(spec).mu_name == "quadratic"


def test_fitted_mu(spec):
    steep = spec.replace(regimes=(RegimeParams(0.3, 0.2, 0.1, 10.0, 1.0),) * 2)
    with raises(TruncationError, match="does not dominate"):
        default_mu_for(steep, "quadratic")
    fitted = default_mu_for(steep, "auto")
    assert fitted.mu_name == "fitted"
    assert fitted.mu_exponent == 3.0
    r = np.geomspace(1, 100, 50)
    for x in (r, 1 / r):
        assert np.all(np.abs(drift_f(x, 1, steep)) <= fitted.mu(r))
    with raises(TruncationError, match="unknown"):
        default_mu_for(spec, "cubic")


def test_psi(policy, plain_policy):
    with warns(TruncationWarning):
        assert psi(1e-3, policy) == approx(100.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert psi(1e-4, plain_policy) == approx(10.0)
        assert 1e-4 ** 0.25 * psi(1e-4, plain_policy) == approx(1.0)
        assert psi(1.0, policy, warn=False) == 1.0
    with raises(DomainError):
        psi(0.0, policy)
    with raises(DomainError):
        psi(-1e-3, policy)


def test_truncated_drift(spec, policy):
    lower, upper = policy.band(1e-3, warn=False)
    assert upper == approx(np.sqrt(100 / 3))
    assert lower == approx(1 / upper)
    assert truncated_drift(10.0, 1, 1e-3, spec, policy, warn=False) == approx(-16.2373, abs=1e-3)
    assert truncated_drift(1.0, 1, 1e-3, spec, policy, warn=False) == drift_f(1.0, 1, spec)
    below = truncated_drift(-5.0, 1, 1e-3, spec, policy, warn=False)
    assert below == drift_f(lower, 1, spec)
    assert lower == approx(0.17321, abs=1e-5)


def test_truncated_diffusion(spec, policy):
    _, upper = policy.band(1e-3, warn=False)
    assert truncated_diffusion(10.0, 1e-3, spec, policy, warn=False) == diffusion_g(upper, spec)
    assert truncated_diffusion(10.0, 1e-3, spec, policy, warn=False) == approx(8.95, abs=0.01)
    assert truncated_diffusion(-0.3, 1e-3, spec, policy, warn=False) == 0.0
    assert truncated_diffusion(1.0, 1e-3, spec, policy, warn=False) == 1.0
    # no lower clamp for g
    assert truncated_diffusion(0.01, 1e-3, spec, policy, warn=False) == diffusion_g(0.01, spec)


def test_truncation_bound(spec, policy):
    rng = np.random.default_rng(0)
    deltas = np.exp(rng.uniform(np.log(1e-6), np.log(policy.delta_star), 100))
    for delta in deltas:
        x = rng.uniform(-100, 100, 1000)
        i = rng.integers(1, 3, x.size)
        bound = psi(delta, policy, warn=False)
        f = np.abs(truncated_drift(x, i, delta, spec, policy, warn=False))
        g = truncated_diffusion(x, delta, spec, policy, warn=False)
        assert np.all(np.maximum(f, g) <= bound)


def test_band_interior(spec, policy):
    for delta in (1e-2, 1e-3, 1e-4):
        lower, upper = policy.band(delta, warn=False)
        x = np.linspace(lower, upper, 1000)
        for i in (1, 2):
            assert np.array_equal(
                truncated_drift(x, i, delta, spec, policy, warn=False), drift_f(x, i, spec)
            )
        assert np.array_equal(
            truncated_diffusion(x, delta, spec, policy, warn=False), diffusion_g(x, spec)
        )


def test_band_is_monotone(policy):
    wide = policy.band(1e-4, warn=False)
    narrow = policy.band(1e-3, warn=False)
    assert wide[0] < narrow[0] < narrow[1] < wide[1]


def test_delta_star(spec, policy, plain_policy):
    assert policy.delta_star == approx(3 ** -1.5, abs=1e-5)
    assert plain_policy.delta_star == approx(3.0 ** -4, abs=1e-5)
    assert float(policy.mu_inverse(psi(policy.delta_star, policy, warn=False))) > 1
    # a huge constant drift pushes f below zero close to the origin
    heavy = spec.replace(regimes=(RegimeParams(0.3, 1e6, 0.1, 0.5, 1.0),) * 2)
    assert delta_star_search(heavy, TruncationPolicy(psi_exponent=2 / 3)) < 1e-6
    with raises(TruncationError):
        delta_star_search(spec, TruncationPolicy(mu_constant=1e30, psi_exponent=0.01))


def test_policy_rejects_large_steps(spec, policy):
    assert policy.check_step(1e-3) == 1e-3
    with raises(TruncationError, match="exceeds"):
        policy.check_step(0.5)
    with raises(TruncationError, match="not admissible"):
        make_policy(spec, psi_exponent=2 / 3, mu="quadratic", delta_star=0.5)
    pinned = make_policy(spec, psi_exponent=2 / 3, mu="quadratic", delta_star=0.01)
    assert pinned.delta_star == 0.01
    with raises(TruncationError):
        TruncationPolicy(psi_exponent=0.0)
    assert pinned.to_dict()["mu"] == "quadratic"


def test_khasminskii_truncated(spec, policy):
    constants = khasminskii_truncated(spec, policy)
    assert sorted(constants) == approx([1e-5, 1e-4, 1e-3, 1e-2, 1e-1])
    values = np.array(list(constants.values()))
    assert np.all(np.isfinite(values))
    assert values.max() - values.min() < 0.5


def test_audit(spec, policy, plain_spec, plain_policy):
    result = audit(spec, policy, [1e-2, 1e-3], samples=10_000)
    assert result.passed
    assert result.delta_star == policy.delta_star
    assert [row.delta for row in result.warnings] == [1e-2, 1e-3]
    assert "WARN" in str(result)
    result = audit(plain_spec, plain_policy, [1e-3, 1e-4], samples=10_000)
    assert result.passed
    assert result.warnings == []
    with raises(TruncationError):
        audit(plain_spec, plain_policy, [0.1])
