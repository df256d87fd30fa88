from pytest import fixture

from zins.model import InitialSegment, ModelSpec, RegimeParams, library, make_volatility
from zins.truncation import make_policy


def single_regime(alphas, **kwargs) -> ModelSpec:
    "a model with one regime, ρ = 2 and θ = 1.25 unless given"
    kwargs.setdefault("rho", 2.0)
    kwargs.setdefault("theta", 1.25)
    return ModelSpec(regimes=(RegimeParams(*alphas),), **kwargs)


@fixture(scope="session")
def spec():
    "the two-regime sigmoid example with the inverse drift"
    return library.sigmoid_two_regime


@fixture(scope="session")
def policy(spec):
    return make_policy(spec, psi_exponent=2 / 3, mu="quadratic")


@fixture(scope="session")
def plain_spec():
    return library.sigmoid_two_regime_no_inverse


@fixture(scope="session")
def plain_policy(plain_spec):
    return make_policy(plain_spec, psi_exponent=0.25, mu="auto")


@fixture(scope="session")
def benign_spec():
    "mean reverting to x = 1 with multiplicative noise, paths stay positive"
    return single_regime(
        (1.0, 1.0, 1.0, 1.0),
        jump_intensity=0.0,
        volatility=make_volatility("constant", level=0.5),
        initial_segment=InitialSegment("constant", (("value", 1.0),)),
    )


@fixture(scope="session")
def benign_policy(benign_spec):
    return make_policy(benign_spec, psi_exponent=1.0, mu="quadratic")


@fixture(scope="session")
def ode_spec():
    "no noise, dx = (-0.1 + x - x²) dt from 0.5 towards the root 0.887"
    return single_regime(
        (0.0, 0.1, 1.0, 1.0),
        jump_intensity=0.0,
        volatility=make_volatility("zero"),
        initial_segment=InitialSegment("constant", (("value", 0.5),)),
        include_inverse_drift=False,
    )


@fixture(scope="session")
def ode_policy(ode_spec):
    return make_policy(ode_spec, psi_exponent=1.0, mu="quadratic")


@fixture(scope="session")
def constant_spec():
    "every coefficient vanishes, so every path stays at ξ = 0.02"
    return single_regime(
        (0.0, 0.0, 0.0, 0.0),
        jump_intensity=0.0,
        volatility=make_volatility("zero"),
        include_inverse_drift=False,
    )


@fixture(scope="session")
def constant_policy(constant_spec):
    return make_policy(constant_spec, psi_exponent=0.25, mu="quadratic")


@fixture(scope="session")
def driftless_spec():
    "f ≡ 0 with delayed noise and jumps"
    return single_regime(
        (0.0, 0.0, 0.0, 0.0, 0.5),
        jump_intensity=1.0,
        volatility=make_volatility("constant", level=0.1),
        include_inverse_drift=False,
    )


@fixture(scope="session")
def driftless_policy(driftless_spec):
    return make_policy(driftless_spec, psi_exponent=1.0, mu="quadratic")
