"""Specifying the hybrid delay model
"""
from copy import deepcopy
from types import SimpleNamespace
from typing import Any, Dict, NewType

from zins._model.spec import ModelSpec, RegimeParams, InitialSegment, SEGMENTS
from zins._model.volatility import (
    VolatilitySpec,
    REGISTRY,
    SIGMOID_BOUND,
    make_volatility,
    sigmoid_volatility,
)
from zins._model.coefficients import drift_f, drift_derivative, diffusion_g, jump_h
from zins._model.validation import (
    Check,
    ValidationReport,
    validate_assumptions,
    khasminskii_check,
    volatility_lipschitz,
)

presetConf = NewType(
    "presetConf", Dict[str, Dict[str, Any]]
)  #: Dict[str, Dict[str, Any]], preset names and their configuration sections

_two_regime = {
    "regimes": [
        {"alpha_m1": 0.3, "alpha_0": 0.2, "alpha_1": 0.1, "alpha_2": 0.5, "alpha_3": 1.0},
        {"alpha_m1": 0.2, "alpha_0": 0.3, "alpha_1": 0.2, "alpha_2": 0.6, "alpha_3": 2.0},
    ],
    "rho": 2.0,
    "theta": 1.25,
    "tau": 1.0,
    "lambda": 1.0,
    "volatility": {"name": "sigmoid_s5"},
    "initial_segment": {"name": "constant", "value": 0.02},
    "initial_regime": 1,
    "include_inverse_drift": True,
    "generator": [[-2.0, 2.0], [1.0, -1.0]],
}

_defaults = presetConf(
    {
        "sigmoid-two-regime": {
            "model": _two_regime,
            "truncation": {"psi_exponent": 2 / 3, "mu": "quadratic"},
        },
        "sigmoid-two-regime-no-inverse": {
            "model": {**_two_regime, "include_inverse_drift": False},
            "truncation": {"psi_exponent": 2 / 3, "mu": "quadratic"},
        },
        "ait-sahalia": {
            "model": {
                "regimes": [
                    {"alpha_m1": 0.3, "alpha_0": 0.2, "alpha_1": 0.1, "alpha_2": 0.5}
                ],
                "rho": 2.0,
                "theta": 1.25,
                "lambda": 0.0,
                "volatility": {"name": "constant", "level": 0.1},
                "generator": [[0.0]],
            },
            "truncation": {"psi_exponent": 0.25, "mu": "auto"},
        },
    }
)  #: presetConf


def preset(name: str) -> Dict[str, Any]:
    """a copy of the configuration sections of a preset

    args
    ----
    name: str
        one of the keys of :data:`_defaults`, dashes or underscores

    returns
    -------
    sections: dict
        with keys ``model`` and ``truncation``
    """
    key = name.replace("_", "-")
    if key not in _defaults:
        raise KeyError(f"{name} is not a preset, choose from {', '.join(_defaults)}")
    return deepcopy(_defaults[key])


def make_library(settings: presetConf = _defaults, failraise=False) -> SimpleNamespace:
    """create a library of model specifications from a dictionary of presets

    args
    ----
    settings:
        preset names with their configuration sections, the ``model`` section
        is converted with :meth:`ModelSpec.from_dict`
    failraise:bool
        raise an exception if a preset has no model section. defaults to False

    returns
    -------

    library:
        a ModelSpec per preset, addressed in dot.notation with underscores instead of dashes
    """
    lib = dict()
    for name, sections in settings.items():
        if "model" not in sections:
            if failraise:
                raise ValueError(f"{name} with {sections} can't be processed")
            continue
        lib[name.replace("-", "_")] = ModelSpec.from_dict(sections["model"])
    return SimpleNamespace(**lib)


library = make_library()

__doc__ += f"""
During import, a library of specifications is created from the presets
{', '.join(_defaults)}. They can be addressed by dot.notation from
:data:`zins.model.library`, for example like
:data:`zins.model.library.sigmoid_two_regime`.

.. automodule:: zins._model.spec
   :members: ModelSpec, RegimeParams, InitialSegment

.. automodule:: zins._model.volatility
   :members: VolatilitySpec, sigmoid_volatility, make_volatility

.. automodule:: zins._model.coefficients
   :members: drift_f, diffusion_g, jump_h

.. automodule:: zins._model.validation
   :members: validate_assumptions, khasminskii_check, volatility_lipschitz

Create libraries of specifications
..................................

"""
