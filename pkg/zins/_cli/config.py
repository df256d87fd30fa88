"""Run configurations

A run configuration is a JSON document with the sections ``model``,
``truncation``, ``simulation`` and ``experiment``, and optionally a
top-level ``preset`` naming a built-in starting point. Sections are
resolved with the precedence flags > file > preset > defaults.
"""
import json
from copy import deepcopy
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, NewType, Union

from zins.errors import ConfigError
from zins.model import ModelSpec, preset
from zins._model.spec import _get, _number

runConf = NewType(
    "runConf", Dict[str, Dict[str, Any]]
)  #: Dict[str, Dict[str, Any]], sections of a run configuration

_defaults = runConf(
    {
        "model": {
            "tau": 1.0,
            "lambda": 1.0,
            "initial_regime": 1,
            "include_inverse_drift": True,
            "volatility": {"name": "sigmoid_s5"},
            "initial_segment": {
                "name": "constant",
                "value": 0.02,
                "holder_constant": 1.0,
                "holder_exponent": 1.0,
            },
        },
        "truncation": {"psi_exponent": 0.25, "mu": "auto", "delta_star": None},
        "simulation": {
            "delta": 1e-3,
            "horizon": 2.0,
            "num_paths": 1000,
            "seed": 0,
            "batch_size": 256,
            "threads": None,
        },
        "experiment": {
            "strike": 0.03,
            "barrier": 1.0,
            "deltas": [2.0 ** -k for k in range(7, 12)],
            "reference_delta": 2.0 ** -14,
            "p": 2.0,
            "grid_size": 10_000,
        },
    }
)  #: runConf

SECTIONS = tuple(_defaults)


def _merge(base: dict, override: dict) -> dict:
    out = deepcopy(base)
    for key, value in override.items():
        base_value = out.get(key)
        renamed = (
            isinstance(value, dict)
            and isinstance(base_value, dict)
            and "name" in value
            and value["name"] != base_value.get("name")
        )
        if renamed:
            # a registered function of another name takes other parameters
            out[key] = deepcopy(value)
        elif isinstance(value, dict) and isinstance(base_value, dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = deepcopy(value)
    return out


def _integer(value, path: str, least: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < least:
        raise ConfigError(path, f"expected an integer of at least {least}, got {value!r}")
    return value


def load(fname: Union[str, Path]) -> dict:
    "read a configuration file"
    try:
        with Path(fname).open("r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError(str(fname), f"cannot be read: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(str(fname), f"is not valid JSON: {e}") from None
    if not isinstance(document, dict):
        raise ConfigError(str(fname), "must contain an object of sections")
    return document


def resolve(document: dict = None, overrides: dict = None) -> dict:
    """merge defaults, preset, document and overrides

    args
    ----
    document: dict
        the content of a configuration file
    overrides: dict
        sections set from command line flags

    returns
    -------
    config: dict
        all sections with all defaults materialized
    """
    document = deepcopy(document or {})
    overrides = overrides or {}
    file_preset = document.pop("preset", None)
    name = overrides.get("preset") or file_preset
    unknown = set(document) - set(SECTIONS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    config = deepcopy(_defaults)
    if name:
        try:
            config = _merge(config, preset(name))
        except KeyError as e:
            raise ConfigError("preset", str(e.args[0])) from None
    config = _merge(config, document)
    config = _merge(config, {k: v for k, v in overrides.items() if k != "preset"})
    return config


@dataclass
class RunConfig:
    """a resolved configuration with its model

    args
    ----
    sections: dict
        all sections with defaults materialized
    spec: ModelSpec
        the model built from the model section
    """

    sections: dict
    spec: ModelSpec

    @classmethod
    def from_dict(cls, document: dict = None, overrides: dict = None) -> "RunConfig":
        sections = resolve(document, overrides)
        spec = ModelSpec.from_dict(sections["model"])
        sections["model"] = spec.to_dict()
        config = cls(sections, spec)
        config._check()
        return config

    @classmethod
    def from_file(cls, fname: Union[str, Path] = None, overrides: dict = None) -> "RunConfig":
        document = load(fname) if fname is not None else {}
        return cls.from_dict(document, overrides)

    def _check(self):
        for key in ("delta", "horizon"):
            _number(self.simulation, key, "simulation")
        for key, least in (("num_paths", 1), ("seed", 0), ("batch_size", 1)):
            _integer(_get(self.simulation, key, "simulation"), f"simulation.{key}", least)
        threads = self.simulation.get("threads")
        if threads is not None:
            _integer(threads, "simulation.threads", 1)
        _number(self.truncation, "psi_exponent", "truncation")
        if not isinstance(self.truncation.get("mu"), str):
            raise ConfigError("truncation.mu", "expected one of auto, quadratic, fitted")
        deltas = _get(self.experiment, "deltas", "experiment")
        if not isinstance(deltas, list) or not deltas:
            raise ConfigError("experiment.deltas", "expected a nonempty list of step sizes")
        for key in ("strike", "barrier", "reference_delta", "p"):
            _number(self.experiment, key, "experiment")

    @property
    def truncation(self) -> dict:
        return self.sections["truncation"]

    @property
    def simulation(self) -> dict:
        return self.sections["simulation"]

    @property
    def experiment(self) -> dict:
        return self.sections["experiment"]

    def dumps(self) -> str:
        "the resolved configuration as JSON"
        return json.dumps(self.sections, indent=1, sort_keys=True)
