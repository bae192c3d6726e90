"""Run configuration: a JSON file with nested sections, plus flag overrides.

Required sections are ``model``, ``theta_true`` and ``scheme``; everything
else defaults.  Unknown keys are rejected so typos fail loudly.  ``resolve``
returns the fully defaulted dictionary, which every CLI run echoes next to its
outputs for provenance; ``parse_config(emit(cfg))`` reproduces the config
exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .model import FAMILIES, ModelSpec, SamplingScheme, ThetaPoint

PAPER_SCALE = {"n": 1_000_000, "h": 1e-4, "replications": 10_000}

_SECTION_KEYS = {
    "model": {"family", "c", "dim", "theta1_box", "theta2_box"},
    "theta_true": {"theta1", "theta2"},
    "scheme": {"n", "h"},
    "init": {"mode"},
    "estimate": {"m0", "burn_in", "max_iterations"},
    "mc": {"replications", "scenario", "base_seed", "workers", "gamma0"},
}
_TOP_KEYS = set(_SECTION_KEYS) | {"seed", "out"}

_DEFAULTS = {
    "init": {"mode": "zero"},
    "estimate": {"m0": 0.0, "burn_in": 0, "max_iterations": 500},
    "mc": {"replications": 200, "scenario": "i", "base_seed": 0, "workers": 1,
           "gamma0": 0.1},
    "seed": 0,
    "out": ".",
}


def _reject_unknown(section: str, data: dict, allowed: set) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(
            f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with the model and scheme already built."""

    spec: ModelSpec
    theta_true: ThetaPoint
    scheme: SamplingScheme
    seed: int
    init: str
    m0: float
    burn_in: int
    max_iterations: int
    replications: int
    scenario: str
    base_seed: int
    workers: int
    gamma0: float
    out: str
    resolved: dict

    def emit(self) -> dict:
        return json.loads(json.dumps(self.resolved))


def _build_spec(model: dict) -> ModelSpec:
    _reject_unknown("model", model, _SECTION_KEYS["model"])
    family = model.get("family")
    if family not in FAMILIES:
        raise ConfigurationError(
            f"model.family must be one of {sorted(FAMILIES)}, got {family!r}")
    kwargs = {}
    if family == "scalar":
        if "dim" in model:
            raise ConfigurationError("model.dim applies only to the diagonal family")
        if "c" in model:
            kwargs["c"] = float(model["c"])
    else:
        if "c" in model:
            raise ConfigurationError("model.c applies only to the scalar family")
        if "dim" in model:
            kwargs["d"] = int(model["dim"])
    if "theta1_box" in model:
        kwargs["theta1_box"] = model["theta1_box"]
    if "theta2_box" in model:
        kwargs["theta2_box"] = model["theta2_box"]
    return FAMILIES[family](**kwargs)


def parse_config(path: str | Path | None = None, data: dict | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Load, validate and fully default a configuration.

    ``overrides`` maps {"seed", "out", "workers", "paper_scale"} from command
    line flags over the file values.
    """
    if data is None:
        if path is None:
            raise ConfigurationError("a config file or config data is required")
        p = Path(path)
        if not p.exists():
            raise ConfigurationError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    _reject_unknown("config", data, _TOP_KEYS)
    for sec in ("model", "theta_true", "scheme"):
        if sec not in data:
            raise ConfigurationError(f"missing required config section: {sec}")
        if not isinstance(data[sec], dict):
            raise ConfigurationError(f"config section {sec} must be an object")
    overrides = overrides or {}

    spec = _build_spec(data["model"])

    _reject_unknown("theta_true", data["theta_true"], _SECTION_KEYS["theta_true"])
    try:
        theta_true = ThetaPoint(np.asarray(data["theta_true"]["theta1"], dtype=float),
                                np.asarray(data["theta_true"]["theta2"], dtype=float))
    except KeyError as exc:
        raise ConfigurationError(f"theta_true is missing key {exc}") from exc
    if theta_true.theta1.shape != (spec.m1,) or theta_true.theta2.shape != (spec.m2,):
        raise ConfigurationError(
            f"theta_true must have {spec.m1} theta1 and {spec.m2} theta2 coordinates")
    if not spec.contains(theta_true):
        raise ConfigurationError("theta_true lies outside the parameter boxes")

    _reject_unknown("scheme", data["scheme"], _SECTION_KEYS["scheme"])
    sch = dict(data["scheme"])
    mc_in = dict(_DEFAULTS["mc"], **data.get("mc", {}))
    _reject_unknown("mc", data.get("mc", {}), _SECTION_KEYS["mc"])
    if overrides.get("paper_scale"):
        sch = {"n": PAPER_SCALE["n"], "h": PAPER_SCALE["h"]}
        mc_in["replications"] = PAPER_SCALE["replications"]
    if "n" not in sch or "h" not in sch:
        raise ConfigurationError("scheme requires keys n and h")
    scheme = SamplingScheme(n=sch["n"], h=float(sch["h"]))

    init = dict(_DEFAULTS["init"], **data.get("init", {}))
    _reject_unknown("init", data.get("init", {}), _SECTION_KEYS["init"])
    if init["mode"] not in ("zero", "stationary-x"):
        raise ConfigurationError(
            f"init.mode must be 'zero' or 'stationary-x', got {init['mode']!r}")

    est = dict(_DEFAULTS["estimate"], **data.get("estimate", {}))
    _reject_unknown("estimate", data.get("estimate", {}), _SECTION_KEYS["estimate"])
    if not 0 <= int(est["burn_in"]) < scheme.n:
        raise ConfigurationError("estimate.burn_in must lie in [0, n)")

    seed = int(overrides.get("seed", data.get("seed", _DEFAULTS["seed"])))
    out = str(overrides.get("out") or data.get("out", _DEFAULTS["out"]))
    workers = int(overrides.get("workers") or mc_in["workers"])

    resolved = {
        "model": dict(data["model"]),
        "theta_true": {"theta1": [float(v) for v in theta_true.theta1],
                       "theta2": [float(v) for v in theta_true.theta2]},
        "scheme": {"n": scheme.n, "h": scheme.h},
        "init": init,
        "estimate": {"m0": float(est["m0"]), "burn_in": int(est["burn_in"]),
                     "max_iterations": int(est["max_iterations"])},
        "mc": {"replications": int(mc_in["replications"]), "scenario": mc_in["scenario"],
               "base_seed": int(mc_in["base_seed"]), "workers": workers,
               "gamma0": float(mc_in["gamma0"])},
        "seed": seed,
        "out": out,
    }
    resolved["model"].setdefault("theta1_box", [[float(a), float(b)] for a, b in spec.theta1_box])
    resolved["model"].setdefault("theta2_box", [[float(a), float(b)] for a, b in spec.theta2_box])

    return RunConfig(spec=spec, theta_true=theta_true, scheme=scheme, seed=seed,
                     init=init["mode"], m0=float(est["m0"]), burn_in=int(est["burn_in"]),
                     max_iterations=int(est["max_iterations"]),
                     replications=int(mc_in["replications"]), scenario=str(mc_in["scenario"]),
                     base_seed=int(mc_in["base_seed"]), workers=workers,
                     gamma0=float(mc_in["gamma0"]), out=out, resolved=resolved)
