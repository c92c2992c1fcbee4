"""Scenario documents (JSON) and the built-in presets."""
import copy
import dataclasses
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import ValidationError
from .model import LtiSystem, Scenario, TimeDomain, UncertaintyBounds
from .observer import DesignBundle, synthesize
from .signals import vector_signal
from .simulation import SimulationConfig
from .sylvester import design_from_T

_matrix = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
}
_vector = {"type": "array", "minItems": 1, "items": {"type": "number"}}
_signals = {
    "type": "array",
    "minItems": 1,
    "items": {"type": ["string", "number"]},
}

SCHEMA = {
    "type": "object",
    "required": ["domain", "F", "D", "H", "W", "bounds", "signals", "x0"],
    "properties": {
        "name": {"type": "string"},
        "domain": {"enum": ["ct", "dt", "CT", "DT"]},
        "F": _matrix,
        "D": _matrix,
        "H": _matrix,
        "W": _matrix,
        "bounds": {
            "type": "object",
            "required": ["x0_upper", "x0_lower", "d_upper", "d_lower", "w_upper", "w_lower"],
            "properties": {
                "x0_upper": _vector,
                "x0_lower": _vector,
                "d_upper": _signals,
                "d_lower": _signals,
                "w_upper": _signals,
                "w_lower": _signals,
            },
            "additionalProperties": False,
        },
        "signals": {
            "type": "object",
            "required": ["u", "d", "w"],
            "properties": {"u": _signals, "d": _signals, "w": _signals},
            "additionalProperties": False,
        },
        "x0": _vector,
        "design": {
            "type": "object",
            "properties": {
                "A_o": _matrix,
                "B_o": _matrix,
                "basis": {"enum": ["pivot", "orthonormal"]},
                "seed": {"type": "integer"},
                "tolerances": {
                    "type": "object",
                    "properties": {
                        "rank_rtol": {"type": "number", "exclusiveMinimum": 0},
                        "t_rcond_min": {"type": "number", "exclusiveMinimum": 0},
                        "cond_max": {"type": "number", "exclusiveMinimum": 0},
                        "certificate_tol": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "additionalProperties": False,
                },
                "test_hooks": {
                    "type": "object",
                    "properties": {"corrupt_T": {"type": "number"}},
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "simulation": {
            "type": "object",
            "properties": {
                "steps": {"type": "integer", "minimum": 1},
                "tfinal": {"type": "number", "exclusiveMinimum": 0},
                "ct_step": {"type": "number", "exclusiveMinimum": 0},
                "record_stride": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "trials": {"type": "integer", "minimum": 1},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


DT_PRESET = {
    "name": "paper-dt",
    "domain": "dt",
    "F": [[-1, 0, 1, 0], [1, -0.5, -1, 1], [0, 0, 0, -1], [0, 0, -1, 0]],
    "D": [[1], [0], [0], [0]],
    "H": [[1, 0, 1, 1]],
    "W": [[1]],
    "bounds": {
        "x0_upper": [1, 1, 1, 1],
        "x0_lower": [-1, -1, -1, -1],
        "d_upper": ["0.02"],
        "d_lower": ["-0.02"],
        "w_upper": ["0.01"],
        "w_lower": ["-0.01"],
    },
    "signals": {
        "u": ["sin(1*t)", "0", "-0.5*cos(1*t)", "0"],
        "d": ["0.02*cos(5*t)"],
        "w": ["0.01*sin(20*t)"],
    },
    "x0": [0, 0, 0, 0],
    "design": {
        "A_o": [[0.1, 0, 0], [0, 0.2, 0], [0, 0, 0.3]],
        "B_o": [[1], [1], [1]],
        "basis": "pivot",
    },
    "simulation": {"steps": 300},
}

CT_PRESET = {
    "name": "paper-ct",
    "domain": "ct",
    "F": [[-1, 0], [1, -2]],
    "D": [[1], [0]],
    "H": [[1, 0]],
    "W": [[1]],
    "bounds": {
        "x0_upper": [1, 1],
        "x0_lower": [-1, -1],
        "d_upper": ["0.02"],
        "d_lower": ["-0.02"],
        "w_upper": ["0.01"],
        "w_lower": ["-0.01"],
    },
    "signals": {
        "u": ["sin(1*t)", "0"],
        "d": ["0.02*cos(5*t)"],
        "w": ["0.01*sin(20*t)"],
    },
    "x0": [0.5, -0.5],
    "design": {"A_o": [[-3]], "B_o": [[1]], "basis": "pivot"},
    "simulation": {"tfinal": 10, "ct_step": 0.001},
}

PRESETS = {"paper-dt": DT_PRESET, "paper-ct": CT_PRESET}


def preset(name):
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass
class DesignOptions:
    A_o: np.ndarray = None
    B_o: np.ndarray = None
    basis: str = "pivot"
    seed: int = 0
    rank_rtol: float = 1e-9
    t_rcond_min: float = 1e-9
    cond_max: float = 1e6
    certificate_tol: float = 1e-10
    corrupt_T: float = 0.0


@dataclass
class LoadedConfig:
    scenario: Scenario
    design: DesignOptions
    simulation: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def validate_document(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config schema violation at {path}: {exc.message}") from None


def from_document(doc):
    """Build the scenario and design options from a parsed config document."""
    validate_document(doc)
    system = LtiSystem(doc["domain"], doc["F"], doc["D"], doc["H"], doc["W"])
    b = doc["bounds"]
    bounds = UncertaintyBounds(
        x0_upper=b["x0_upper"],
        x0_lower=b["x0_lower"],
        d_upper=vector_signal(b["d_upper"]),
        d_lower=vector_signal(b["d_lower"]),
        w_upper=vector_signal(b["w_upper"]),
        w_lower=vector_signal(b["w_lower"]),
    )
    s = doc["signals"]
    scenario = Scenario(system, bounds, vector_signal(s["u"]), vector_signal(s["d"]),
                        vector_signal(s["w"]), doc["x0"])
    d = doc.get("design", {})
    tol = d.get("tolerances", {})
    opts = DesignOptions(
        A_o=None if "A_o" not in d else np.array(d["A_o"], dtype=float),
        B_o=None if "B_o" not in d else np.array(d["B_o"], dtype=float),
        basis=d.get("basis", "pivot"),
        seed=d.get("seed", 0),
        corrupt_T=d.get("test_hooks", {}).get("corrupt_T", 0.0),
        **tol,
    )
    return LoadedConfig(scenario, opts, dict(doc.get("simulation", {})), doc)


def load_config(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return from_document(doc)


def simulation_config(loaded, **overrides):
    """SimulationConfig from the document's ``simulation`` section plus overrides.

    ``steps`` and ``tfinal`` both set the horizon: a step count converts to
    a final time in continuous time and a final time rounds to a step count
    in discrete time. An override replaces both document values.
    """
    sim = dict(loaded.simulation)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if "steps" in overrides or "tfinal" in overrides:
        sim.pop("steps", None)
        sim.pop("tfinal", None)
    sim.update(overrides)
    steps, tfinal = sim.pop("steps", None), sim.pop("tfinal", None)
    cfg = SimulationConfig(**sim)
    if loaded.scenario.system.domain == TimeDomain.DT:
        horizon = steps if steps is not None else tfinal
    else:
        horizon = tfinal if tfinal is not None else (None if steps is None else steps * cfg.ct_step)
    if horizon is not None:
        cfg = dataclasses.replace(cfg, horizon=horizon)
    return cfg


def design_bundle(loaded):
    """Run the offline design for a loaded config, honouring the test hooks."""
    opts = loaded.design
    sys = loaded.scenario.system
    bundle = synthesize(sys, A_o=opts.A_o, B_o=opts.B_o, basis=opts.basis,
                        rank_tol=opts.rank_rtol, seed=opts.seed,
                        rcond_min=opts.t_rcond_min, cond_max=opts.cond_max)
    if opts.corrupt_T:
        d = bundle.design
        T_bad = d.T + opts.corrupt_T * np.abs(d.T).max() * np.ones_like(d.T)
        bad = design_from_T(bundle.dec, d.A_o, d.B_o, T_bad, sys.W, d.seed)
        bundle = DesignBundle(sys, bundle.dec, bad, bundle.jt)
    return bundle
