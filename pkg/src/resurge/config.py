"""Run configuration: JSON schema, defaults and conversion to engine configs."""

import copy
import json
import math

import jsonschema

from . import __version__
from .alien import AlienConfig
from .errors import ConfigError
from .germ import ALIASES, PRESETS
from .grid import GridConfig
from .horn import OracleConfig

CONFIG_VERSION = 1
PRESET_NAMES = sorted(PRESETS) + sorted(ALIASES)

_number = {"type": "number"}
_coeff = {"oneOf": [{"type": "number"}, {"type": "string"},
                    {"type": "array", "items": {"type": ["string", "number"]}, "minItems": 2, "maxItems": 2}]}
_coeffs = {"type": "array", "items": _coeff, "minItems": 1}

GERM_SCHEMA = {
    "oneOf": [
        {"type": "string", "enum": PRESET_NAMES},
        {"type": "object", "required": ["type", "name"], "additionalProperties": False,
         "properties": {"type": {"const": "preset"}, "name": {"enum": PRESET_NAMES}}},
        {"type": "object", "required": ["type", "num"], "additionalProperties": False,
         "properties": {"type": {"enum": ["rational_infinity", "rational_origin"]}, "num": _coeffs,
                        "den": _coeffs, "name": {"type": "string"}}},
        {"type": "object", "required": ["type", "coeffs"], "additionalProperties": False,
         "properties": {"type": {"const": "polynomial_origin"}, "coeffs": _coeffs, "name": {"type": "string"}}},
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "germ": GERM_SCHEMA,
        "m_list": {"type": "array", "items": {"type": "integer", "not": {"const": 0}}, "minItems": 1},
        "k_max": {"type": "integer", "minimum": 0, "maximum": 200},
        "D": {"type": "integer", "minimum": 8, "maximum": 800},
        "precision_bits": {"type": "integer", "minimum": 53, "maximum": 4096},
        "quadrature": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "panel_nodes": {"type": "integer", "minimum": 4, "maximum": 200},
                "product_nodes": {"type": "integer", "minimum": 4, "maximum": 200},
                "grading_ratio": {"const": 0.5},
                "min_panel": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.1},
                "max_panel": {"type": "number", "exclusiveMinimum": 0},
                "lattice_ratio": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "guard_bits": {"type": "integer", "minimum": 16},
                "estimate_errors": {"type": "boolean"},
            },
        },
        "oracle": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "H": {"type": "number", "minimum": 2}, "M": {"type": "integer", "minimum": 4},
                "n_escape": {"type": "integer", "minimum": 1}, "R_big": _number,
                "J_opt": {"type": "integer", "minimum": 2}, "precision": {"type": "integer", "minimum": 53},
                "modes": {"type": "integer", "minimum": 1},
            },
        },
        "path_override": {"oneOf": [{"type": "null"},
                                    {"type": "array", "minItems": 2,
                                     "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}}]},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "output": {"type": "string"},
    },
    "required": ["germ"],
}

DEFAULTS = {
    "version": CONFIG_VERSION,
    "m_list": [1, -1],
    "k_max": 12,
    "D": 64,
    "precision_bits": 160,
    "quadrature": {"panel_nodes": 16, "product_nodes": 24, "grading_ratio": 0.5, "min_panel": 2.0 ** -40,
                   "max_panel": 1.0, "lattice_ratio": 1.0, "guard_bits": 64, "estimate_errors": True},
    "oracle": {"H": 2.5, "M": 64, "n_escape": 100000, "R_big": 40.0, "J_opt": 60, "precision": 53, "modes": 4},
    "path_override": None,
    "tolerance": 1e-3,
    "output": "resurge-out",
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def validate(raw):
    """Schema-check ``raw`` and return it with every default filled in."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    cfg = _merge(DEFAULTS, raw)
    M = cfg["oracle"]["M"]
    if M & (M - 1):
        raise ConfigError(f"oracle.M must be a power of two, got {M}")
    if cfg["path_override"] is not None and len(cfg["m_list"]) != 1:
        raise ConfigError("path_override needs exactly one entry in m_list")
    return cfg


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return raw


def grid_config(cfg):
    q = cfg["quadrature"]
    depth = max(1, math.ceil(-math.log2(q["min_panel"])))
    return GridConfig(q["panel_nodes"], q["product_nodes"], depth, q["max_panel"], q["lattice_ratio"])


def alien_config(cfg, cache=None):
    q = cfg["quadrature"]
    return AlienConfig(grid_config(cfg), q["guard_bits"], estimate_errors=q["estimate_errors"], cache=cache)


def oracle_config(cfg):
    o = cfg["oracle"]
    return OracleConfig(float(o["H"]), o["M"], o["n_escape"], float(o["R_big"]), o["J_opt"], o["precision"], o["modes"])


def record_header(cfg):
    return {"tool": "resurge", "version": __version__, "config": cfg}
