"""Job configuration: JSON schema, strict loading and conversion to library objects."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .errors import ArgumentError, ConfigError
from .rkhs import DiagonalKernelSpec, MonomialIdeal, TruncatedModule, build_truncated_module
from .stalk import FactoredGenerator, monomial_closure, parse_generators

_number = {"type": "number"}
_complex = {
    "oneOf": [
        _number,
        {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
    ]
}
_point = {"type": "array", "items": _complex, "minItems": 1}
_points = {"type": "array", "items": _point, "minItems": 1}
_exponent = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}
_poly_terms = {
    "type": "array",
    "items": {"type": "array", "prefixItems": [_exponent, _complex], "minItems": 2, "maxItems": 2},
    "minItems": 1,
}
_poly = {"oneOf": [{"type": "string", "minLength": 1}, _poly_terms, _number]}


def _task(type_name: str, props: dict, required=()) -> dict:
    return {
        "type": "object",
        "properties": {"id": {"type": "string"}, "type": {"const": type_name}, **props},
        "required": ["id", "type", *required],
        "additionalProperties": False,
    }


KERNEL_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"enum": ["hardy", "bergman", "power"]},
        "m": {"type": "integer", "minimum": 1},
        "lambda": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
    },
    "required": ["family"],
    "additionalProperties": False,
}

IDEAL_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"monomials": {"type": "array", "items": _exponent, "minItems": 1}},
            "required": ["monomials"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"vanish_at_origin": {"const": True}},
            "required": ["vanish_at_origin"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"full": {"const": True}},
            "required": ["full"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "factored": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {"monomial": _exponent, "unit": _poly},
                        "required": ["monomial"],
                        "additionalProperties": False,
                    },
                }
            },
            "required": ["factored"],
            "additionalProperties": False,
        },
    ]
}

TOLERANCE_SCHEMA = {
    "type": "object",
    "properties": {
        "rank": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "jet_order": {"const": 2},
        "starvation": {"type": "number", "exclusiveMinimum": 0},
        "compare": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

TASK_SCHEMA = {
    "oneOf": [
        _task(
            "joint_kernel_grid",
            {"extent": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}, "size": {"type": "integer", "minimum": 1}},
            ("extent", "size"),
        ),
        _task("joint_kernel", {"points": _points}, ("points",)),
        _task("curvature", {"base_point": _point, "convention": {"enum": ["jet", "line-bundle-sign"]}}, ("base_point",)),
        _task("gleason", {"points": _points}, ("points",)),
        _task("stalk", {"points": _points}, ("points",)),
        _task("characteristic_space", {"cap": {"type": "integer", "minimum": 0}, "tilde": {"type": "boolean"}}, ("cap",)),
        _task(
            "frame_identities",
            {"base_point": _point, "points": _points, "order": {"type": "integer", "minimum": 1}},
            ("base_point", "points"),
        ),
        _task(
            "privilege",
            {
                "matrix": {"type": "array", "items": {"type": "array", "items": _poly, "minItems": 1}, "minItems": 1},
                "domain": {"enum": ["polydisc", "ball"]},
                "density": {"type": "integer", "minimum": 8},
            },
            ("matrix", "domain"),
        ),
        _task(
            "nk_curvature",
            {
                "n": {"type": "integer", "minimum": 2},
                "k": {"type": "integer", "minimum": 1},
                "thetas": {"type": "array", "items": _complex, "minItems": 1},
                "step": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.1},
            },
            ("n", "k", "thetas"),
        ),
        _task(
            "section_limit",
            {"n": {"type": "integer", "minimum": 2}, "k": {"type": "integer", "minimum": 1}, "theta": _complex},
            ("n", "k", "theta"),
        ),
    ]
}

RUN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "hilmod.config/run/1",
    "type": "object",
    "properties": {
        "kernel": KERNEL_SCHEMA,
        "ideal": IDEAL_SCHEMA,
        "truncation": {"type": "integer", "minimum": 2},
        "tolerances": TOLERANCE_SCHEMA,
        "tasks": {"type": "array", "items": TASK_SCHEMA},
    },
    "required": ["kernel", "ideal", "truncation", "tasks"],
    "additionalProperties": False,
}

_MODULE_BLOCK = {
    "type": "object",
    "properties": {"kernel": KERNEL_SCHEMA, "ideal": IDEAL_SCHEMA, "truncation": {"type": "integer", "minimum": 2}},
    "required": ["kernel", "ideal", "truncation"],
    "additionalProperties": False,
}

COMPARE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "hilmod.config/compare/1",
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "modules": {"type": "array", "items": _MODULE_BLOCK, "minItems": 2, "maxItems": 2},
                "base_point": _point,
                "tolerances": TOLERANCE_SCHEMA,
            },
            "required": ["modules", "base_point"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "nk": {
                    "type": "object",
                    "properties": {
                        "first": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                        "second": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                        "theta": _complex,
                    },
                    "required": ["first", "second", "theta"],
                    "additionalProperties": False,
                },
                "tolerances": TOLERANCE_SCHEMA,
            },
            "required": ["nk"],
            "additionalProperties": False,
        },
    ],
}

DEFAULT_TOLERANCES = {"rank": 1e-9, "jet_order": 2, "starvation": 1e-10, "compare": 1e-8}


def _reject_constant(name):
    raise ConfigError(f"non-finite number {name} in config")


def _finite_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ConfigError(f"non-finite number {text} in config")
    return value


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text, parse_constant=_reject_constant, parse_float=_finite_float)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def validate(data: dict, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {err.message}")


def parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def parse_point(value) -> list[complex]:
    return [parse_complex(v) for v in value]


def kernel_from_config(block: dict) -> DiagonalKernelSpec:
    fam = block["family"]
    if fam == "power":
        if "lambda" not in block:
            raise ConfigError("power kernel needs 'lambda'")
        if "m" in block and block["m"] != len(block["lambda"]):
            raise ConfigError("'m' disagrees with the length of 'lambda'")
        return DiagonalKernelSpec.power(*block["lambda"])
    if "lambda" in block:
        raise ConfigError(f"{fam} kernel takes no 'lambda'")
    m = block.get("m", 2)
    return DiagonalKernelSpec.hardy(m) if fam == "hardy" else DiagonalKernelSpec.bergman(m)


@dataclass(frozen=True)
class ModuleSetup:
    spec: DiagonalKernelSpec
    generators: tuple  # FactoredGenerator list (unit witnesses kept)
    ideal: MonomialIdeal
    module: TruncatedModule


def ideal_from_config(block: dict, m: int) -> list[FactoredGenerator]:
    if "monomials" in block:
        gens = parse_generators(block["monomials"], m)
    elif "vanish_at_origin" in block:
        gens = parse_generators(MonomialIdeal.vanish_at_origin(m).generators, m)
    elif "full" in block:
        gens = parse_generators(MonomialIdeal.full(m).generators, m)
    else:
        gens = parse_generators(block["factored"], m)
    return gens


def module_from_config(block: dict) -> ModuleSetup:
    try:
        spec = kernel_from_config(block["kernel"])
        gens = ideal_from_config(block["ideal"], spec.m)
        ideal = monomial_closure(gens)
        module = build_truncated_module(spec, ideal, block["truncation"])
    except ArgumentError as exc:
        if isinstance(exc, Exception) and exc.__class__.__name__ == "TruncationTooSmallError":
            raise
        raise ConfigError(str(exc)) from exc
    return ModuleSetup(spec, tuple(gens), ideal, module)


def tolerances(block: dict | None) -> dict:
    out = dict(DEFAULT_TOLERANCES)
    out.update(block or {})
    return out
