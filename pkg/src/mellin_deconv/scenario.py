"""JSON scenario files: schema, validation and conversion to :class:`Scenario`."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .adaptive import SelectionConfig
from .functionals import parse_functional
from .mellin import parse_model
from .simulation import FixedK, OracleK, PowerK, Scenario

__all__ = ["SCHEMA", "ScenarioError", "validate", "scenario_from_dict", "load_scenario"]

_POS_INT = {"type": "integer", "minimum": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Monte Carlo scenario",
    "type": "object",
    "additionalProperties": False,
    "required": ["target", "error", "functional", "c", "replications", "seed", "selection"],
    "oneOf": [{"required": ["n"]}, {"required": ["n_list"]}],
    "properties": {
        "target": {"type": "string", "description": "law of X, e.g. beta:2 or exp"},
        "error": {"type": "string", "description": "law of U, e.g. beta:1"},
        "functional": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "x0"],
            "properties": {
                "kind": {"enum": ["density", "cdf", "survival", "laplace"]},
                "x0": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "c": {"type": "number"},
        "n": _POS_INT,
        "n_list": {"type": "array", "items": _POS_INT, "minItems": 1},
        "replications": _POS_INT,
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "smoothness": {"type": "number", "exclusiveMinimum": 0},
        "selection": {
            "type": "object",
            "required": ["mode"],
            "oneOf": [
                {"additionalProperties": False, "required": ["k"],
                 "properties": {"mode": {"const": "fixed"},
                                "k": {"type": "number", "exclusiveMinimum": 0}}},
                {"additionalProperties": False, "required": ["exponent"],
                 "properties": {"mode": {"const": "power"}, "exponent": {"type": "number"},
                                "scale": {"type": "number", "exclusiveMinimum": 0}}},
                {"additionalProperties": False, "required": ["grid"],
                 "properties": {"mode": {"const": "oracle"},
                                "grid": {"type": "array", "minItems": 1,
                                         "items": {"type": "number", "exclusiveMinimum": 0}},
                                "rule": {"enum": ["min", "one_se"]}}},
                {"additionalProperties": False,
                 "properties": {"mode": {"const": "adaptive"},
                                "chi": {"type": "number", "minimum": 0},
                                "grid": {"enum": ["theoretical", "practical"]},
                                "max_k": {"type": ["integer", "null"], "minimum": 1}}},
            ],
        },
    },
}


class ScenarioError(ValueError):
    """Schema violation; `path` is the JSON pointer of the offending value."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def validate(doc: dict) -> None:
    """Check `doc` against :data:`SCHEMA`; raises :class:`ScenarioError`."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        raise ScenarioError(error.message, _pointer(error.absolute_path))


def _selection(sel: dict):
    mode = sel["mode"]
    if mode == "fixed":
        return FixedK(float(sel["k"]))
    if mode == "power":
        return PowerK(float(sel["exponent"]), float(sel.get("scale", 1.0)))
    if mode == "oracle":
        return OracleK(tuple(sel["grid"]), sel.get("rule", "min"))
    return SelectionConfig(float(sel.get("chi", 72.0)), sel.get("grid", "practical"),
                           sel.get("max_k"))


def _at(path: str, fn, *args, **kwargs):
    # plain ValueErrors become schema errors at `path`; domain errors pass through
    try:
        return fn(*args, **kwargs)
    except ValueError as exc:
        if type(exc) is ValueError:
            raise ScenarioError(str(exc), path) from exc
        raise


def scenario_from_dict(doc: dict) -> tuple[Scenario, list | None]:
    """Validated :class:`Scenario` plus the ``n_list`` (``None`` for a single ``n``)."""
    validate(doc)
    n_list = [int(n) for n in doc["n_list"]] if "n_list" in doc else None
    fn = doc["functional"]
    target = _at("/target", parse_model, doc["target"])
    error = _at("/error", parse_model, doc["error"])
    functional = _at("/functional", parse_functional, fn["kind"], fn["x0"])
    selection = _at("/selection", _selection, doc["selection"])
    scenario = _at("", Scenario, target=target, error=error, functional=functional,
                   c=float(doc["c"]), n=int(doc["n"]) if "n" in doc else n_list[0],
                   replications=int(doc["replications"]), seed=int(doc["seed"]),
                   selection=selection, smoothness=doc.get("smoothness"))
    return scenario, n_list


def load_scenario(path) -> tuple[Scenario, list | None, dict]:
    """Read and validate a scenario file; also returns the raw document."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno}: {exc.msg}", "") from exc
    scenario, n_list = scenario_from_dict(doc)
    return scenario, n_list, doc
