"""JSON reading and writing of instances and production plans.

Instance document::

    {
      "horizon": 4,
      "levels": [{"id": "off", "layer": "off", "mode": "offline", "power": 0.0}, ...],
      "transitions": [{"id": "t0", "from": "off", "to": "off", "duration": 1,
                       "startup": false, "layer_change": false, "deep": false}, ...],
      "tau_lay": 2, "tau_mod": 3, "tau_init_lay": 0, "tau_init_mod": 0,
      "limits": {"startups": 1, "layer_changes": 4, "deep": 1},
      "initial_level": "off",
      "costs": [{"t": 1, "transition": "t0", "value": 0}, ...]
    }

``power`` is informational and optional.  Any other key is rejected.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import jsonschema

from .model import Instance, Level, PlanStep, ProductionPlan, Transition
from .monoid import Limits

_ID = {"type": ["string", "integer"]}
_NAT = {"type": "integer", "minimum": 0}

INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["horizon", "levels", "transitions", "tau_lay", "tau_mod", "tau_init_lay",
                 "tau_init_mod", "limits", "initial_level", "costs"],
    "properties": {
        "horizon": {"type": "integer", "minimum": 1},
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "layer", "mode"],
                "properties": {"id": _ID, "layer": _ID, "mode": _ID, "power": {"type": "number"}},
            },
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "from", "to", "duration", "startup", "layer_change", "deep"],
                "properties": {
                    "id": _ID, "from": _ID, "to": _ID,
                    "duration": {"type": "integer", "minimum": 1},
                    "startup": {"type": "boolean"},
                    "layer_change": {"type": "boolean"},
                    "deep": {"type": "boolean"},
                },
            },
        },
        "tau_lay": _NAT,
        "tau_mod": _NAT,
        "tau_init_lay": _NAT,
        "tau_init_mod": _NAT,
        "limits": {
            "type": "object",
            "additionalProperties": False,
            "required": ["startups", "layer_changes", "deep"],
            "properties": {"startups": _NAT, "layer_changes": _NAT, "deep": _NAT},
        },
        "initial_level": _ID,
        "costs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["t", "transition", "value"],
                "properties": {"t": {"type": "integer", "minimum": 1}, "transition": _ID,
                               "value": {"type": "number"}},
            },
        },
    },
}

PLAN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["steps"],
    "properties": {
        "cost": {"type": ["number", "null"]},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["level", "t", "transition"],
                "properties": {"level": _ID, "t": {"type": "integer"}, "transition": _ID},
            },
        },
    },
}


class InstanceFormatError(ValueError):
    """Unreadable or schema-violating document."""


def _field_path(err: jsonschema.ValidationError) -> str:
    out = "$"
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def _validate(doc, schema, source: str):
    validator = jsonschema.Draft202012Validator(schema)
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if err is not None:
        where = _field_path(err)
        if err.validator == "required":
            missing = [k for k in err.validator_value if k not in err.instance]
            where = where + "." + missing[0] if missing else where
        raise InstanceFormatError(f"{source}: schema violation at {where}: {err.message}")


def _number(v):
    v = float(v)
    return int(v) if v.is_integer() else v


def instance_to_dict(inst: Instance) -> dict:
    tids = [a.id for a in inst.transitions]
    order = {tid: i for i, tid in enumerate(tids)}
    costs = sorted(inst.costs.items(), key=lambda kv: (kv[0][0], order.get(kv[0][1], len(order))))
    return {
        "horizon": inst.horizon,
        "levels": [{"id": s.id, "layer": s.layer, "mode": s.mode, "power": _number(s.power)}
                   for s in inst.levels],
        "transitions": [
            {"id": a.id, "from": a.s_init, "to": a.s_final, "duration": a.tau,
             "startup": a.is_startup, "layer_change": a.is_layer_change, "deep": a.is_deep}
            for a in inst.transitions
        ],
        "tau_lay": inst.tau_lay,
        "tau_mod": inst.tau_mod,
        "tau_init_lay": inst.tau_init_lay,
        "tau_init_mod": inst.tau_init_mod,
        "limits": {"startups": inst.limits.n_max_startup,
                   "layer_changes": inst.limits.n_max_layer,
                   "deep": inst.limits.n_max_deep},
        "initial_level": inst.initial_level,
        "costs": [{"t": t, "transition": tid, "value": _number(v)} for (t, tid), v in costs],
    }


def instance_from_dict(doc, source: str = "<instance>") -> Instance:
    _validate(doc, INSTANCE_SCHEMA, source)
    lim = doc["limits"]
    return Instance(
        horizon=doc["horizon"],
        levels=tuple(Level(s["id"], s["layer"], s["mode"], float(s.get("power", 0.0)))
                     for s in doc["levels"]),
        transitions=tuple(
            Transition(a["id"], a["from"], a["to"], a["duration"], a["startup"],
                       a["layer_change"], a["deep"])
            for a in doc["transitions"]
        ),
        tau_lay=doc["tau_lay"],
        tau_mod=doc["tau_mod"],
        tau_init_lay=doc["tau_init_lay"],
        tau_init_mod=doc["tau_init_mod"],
        limits=Limits(lim["startups"], lim["layer_changes"], lim["deep"]),
        initial_level=doc["initial_level"],
        costs={(c["t"], c["transition"]): float(c["value"]) for c in doc["costs"]},
    )


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def loads_instance(text: str, source: str = "<instance>") -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    return instance_from_dict(doc, source)


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def read_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InstanceFormatError(f"{path}: not UTF-8 ({e.reason})") from None
    return loads_instance(text, str(path))


def plan_to_dict(plan: ProductionPlan, cost: float = None) -> dict:
    doc = {"steps": [{"level": st.level, "t": st.time, "transition": st.transition} for st in plan]}
    if cost is not None:
        doc["cost"] = _number(cost)
    return doc


def plan_from_dict(doc, source: str = "<plan>") -> ProductionPlan:
    _validate(doc, PLAN_SCHEMA, source)
    return ProductionPlan(tuple(PlanStep(s["level"], s["t"], s["transition"]) for s in doc["steps"]))


def write_plan(plan: ProductionPlan, path: Union[str, Path], cost: float = None) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan, cost), indent=1) + "\n", encoding="utf-8")


def read_plan(path: Union[str, Path]) -> ProductionPlan:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return plan_from_dict(doc, str(path))
