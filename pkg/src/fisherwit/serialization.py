"""JSON encoding of matrices, states, measurements, channels, free sets and reports.

Complex numbers are two-element arrays ``[re, im]``; plain numbers are accepted on
input. Non-finite floats are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""

from __future__ import annotations

import json
import math
from typing import Any

import jsonschema
import numpy as np

from . import freesets
from .states import (ChannelFamily, EstimationTask, KrausChannel, constant_family, mixture_family,
                     unitary_family, validate_povm, validate_state)

NUMBER = {"anyOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
ENTRY = {"anyOf": [NUMBER, {"type": "array", "items": NUMBER, "minItems": 2, "maxItems": 2}]}
MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": ENTRY}}
STATE = {"type": "object", "required": ["matrix"],
         "properties": {"dim": {"type": "integer", "minimum": 1}, "matrix": MATRIX}}
POVM = {"type": "object", "required": ["elements"],
        "properties": {"elements": {"type": "array", "minItems": 1, "items": MATRIX}}}
CHANNEL = {"type": "object", "required": ["kraus"],
           "properties": {"kraus": {"type": "array", "minItems": 1, "items": MATRIX}}}
FREE_SET = {
    "type": "object",
    "required": ["variant"],
    "properties": {
        "variant": {"enum": ["incoherent", "singleton", "polytope", "blochball", "hemisphere", "separable"]},
        "dim": {"type": "integer", "minimum": 1},
        "state": MATRIX,
        "states": {"type": "array", "minItems": 1, "items": MATRIX},
        "radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "points": {"type": "integer", "minimum": 2},
        "azimuths": {"type": "array", "items": {"type": "number"}},
        "dims": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
    },
    "allOf": [
        {"if": {"properties": {"variant": {"const": "incoherent"}}}, "then": {"required": ["dim"]}},
        {"if": {"properties": {"variant": {"const": "singleton"}}}, "then": {"required": ["state"]}},
        {"if": {"properties": {"variant": {"const": "polytope"}}}, "then": {"required": ["states"]}},
        {"if": {"properties": {"variant": {"const": "blochball"}}}, "then": {"required": ["radius"]}},
    ],
}
FAMILY = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["unitary", "mixture", "constant"]},
        "generator": MATRIX,
        "channels": {"type": "array", "items": CHANNEL, "minItems": 2, "maxItems": 2},
        "channel": CHANNEL,
    },
    "allOf": [
        {"if": {"properties": {"type": {"const": "unitary"}}}, "then": {"required": ["generator"]}},
        {"if": {"properties": {"type": {"const": "mixture"}}}, "then": {"required": ["channels"]}},
        {"if": {"properties": {"type": {"const": "constant"}}}, "then": {"required": ["channel"]}},
    ],
}
TASK = {"type": "object", "required": ["family", "povm"],
        "properties": {"family": FAMILY, "povm": POVM, "theta": {"type": "number"}}}
GAME = {
    "type": "object",
    "required": ["ensemble", "povm", "free_ops"],
    "properties": {
        "ensemble": {"type": "array", "minItems": 1, "items": {
            "type": "object", "required": ["p", "state"],
            "properties": {"p": {"type": "number", "minimum": 0}, "state": STATE}}},
        "povm": POVM,
        "free_ops": {"type": "array", "items": CHANNEL},
        "ancilla_dim": {"type": "integer", "minimum": 1},
    },
}
WITNESS_REPORT = {
    "type": "object",
    "required": ["n_value", "free_max", "normalized", "flags"],
    "properties": {
        "n_value": NUMBER,
        "free_max": NUMBER,
        "resource_value": NUMBER,
        "normalized": {"type": "boolean"},
        "flags": {"type": "array", "items": {"type": "string"}},
        "bounds": {"type": "object", "required": ["lower", "upper"],
                   "properties": {"lower": NUMBER, "upper": NUMBER}},
    },
}
CRITERION_RESULT = {
    "type": "object",
    "required": ["s_star", "gap_sq", "certified", "verdict"],
    "properties": {"s_star": NUMBER, "gap_sq": NUMBER, "certified": {"type": "boolean"},
                   "verdict": {"enum": ["useful", "inconclusive"]}, "optimizer": MATRIX},
}


# request schemas per subcommand
REQUESTS = {
    "cfi": {"type": "object", "required": ["state", "task"],
            "properties": {"state": STATE, "task": TASK, "grid": {"type": "array", "items": {"type": "number"}}}},
    "qfi": {"type": "object", "required": ["state", "family"],
            "properties": {"state": STATE, "family": FAMILY, "theta": {"type": "number"}}},
    "nc": {"type": "object", "required": ["state", "task", "free_set"],
           "properties": {"state": STATE, "task": TASK, "free_set": FREE_SET}},
    "nq": {"type": "object", "required": ["state", "family", "free_set"],
           "properties": {"state": STATE, "family": FAMILY, "free_set": FREE_SET, "theta": {"type": "number"}}},
    "robustness": {"type": "object", "required": ["state", "free_set"],
                   "properties": {"state": STATE, "free_set": FREE_SET}},
    "witness-task": {"type": "object", "required": ["state", "free_set"],
                     "properties": {"state": STATE, "free_set": FREE_SET,
                                    "zero_branch": {"enum": ["regularized", "literal"]},
                                    "grid": {"type": "array", "items": {"type": "number"}}}},
    "nc-bounds": {"type": "object", "required": ["state", "task", "free_set"],
                  "properties": {"state": STATE, "task": TASK, "free_set": FREE_SET}},
    "criterion": {"type": "object", "required": ["generator", "free_set"],
                  "properties": {"generator": MATRIX, "free_set": FREE_SET}},
    "op-witness": {"type": "object", "required": ["game", "channel"],
                   "properties": {"game": GAME, "channel": CHANNEL}},
}


def validate(instance: Any, schema: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if `instance` does not match `schema`."""
    jsonschema.validate(instance, schema)


# -- encoding ------------------------------------------------------------------


def encode_float(x: float):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_float(x) -> float:
    return float(x) if isinstance(x, str) else x


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[encode_float(z.real), encode_float(z.imag)] for z in row] for row in m]


def decode_matrix(data) -> np.ndarray:
    rows = []
    for row in data:
        out = []
        for z in row:
            if isinstance(z, list):
                out.append(complex(decode_float(z[0]), decode_float(z[1])))
            else:
                out.append(complex(decode_float(z)))
        rows.append(out)
    if len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def encode_state(rho) -> dict:
    rho = np.asarray(rho)
    return {"dim": int(rho.shape[0]), "matrix": encode_matrix(rho)}


def decode_state(data: dict) -> np.ndarray:
    rho = decode_matrix(data["matrix"])
    if "dim" in data and rho.shape != (data["dim"], data["dim"]):
        raise ValueError(f"state matrix has shape {rho.shape}, declared dim {data['dim']}")
    return validate_state(rho)


def encode_povm(elements) -> dict:
    return {"elements": [encode_matrix(e) for e in elements]}


def decode_povm(data: dict) -> list[np.ndarray]:
    return validate_povm([decode_matrix(e) for e in data["elements"]])


def encode_channel(ch: KrausChannel) -> dict:
    return {"kraus": [encode_matrix(k) for k in ch.kraus_ops]}


def decode_channel(data: dict) -> KrausChannel:
    return KrausChannel([decode_matrix(k) for k in data["kraus"]])


def encode_free_set(F: freesets.FreeSet) -> dict:
    return to_jsonable(F.to_dict())


def decode_free_set(data: dict) -> freesets.FreeSet:
    d = dict(data)
    if "state" in d:
        d["state"] = decode_matrix(d["state"])
    if "states" in d:
        d["states"] = [decode_matrix(s) for s in d["states"]]
    return freesets.from_dict(d)


def to_jsonable(obj):
    """Recursively convert arrays, numpy scalars and non-finite floats to JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return encode_matrix(obj)
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    if isinstance(obj, complex):
        return [encode_float(obj.real), encode_float(obj.imag)]
    return obj


def dumps(obj, **kw) -> str:
    return json.dumps(to_jsonable(obj), allow_nan=False, **kw)


def decode_family(data: dict) -> ChannelFamily:
    kind = data["type"]
    if kind == "unitary":
        return unitary_family(decode_matrix(data["generator"]))
    if kind == "mixture":
        return mixture_family(*(decode_channel(c) for c in data["channels"]))
    return constant_family(decode_channel(data["channel"]))


def decode_task(data: dict) -> EstimationTask:
    return EstimationTask(decode_family(data["family"]), decode_povm(data["povm"]),
                          theta=float(data.get("theta", 0.0)), descriptor={"family": data["family"]["type"]})
