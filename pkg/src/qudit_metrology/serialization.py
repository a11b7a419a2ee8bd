"""JSON encoding of states and operators as ``{dim, [re, im] pairs}``."""

from __future__ import annotations

import json

import numpy as np

from .qudit import DensityMatrix, HermitianObservable, PureState

__all__ = ["state_to_dict", "state_from_dict", "dumps", "loads"]


def _pairs(a: np.ndarray) -> list:
    a = np.asarray(a)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_pairs(row) for row in a]


def _complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(obj) -> dict:
    if isinstance(obj, PureState):
        return {"type": "pure_state", "dim": obj.dim, "amplitudes": _pairs(obj.amplitudes)}
    if isinstance(obj, DensityMatrix):
        return {"type": "density_matrix", "dim": obj.dim, "matrix": _pairs(obj.matrix)}
    if isinstance(obj, HermitianObservable):
        return {"type": "observable", "dim": obj.dim, "matrix": _pairs(obj.matrix)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def state_from_dict(doc: dict):
    kind = doc["type"]
    if kind == "pure_state":
        obj = PureState(_complex(doc["amplitudes"]))
    elif kind == "density_matrix":
        obj = DensityMatrix(_complex(doc["matrix"]))
    elif kind == "observable":
        obj = HermitianObservable(_complex(doc["matrix"]))
    else:
        raise ValueError(f"unknown object type {kind!r}")
    if obj.dim != doc["dim"]:
        raise ValueError(f"declared dim {doc['dim']} does not match data ({obj.dim})")
    return obj


def dumps(obj) -> str:
    return json.dumps(state_to_dict(obj))


def loads(text: str):
    return state_from_dict(json.loads(text))
