"""JSON state files.

Pure state::

    {"n_sites": 3, "kind": "pure", "amplitudes": [[re, im], ...]}

Mixed state::

    {"n_sites": 2, "kind": "mixed", "density": [[[re, im], ...], ...]}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import LoopInvError
from .qstate import DensityMatrix, PureState

_PURE_KEYS = {"n_sites", "kind", "amplitudes"}
_MIXED_KEYS = {"n_sites", "kind", "density"}


class StateFileError(LoopInvError):
    """Unreadable or structurally malformed state file."""


def _complex_array(data, shape: tuple[int, ...], what: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{what} must be nested arrays of [re, im] numbers") from exc
    if arr.shape != shape + (2,):
        raise StateFileError(f"{what} has shape {arr.shape[:-1]}, expected {shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(doc) -> PureState | DensityMatrix:
    if not isinstance(doc, dict):
        raise StateFileError("state file must hold a JSON object")
    kind = doc.get("kind")
    expected = {"pure": _PURE_KEYS, "mixed": _MIXED_KEYS}.get(kind)
    if expected is None:
        raise StateFileError(f"kind must be 'pure' or 'mixed', got {kind!r}")
    unknown = set(doc) - expected
    missing = expected - set(doc)
    if unknown:
        raise StateFileError(f"unknown fields {sorted(unknown)}")
    if missing:
        raise StateFileError(f"missing fields {sorted(missing)}")
    n = doc["n_sites"]
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 8:
        raise StateFileError(f"n_sites must be an integer in [1, 8], got {n!r}")
    dim = 2**n
    if kind == "pure":
        return PureState(_complex_array(doc["amplitudes"], (dim,), "amplitudes"), n)
    return DensityMatrix(_complex_array(doc["density"], (dim, dim), "density"), n)


def read_state(path) -> PureState | DensityMatrix:
    """Load and validate a state file.

    Raises ``StateFileError`` for I/O, JSON and schema problems; the state
    validation errors of ``qstate`` propagate unchanged.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
        doc = json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(doc)


def _pairs(a: np.ndarray):
    return np.stack([a.real, a.imag], axis=-1).tolist()


def state_to_dict(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        return {"n_sites": state.n_sites, "kind": "pure", "amplitudes": _pairs(state.amplitudes)}
    return {"n_sites": state.n_sites, "kind": "mixed", "density": _pairs(state.matrix)}


def write_state(state: PureState | DensityMatrix, path) -> None:
    # json emits the shortest repr that round-trips each double exactly
    Path(path).write_text(json.dumps(state_to_dict(state), sort_keys=True) + "\n", encoding="utf-8")
