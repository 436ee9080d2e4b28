"""JSON readers and writers for states and channels.

Complex entries are ``[re, im]`` pairs, rows in order. Writers emit reals with
17 significant digits so a written state reads back bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .errors import BadInputFile
from .qstate import DensityMatrix, validate


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _matrix_text(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m, dtype=complex):
        rows.append("[" + ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in row) + "]")
    return "[\n    " + ",\n    ".join(rows) + "\n  ]"


def _parse_matrix(entries, where: str) -> np.ndarray:
    try:
        a = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise BadInputFile(f"BadInputFile: {where} is not a matrix of [re, im] pairs") from exc
    if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != a.shape[1]:
        raise BadInputFile(f"BadInputFile: {where} has shape {a.shape}, expected (n, n, 2)")
    return a[..., 0] + 1j * a[..., 1]


def _load(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise BadInputFile(f"BadInputFile: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise BadInputFile(f"BadInputFile: {path} is not valid JSON ({exc.msg}, line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise BadInputFile(f"BadInputFile: {path} must hold a JSON object")
    return data


def state_to_json(rho: DensityMatrix) -> str:
    return '{\n  "dims": %s,\n  "matrix": %s\n}\n' % (json.dumps(list(rho.dims)), _matrix_text(rho.matrix))


def state_from_dict(data: dict, where: str = "state") -> DensityMatrix:
    """Validate a parsed state object; raises a ValidationError subclass on bad physics."""
    if "dims" not in data or "matrix" not in data:
        raise BadInputFile(f"BadInputFile: {where} needs keys 'dims' and 'matrix'")
    try:
        dims = [int(d) for d in data["dims"]]
    except (TypeError, ValueError) as exc:
        raise BadInputFile(f"BadInputFile: {where} dims must be a list of integers") from exc
    return validate(dims, _parse_matrix(data["matrix"], f"{where} matrix"))


def read_state(path) -> DensityMatrix:
    return state_from_dict(_load(path), str(path))


def write_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(state_to_json(rho))


def channel_to_json(channel: KrausChannel) -> str:
    ops = ",\n  ".join(_matrix_text(k) for k in channel.operators)
    return '{\n  "dim": %d,\n  "kraus": [\n  %s\n  ]\n}\n' % (channel.dim, ops)


def read_channel(path, require_incoherent: bool = True) -> KrausChannel:
    data = _load(path)
    if "dim" not in data or "kraus" not in data or not isinstance(data["kraus"], list):
        raise BadInputFile(f"BadInputFile: {path} needs keys 'dim' and 'kraus' (a list)")
    ops = tuple(_parse_matrix(k, f"{path} kraus[{i}]") for i, k in enumerate(data["kraus"]))
    if any(k.shape[0] != int(data["dim"]) for k in ops):
        raise BadInputFile(f"BadInputFile: {path} operators do not match dim {data['dim']}")
    return KrausChannel(ops, require_incoherent=require_incoherent)


def write_channel(channel: KrausChannel, path) -> None:
    Path(path).write_text(channel_to_json(channel))
