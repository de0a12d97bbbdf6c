"""JSON formats for matrices and channels.

Matrix: ``{"dim": n, "re": [[...]], "im": [[...]]}`` (row-major; ``im`` may be
omitted for real matrices). Channel: ``{"in_dim": n, "out_dim": k,
"kraus": [<matrix>, ...]}`` where each Kraus matrix is ``k x n`` and carries
``"rows"``/``"cols"`` in place of ``dim``.
"""

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .errors import ParseError


def matrix_to_json(M, square: bool = True) -> dict:
    M = np.asarray(getattr(M, "matrix", M), dtype=complex)
    out = {"dim": int(M.shape[0])} if square else {"rows": int(M.shape[0]), "cols": int(M.shape[1])}
    out["re"] = M.real.tolist()
    out["im"] = M.imag.tolist()
    return out


def _grid(obj, key, rows, cols, where):
    data = obj.get(key)
    if data is None:
        if key == "im":
            return np.zeros((rows, cols))
        raise ParseError(f"{where}: missing field {key!r}")
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: field {key!r} must be a list of numeric rows") from None
    if arr.shape != (rows, cols):
        raise ParseError(f"{where}: field {key!r} has shape {arr.shape}, expected {(rows, cols)}")
    return arr


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if "dim" in obj:
        rows = cols = obj["dim"]
    elif "rows" in obj and "cols" in obj:
        rows, cols = obj["rows"], obj["cols"]
    else:
        raise ParseError(f"{where}: missing field 'dim'")
    if not all(isinstance(v, int) and v >= 1 for v in (rows, cols)):
        raise ParseError(f"{where}: dimensions must be positive integers")
    return _grid(obj, "re", rows, cols, where) + 1j * _grid(obj, "im", rows, cols, where)


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "in_dim": ch.in_dim,
        "out_dim": ch.out_dim,
        "kraus": [matrix_to_json(K, square=False) for K in ch.kraus],
    }


def channel_from_json(obj, where: str = "channel") -> KrausChannel:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    for key in ("in_dim", "out_dim", "kraus"):
        if key not in obj:
            raise ParseError(f"{where}: missing field {key!r}")
    n, k = obj["in_dim"], obj["out_dim"]
    mats = []
    for s, item in enumerate(obj["kraus"]):
        K = matrix_from_json(item, f"{where}.kraus[{s}]")
        if K.shape != (k, n):
            raise ParseError(f"{where}.kraus[{s}]: shape {K.shape}, expected {(k, n)}")
        mats.append(K)
    if not mats:
        raise ParseError(f"{where}: empty Kraus list")
    return KrausChannel(np.stack(mats))


def read_json(path) -> object:
    """Load a JSON file, turning syntax errors into ``ParseError`` with line/column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(read_json(path), str(path))


def load_channel(path) -> KrausChannel:
    return channel_from_json(read_json(path), str(path))


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
