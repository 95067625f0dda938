"""CSV and binary emission of square count/distance matrices.

Binary layout (little-endian): 4-byte magic ``DPM1``, uint32 n, uint32 kind
code, then n*n int32 entries in row-major order.
"""
from __future__ import annotations

import io
import struct

import numpy as np

MAGIC = b"DPM1"
KINDS = {"LE": 0, "LT": 1, "EQ": 2, "minplus": 3, "maxplus": 4, "linf": 5}
_KIND_NAMES = {v: k for k, v in KINDS.items()}
_HEADER = struct.Struct("<4sII")


def to_csv(matrix: np.ndarray) -> str:
    buf = io.StringIO()
    for row in np.asarray(matrix):
        buf.write(",".join(str(int(v)) for v in row))
        buf.write("\n")
    return buf.getvalue()


def from_csv(text: str) -> np.ndarray:
    rows = [[int(tok) for tok in line.split(",")] for line in text.splitlines() if line.strip()]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("CSV matrix is not square")
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(rows))


def to_binary(matrix: np.ndarray, kind: str) -> bytes:
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError("matrix must be square")
    if kind not in KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}")
    if matrix.size and (matrix.min() < -(2**31) or matrix.max() > 2**31 - 1):
        raise OverflowError("entries do not fit in 32 bits")
    return _HEADER.pack(MAGIC, n, KINDS[kind]) + matrix.astype("<i4").tobytes()


def from_binary(data: bytes):
    """Returns ``(matrix, kind)``."""
    if len(data) < _HEADER.size:
        raise ValueError("truncated matrix header")
    magic, n, code = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if code not in _KIND_NAMES:
        raise ValueError(f"unknown kind code {code}")
    body = data[_HEADER.size:]
    if len(body) != 4 * n * n:
        raise ValueError(f"expected {4 * n * n} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<i4").reshape(n, n).astype(np.int64), _KIND_NAMES[code]
