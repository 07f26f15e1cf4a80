"""Reading and writing Boolean matrices.

Two formats, chosen by file extension:

* ``.mtx`` -- Matrix Market coordinate, canonically ``pattern general`` with
  1-based indices. ``integer``/``real`` fields are accepted on read when every
  value is 0 or 1; explicit zeros are dropped.
* anything else -- dense text, one row per line, cells separated by tabs or
  spaces.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .boolean import BoolMatrix, as_bool

MM_HEADER = "%%MatrixMarket matrix coordinate pattern general"


class MatrixParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {msg}")


def _is_mtx(path) -> bool:
    return Path(path).suffix.lower() == ".mtx"


def read_bool_matrix(path) -> BoolMatrix:
    if _is_mtx(path):
        return read_matrix_market(path)
    return read_dense(path)


def write_bool_matrix(A, path) -> None:
    if _is_mtx(path):
        write_matrix_market(A, path)
    else:
        write_dense(A, path)


def read_matrix_market(path) -> BoolMatrix:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixParseError(path, 1, "empty file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1].lower() != "matrix":
        raise MatrixParseError(path, 1, f"bad header {lines[0]!r}")
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt != "coordinate":
        raise MatrixParseError(path, 1, f"only coordinate format is supported, got {fmt!r}")
    if field not in ("pattern", "integer", "real"):
        raise MatrixParseError(path, 1, f"unsupported field {field!r}")
    if symmetry != "general":
        raise MatrixParseError(path, 1, f"only general symmetry is supported, got {symmetry!r}")

    lineno = 1
    body = iter(enumerate(lines[1:], start=2))
    dims = None
    for lineno, line in body:
        s = line.strip()
        if s and not s.startswith("%"):
            dims = s.split()
            break
    if dims is None:
        raise MatrixParseError(path, lineno, "missing size line")
    try:
        n, m, nnz = (int(x) for x in dims)
    except ValueError:
        raise MatrixParseError(path, lineno, f"bad size line {' '.join(dims)!r}") from None
    if n < 0 or m < 0 or nnz < 0:
        raise MatrixParseError(path, lineno, "negative size")

    a = np.zeros((n, m), dtype=bool)
    seen = set()
    count = 0
    want = 2 if field == "pattern" else 3
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) != want:
            raise MatrixParseError(path, lineno, f"expected {want} fields, got {len(parts)}")
        try:
            i, j = int(parts[0]), int(parts[1])
            val = 1.0 if want == 2 else float(parts[2])
        except ValueError:
            raise MatrixParseError(path, lineno, f"malformed entry {s!r}") from None
        if not (1 <= i <= n and 1 <= j <= m):
            raise MatrixParseError(path, lineno, f"entry ({i}, {j}) outside {n}x{m}")
        if (i, j) in seen:
            raise MatrixParseError(path, lineno, f"duplicate entry ({i}, {j})")
        if val not in (0.0, 1.0):
            raise MatrixParseError(path, lineno, f"non-Boolean value {parts[2]!r}")
        seen.add((i, j))
        count += 1
        if val:
            a[i - 1, j - 1] = True
    if count != nnz:
        raise MatrixParseError(path, lineno, f"size line declares {nnz} entries, found {count}")
    return BoolMatrix(a)


def write_matrix_market(A, path) -> None:
    a = as_bool(A)
    idx = np.argwhere(a) + 1
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(MM_HEADER + "\n")
        fh.write(f"{a.shape[0]} {a.shape[1]} {len(idx)}\n")
        np.savetxt(fh, idx, fmt="%d")
    os.replace(tmp, path)


def read_dense(path) -> BoolMatrix:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if parts[0].startswith("#"):
                continue
            if any(p not in ("0", "1") for p in parts):
                raise MatrixParseError(path, lineno, "cells must be 0 or 1")
            if rows and len(parts) != len(rows[0]):
                raise MatrixParseError(path, lineno, f"row has {len(parts)} cells, expected {len(rows[0])}")
            rows.append([p == "1" for p in parts])
    if not rows:
        raise MatrixParseError(path, 1, "no rows")
    return BoolMatrix(np.array(rows, dtype=bool))


def write_dense(A, path) -> None:
    a = as_bool(A).astype(np.uint8)
    with open(path, "w", encoding="ascii") as fh:
        for row in a:
            fh.write("\t".join(map(str, row)) + "\n")
