"""Text formats: matrices, partitions, and the key=value config files.

Matrix format: first line "n_rows n_cols", then one line per row of
space-separated decimal literals.  The writer emits 17 significant digits so
files round-trip float64 exactly; the parser accepts scientific notation.

Partition format: one line per block of space-separated indices, blocks
ordered by smallest element.
"""
from __future__ import annotations

import os

from .errors import FormatError
from .matrices import DenseMatrix, Partition


def format_float(x: float) -> str:
    return "%.17g" % float(x)


def matrix_to_text(a: DenseMatrix) -> str:
    lines = [f"{a.n_rows} {a.n_cols}"]
    for row in a.data:
        lines.append(" ".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> DenseMatrix:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"header must be 'n_rows n_cols', got {lines[0]!r}")
    try:
        n_rows, n_cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad header {lines[0]!r}") from exc
    if n_rows < 0 or n_cols < 0:
        raise FormatError("negative dimensions")
    body = lines[1:]
    if len(body) < n_rows:
        raise FormatError(f"expected {n_rows} rows, found {len(body)}")
    rows = []
    for i in range(n_rows):
        toks = body[i].split()
        if len(toks) != n_cols:
            raise FormatError(f"row {i}: expected {n_cols} entries, got {len(toks)}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise FormatError(f"row {i}: non-numeric entry") from exc
    import numpy as np

    return DenseMatrix(np.array(rows, dtype=float).reshape(n_rows, n_cols))


def write_matrix(a: DenseMatrix, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(matrix_to_text(a))


def read_matrix(path: str | os.PathLike) -> DenseMatrix:
    with open(path) as fh:
        return matrix_from_text(fh.read())


def partition_to_text(part: Partition) -> str:
    return "\n".join(" ".join(str(i) for i in b.indices) for b in part.blocks) + "\n"


def partition_from_text(text: str, n: int) -> Partition:
    blocks = []
    for line in text.splitlines():
        toks = line.split()
        if not toks:
            continue
        try:
            blocks.append([int(t) for t in toks])
        except ValueError as exc:
            raise FormatError(f"bad partition line {line!r}") from exc
    try:
        return Partition.from_blocks(n, blocks)
    except Exception as exc:
        raise FormatError(f"invalid partition: {exc}") from exc


def write_partition(part: Partition, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(partition_to_text(part))


def read_partition(path: str | os.PathLike, n: int) -> Partition:
    with open(path) as fh:
        return partition_from_text(fh.read(), n)


def read_config(path: str | os.PathLike) -> dict:
    """key=value lines; '#' starts a comment; values become int/float/str."""
    opts: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"config line without '=': {raw.rstrip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            opts[key.replace("-", "_")] = _coerce(value)
    return opts


def _coerce(value: str):
    try:
        return int(value, 0)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value
