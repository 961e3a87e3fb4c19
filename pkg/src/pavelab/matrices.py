"""Dense real matrices, coordinate sets/partitions, and the four norms.

Everything here is immutable and pure: values can be shared freely between
threads.  Spectral quantities come from LAPACK via numpy; tests cross-check
them against an independent one-sided Jacobi SVD.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C", copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Immutable dense real matrix (64-bit floats, row-major)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ParameterError("matrix entries must be finite")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def from_entries(cls, n_rows: int, n_cols: int, entries) -> "DenseMatrix":
        flat = np.asarray(entries, dtype=np.float64).ravel()
        if flat.size != n_rows * n_cols:
            raise DimensionError(
                f"entry count {flat.size} != {n_rows}x{n_cols}"
            )
        return cls(flat.reshape(n_rows, n_cols))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "DenseMatrix":
        if n_cols is None:
            n_cols = n_rows
        return cls(np.zeros((n_rows, n_cols)))

    @classmethod
    def identity(cls, n: int) -> "DenseMatrix":
        return cls(np.eye(n))

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        """Row-major flat view of the entries (read-only)."""
        return self.data.reshape(-1)

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    @property
    def is_empty(self) -> bool:
        return self.data.size == 0

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self.data.T)

    def same_entries(self, other: "DenseMatrix", tol: float = 0.0) -> bool:
        if self.shape != other.shape:
            return False
        if tol == 0.0:
            return bool(np.array_equal(self.data, other.data))
        return bool(np.allclose(self.data, other.data, rtol=0.0, atol=tol))

    def __repr__(self):
        return f"DenseMatrix({self.n_rows}x{self.n_cols})"


@dataclass(frozen=True)
class CoordinateSet:
    """Strictly increasing subset of {0, ..., n-1}."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError("ambient dimension must be >= 0")
        idx = tuple(int(i) for i in self.indices)
        for a, b in zip(idx, idx[1:]):
            if a >= b:
                raise ParameterError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ParameterError(f"indices must lie in [0, {self.n})")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_iterable(cls, n: int, it) -> "CoordinateSet":
        return cls(n, tuple(sorted(int(i) for i in it)))

    @classmethod
    def full(cls, n: int) -> "CoordinateSet":
        return cls(n, tuple(range(n)))

    @classmethod
    def empty(cls, n: int) -> "CoordinateSet":
        return cls(n, ())

    @property
    def size(self) -> int:
        return len(self.indices)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        if self.indices:
            m[list(self.indices)] = True
        return m

    def __contains__(self, i) -> bool:
        return int(i) in set(self.indices)


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty coordinate blocks covering {0, ..., n-1}.

    Blocks are canonicalized by increasing smallest element, so two
    partitions of the same set compare equal by value.
    """

    n: int
    blocks: tuple[CoordinateSet, ...] = field(default=())

    def __post_init__(self):
        blocks = tuple(self.blocks)
        seen: set[int] = set()
        total = 0
        for b in blocks:
            if b.n != self.n:
                raise DimensionError("block ambient dimension mismatch")
            if b.size == 0:
                raise ParameterError("partition blocks must be nonempty")
            total += b.size
            seen.update(b.indices)
        if total != self.n or len(seen) != self.n:
            raise ParameterError("blocks must be disjoint and cover all coordinates")
        blocks = tuple(sorted(blocks, key=lambda b: b.indices[0]))
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "Partition":
        return cls(n, tuple(CoordinateSet.from_iterable(n, b) for b in blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls.from_blocks(n, [[i] for i in range(n)])

    @classmethod
    def single_block(cls, n: int) -> "Partition":
        return cls.from_blocks(n, [range(n)])

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def balanced(self) -> bool:
        sizes = {b.size for b in self.blocks}
        return len(sizes) <= 1


# ---------------------------------------------------------------------------
# Norms.  Empty (zero-dimensional) matrices have every norm equal to 0 by
# convention; a Bernoulli draw may select no coordinates at all.
# ---------------------------------------------------------------------------

def singular_values(a: DenseMatrix) -> np.ndarray:
    """Singular values in weakly decreasing order."""
    if a.is_empty:
        return np.zeros(0)
    return np.linalg.svd(a.data, compute_uv=False)


def spectral_norm(a: DenseMatrix) -> float:
    """Largest singular value (operator norm on Euclidean space)."""
    if a.is_empty:
        return 0.0
    return float(np.linalg.svd(a.data, compute_uv=False)[0])


def schatten_norm(a: DenseMatrix, p: float) -> float:
    """l_p norm of the singular-value vector."""
    if p < 1:
        raise ParameterError(f"Schatten norm needs p >= 1, got {p}")
    sv = singular_values(a)
    if sv.size == 0:
        return 0.0
    top = sv[0]
    if top == 0.0:
        return 0.0
    return float(top * np.sum((sv / top) ** p) ** (1.0 / p))


def max_column_norm(a: DenseMatrix) -> float:
    """Largest Euclidean column norm (the l1 -> l2 operator norm)."""
    if a.is_empty:
        return 0.0
    return float(np.sqrt(np.max(np.sum(a.data * a.data, axis=0))))


def max_abs_entry(a: DenseMatrix) -> float:
    if a.is_empty:
        return 0.0
    return float(np.max(np.abs(a.data)))


# ---------------------------------------------------------------------------
# Restriction and paving quality
# ---------------------------------------------------------------------------

def restrict(a: DenseMatrix, rows: CoordinateSet, cols: CoordinateSet) -> DenseMatrix:
    """Submatrix on rows x cols; same spectral norm as the projected matrix."""
    if rows.n != a.n_rows or cols.n != a.n_cols:
        raise IndexError(
            f"coordinate sets for {rows.n}x{cols.n} applied to {a.n_rows}x{a.n_cols}"
        )
    sub = a.data[np.ix_(list(rows.indices), list(cols.indices))]
    return DenseMatrix(sub.reshape(rows.size, cols.size))


def hollow_rescale(a: DenseMatrix, mu: float) -> DenseMatrix:
    """Remove the diagonal and divide by 1 + mu.

    If ||a|| <= 1 the output has norm <= 1, and entries bounded by mu stay
    strictly below mu.  The output diagonal is exactly zero.
    """
    if not a.is_square:
        raise DimensionError("hollow_rescale needs a square matrix")
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    out = a.data / (1.0 + mu)
    np.fill_diagonal(out, 0.0)
    return DenseMatrix(out)


def paving_quality(a: DenseMatrix, part: Partition) -> float:
    """Norm of the block-diagonal compression: max block restriction norm."""
    if not a.is_square:
        raise DimensionError("paving quality needs a square matrix")
    if part.n != a.n_rows:
        raise DimensionError(f"partition of {part.n} applied to {a.n_rows}x{a.n_cols}")
    return max(spectral_norm(restrict(a, b, b)) for b in part.blocks)
