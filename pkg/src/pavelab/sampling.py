"""Seeded randomness: projector models, permutation partitions, ensembles.

Every draw is a pure function of (master seed, stream label, index), so
trials can be generated in any order, or in parallel, and reproduce bitwise.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParameterError, PavelabError
from .matrices import CoordinateSet, DenseMatrix, Partition, spectral_norm

_MASTER_MAX = 1 << 64


@dataclass(frozen=True)
class Seed:
    """Master seed; per-draw streams are keyed by (master, label, index)."""

    master: int

    def __post_init__(self):
        if not 0 <= int(self.master) < _MASTER_MAX:
            raise ParameterError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "master", int(self.master))

    def rng(self, label: str, index: int = 0) -> np.random.Generator:
        key = int.from_bytes(
            hashlib.blake2b(label.encode("utf8"), digest_size=8).digest(), "big"
        )
        return np.random.default_rng(
            np.random.SeedSequence([self.master, key, int(index)])
        )


def parse_seed(text: str) -> Seed:
    """Accepts decimal or 0x-prefixed hex."""
    try:
        return Seed(int(str(text), 0))
    except ValueError as exc:
        raise ParameterError(f"cannot parse seed {text!r}") from exc


# ---------------------------------------------------------------------------
# Projector models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformK:
    """Projector onto exactly k coordinates, uniform over all k-subsets."""

    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ParameterError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class Bernoulli:
    """Each coordinate kept independently with the given rate."""

    n: int
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ParameterError(f"rate must be in [0, 1], got {self.rate}")


@dataclass(frozen=True)
class BernoulliPair:
    """Two independent Bernoulli coordinate draws (row and column sides)."""

    n: int
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ParameterError(f"rate must be in [0, 1], got {self.rate}")


@dataclass(frozen=True)
class RademacherSigns:
    """Vector of n independent +-1 signs."""

    n: int


ProjectorModel = Union[UniformK, Bernoulli, BernoulliPair, RademacherSigns]


def _model_label(model: ProjectorModel) -> str:
    return f"subset:{type(model).__name__}"


def _uniform_k_indices(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    # partial Fisher-Yates: exact uniform k-subset in O(n)
    idx = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k]


def sample_subset(model: ProjectorModel, seed: Seed, index: int = 0):
    """One draw from the model's law.

    UniformK/Bernoulli return a CoordinateSet, BernoulliPair a pair of them,
    RademacherSigns an array of +-1 ints.
    """
    rng = seed.rng(_model_label(model), index)
    n = model.n
    if isinstance(model, UniformK):
        return CoordinateSet.from_iterable(n, _uniform_k_indices(rng, n, model.k))
    if isinstance(model, Bernoulli):
        keep = rng.random(n) < model.rate
        return CoordinateSet.from_iterable(n, np.flatnonzero(keep))
    if isinstance(model, BernoulliPair):
        keep_rows = rng.random(n) < model.rate
        keep_cols = rng.random(n) < model.rate
        return (
            CoordinateSet.from_iterable(n, np.flatnonzero(keep_rows)),
            CoordinateSet.from_iterable(n, np.flatnonzero(keep_cols)),
        )
    if isinstance(model, RademacherSigns):
        return 2 * rng.integers(0, 2, size=n) - 1
    raise ParameterError(f"unknown model {model!r}")


def sample_permutation_partition(n: int, m: int, seed: Seed, index: int = 0) -> Partition:
    """Balanced partition into m blocks cut from a uniform random permutation."""
    if m <= 0 or n % m != 0:
        raise ParameterError(f"m={m} must divide n={n}")
    k = n // m
    perm = seed.rng("permutation_partition", index).permutation(n)
    return Partition.from_blocks(n, [perm[j * k:(j + 1) * k] for j in range(m)])


# ---------------------------------------------------------------------------
# Binomial median bracket
# ---------------------------------------------------------------------------

def binomial_median_set(n: int, k: int) -> tuple[int, int]:
    """Endpoints of the median set of Binomial(n, k/n), exact integer CDF."""
    # weights w_j = C(n, j) k^j (n-k)^(n-j); total = n^n
    total = n ** n
    weights = [math.comb(n, j) * k ** j * (n - k) ** (n - j) for j in range(n + 1)]
    cdf = 0
    lower = upper = None
    for j, w in enumerate(weights):
        tail = total - cdf  # P(X >= j) * n^n
        cdf += w
        if lower is None and 2 * cdf >= total:
            lower = j
        if 2 * tail >= total:
            upper = j
    assert lower is not None and upper is not None
    return lower, upper


def binomial_median_bracket(n: int, rate: float) -> tuple[int, int]:
    """Median set of Binomial(n, rate) with rate = k/n; checked against [k-1, k]."""
    if n <= 0:
        raise ParameterError("n must be positive")
    k_real = rate * n
    k = round(k_real)
    if abs(k_real - k) > 1e-9 or k < 1 or k > n:
        raise ParameterError(f"rate must be k/n for an integer 1 <= k <= n, got {rate}")
    lower, upper = binomial_median_set(n, k)
    if not (k - 1 <= lower and upper <= k):
        raise PavelabError(
            f"median set [{lower}, {upper}] escapes [{k - 1}, {k}] for n={n}, k={k}"
        )
    return lower, upper


# ---------------------------------------------------------------------------
# Test-matrix ensembles
# ---------------------------------------------------------------------------

def _sylvester_hadamard(n: int) -> np.ndarray:
    if n <= 0 or n & (n - 1):
        raise ParameterError(f"hadamard ensembles need n a power of 2, got {n}")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h / math.sqrt(n)


ENSEMBLE_KINDS = (
    "sign_normalized",
    "hadamard",
    "hadamard_hollow",
    "bounded_random",
    "diagonal_free_random",
)


def gen_ensemble(
    kind: str,
    n: int,
    seed: Seed,
    *,
    mu: float | None = None,
    index: int = 0,
) -> DenseMatrix:
    """Named test-matrix ensembles.

    sign_normalized      random +-1 entries divided by the spectral norm
    hadamard             orthonormal Sylvester matrix, entries +-n^(-1/2)
    hadamard_hollow      hollow part of the above
    bounded_random       iid uniform in [-mu, mu], rescaled to norm <= 1
                         without increasing any entry
    diagonal_free_random uniform entries, zero diagonal, norm <= 1
    """
    if n <= 0:
        raise ParameterError("ensemble dimension must be positive")
    rng = seed.rng(f"ensemble:{kind}", index)
    if kind == "sign_normalized":
        signs = 2.0 * rng.integers(0, 2, size=(n, n)) - 1.0
        return DenseMatrix(signs / spectral_norm(DenseMatrix(signs)))
    if kind == "hadamard":
        return DenseMatrix(_sylvester_hadamard(n))
    if kind == "hadamard_hollow":
        h = _sylvester_hadamard(n).copy()
        np.fill_diagonal(h, 0.0)
        return DenseMatrix(h)
    if kind == "bounded_random":
        if mu is None or mu <= 0:
            raise ParameterError("bounded_random needs a positive mu")
        entries = rng.uniform(-mu, mu, size=(n, n))
        scale = max(1.0, spectral_norm(DenseMatrix(entries)))
        return DenseMatrix(entries / scale)
    if kind == "diagonal_free_random":
        entries = rng.uniform(-1.0, 1.0, size=(n, n))
        np.fill_diagonal(entries, 0.0)
        scale = max(1.0, spectral_norm(DenseMatrix(entries)))
        out = entries / scale
        np.fill_diagonal(out, 0.0)
        return DenseMatrix(out)
    raise ParameterError(f"unknown ensemble kind {kind!r}; known: {ENSEMBLE_KINDS}")
