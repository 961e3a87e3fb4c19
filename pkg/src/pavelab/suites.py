"""Versioned instance manifests for the verification suites.

The master seeds below are fixtures: changing them changes every suite
instance, so CI results stay stable only while they stay put.  Instance i of
a suite is generated from Seed(master).rng("suite:<case>", i), which makes
the suites order-independent and reproducible.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .inequalities import InequalityInstance
from .matrices import DenseMatrix, max_abs_entry, spectral_norm
from .sampling import Seed

SUITE_MASTER_SEEDS = {
    "MODEL_EQUIV": 2301,
    "DECOUPLING": 2302,
    "RESTRICT_RV": 2303,
    "COLNORM": 2304,
    "RUDELSON": 2305,
    "NC_KHINTCHINE": 2306,
    "SCALAR_KHINTCHINE": 2307,
    "STEP3": 2308,
    "EXTRAP": 2309,
    "SANDWICH": 2310,
    "MARKOV": 2311,
    "ORACLE": 44,
    "ORACLE_MC": 108,
    "PAVING_BRIDGE": 2313,
    "PAVING_RANDOM": 2314,
}

SIZE_COUNTS = {"smoke": 1, "tiny": 10, "small": 25}


def _rand_matrix(rng, n, *, symmetric=False, hollow=False, unit_norm=False):
    m = rng.uniform(-1.0, 1.0, size=(n, n))
    if symmetric:
        m = (m + m.T) / 2.0
    if hollow:
        np.fill_diagonal(m, 0.0)
    a = DenseMatrix(m)
    if unit_norm:
        a = DenseMatrix(m / spectral_norm(a))
    return a


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _pick(rng, seq):
    return seq[int(rng.integers(0, len(seq)))]


def make_instance(case_id: str, rng) -> InequalityInstance:
    """One random instance satisfying the case's hypotheses."""
    if case_id == "MODEL_EQUIV":
        n = _pick(rng, [4, 6, 8])
        return InequalityInstance(
            matrix=_rand_matrix(rng, n),
            k=_pick(rng, _divisors(n)),
            p=float(_pick(rng, [2, 4, 6])),
        )
    if case_id == "DECOUPLING":
        n = int(rng.integers(3, 9))
        return InequalityInstance(
            matrix=_rand_matrix(rng, n, hollow=True),
            rate=float(rng.uniform(0.1, 0.9)),
            p=float(_pick(rng, [2, 4, 6])),
        )
    if case_id == "RESTRICT_RV":
        p = _pick(rng, [4, 6])
        n_max = 7 if p == 4 else 8
        n = int(rng.integers(3, n_max + 1))
        return InequalityInstance(
            matrix=_rand_matrix(rng, n),
            rate=float(rng.uniform(0.1, 0.9)),
            p=float(p),
        )
    if case_id == "COLNORM":
        return InequalityInstance(
            matrix=_rand_matrix(rng, 8),
            rate=float(rng.uniform(0.1, 0.9)),
            p=6.0,
        )
    if case_id == "RUDELSON":
        p = _pick(rng, [2, 4, 6])
        n_max = {2: 2, 4: 7, 6: 8}[p]
        n = int(rng.integers(2, n_max + 1))
        return InequalityInstance(matrix=_rand_matrix(rng, n), p=float(p))
    if case_id == "NC_KHINTCHINE":
        count = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        mats = tuple(_rand_matrix(rng, n) for _ in range(count))
        return InequalityInstance(matrices=mats, p=float(_pick(rng, [2, 4, 6])))
    if case_id == "SCALAR_KHINTCHINE":
        count = int(rng.integers(2, 11))
        vec = tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=count))
        return InequalityInstance(vector=vec, p=float(_pick(rng, [2, 4, 6])))
    if case_id == "STEP3":
        a = _rand_matrix(rng, 8, unit_norm=True)
        return InequalityInstance(
            matrix=a,
            mu=max_abs_entry(a),
            rate=float(rng.uniform(0.05, 0.95)),
            p=2.0 * math.ceil(math.log(8)),
        )
    if case_id == "EXTRAP":
        p = _pick(rng, [4, 6])
        n_max = 7 if p == 4 else 8
        n = int(rng.integers(3, n_max + 1))
        symmetric = bool(rng.integers(0, 2))
        return InequalityInstance(
            matrix=_rand_matrix(rng, n, symmetric=symmetric, unit_norm=True),
            delta=float(rng.uniform(0.1, 0.9)),
            rho=float(rng.uniform(0.05, 0.45)),
            lam=float(rng.uniform(0.1, 0.9)),
            p=float(p),
        )
    raise ParameterError(f"no instance recipe for case {case_id!r}")


def smoke_instance(case_id: str) -> InequalityInstance:
    """Degenerate deterministic instance (zero matrix where hypotheses allow)."""
    if case_id == "MODEL_EQUIV":
        return InequalityInstance(matrix=DenseMatrix.zeros(4), k=2, p=4.0)
    if case_id == "DECOUPLING":
        return InequalityInstance(matrix=DenseMatrix.zeros(4), rate=0.5, p=2.0)
    if case_id == "RESTRICT_RV":
        return InequalityInstance(matrix=DenseMatrix.zeros(4), rate=0.3, p=6.0)
    if case_id == "COLNORM":
        return InequalityInstance(matrix=DenseMatrix.zeros(8), rate=0.3, p=6.0)
    if case_id == "RUDELSON":
        return InequalityInstance(matrix=DenseMatrix.zeros(3), p=4.0)
    if case_id == "NC_KHINTCHINE":
        mats = (DenseMatrix.zeros(3), DenseMatrix.zeros(3))
        return InequalityInstance(matrices=mats, p=2.0)
    if case_id == "SCALAR_KHINTCHINE":
        return InequalityInstance(vector=(0.0, 0.0), p=2.0)
    if case_id == "STEP3":
        # the zero matrix cannot satisfy the unit-norm hypothesis; use identity
        return InequalityInstance(
            matrix=DenseMatrix.identity(8), mu=1.0, rate=0.3,
            p=2.0 * math.ceil(math.log(8)),
        )
    if case_id == "EXTRAP":
        return InequalityInstance(
            matrix=DenseMatrix.zeros(4), delta=0.5, rho=0.25, lam=0.5, p=6.0
        )
    raise ParameterError(f"no smoke instance for case {case_id!r}")


def suite_instances(case_id: str, count: int, master: int | None = None):
    """(label_seed, instance) pairs; label_seed identifies the offending draw."""
    if master is None:
        master = SUITE_MASTER_SEEDS[case_id]
    seed = Seed(master)
    out = []
    for i in range(count):
        out.append((i, make_instance(case_id, seed.rng(f"suite:{case_id}", i))))
    return out


def sandwich_instances(count: int, master: int | None = None):
    """(index, matrix, p) for the trace/norm sandwich: symmetric contractions."""
    if master is None:
        master = SUITE_MASTER_SEEDS["SANDWICH"]
    seed = Seed(master)
    out = []
    for i in range(count):
        rng = seed.rng("suite:SANDWICH", i)
        p = _pick(rng, [4, 6])
        n_max = 7 if p == 4 else 8
        n = int(rng.integers(3, n_max + 1))
        out.append((i, _rand_matrix(rng, n, symmetric=True, unit_norm=True), p))
    return out


def oracle_instances(count: int, master: int | None = None):
    """(index, matrix, k, rate) for the mc-vs-exact oracle comparisons."""
    if master is None:
        master = SUITE_MASTER_SEEDS["ORACLE"]
    seed = Seed(master)
    out = []
    for i in range(count):
        rng = seed.rng("suite:ORACLE", i)
        n = int(rng.integers(4, 11))
        a = _rand_matrix(rng, n)
        k = int(rng.integers(1, n))
        rate = float(rng.uniform(0.2, 0.8))
        out.append((i, a, k, rate))
    return out


def hollow_instances(count: int, n: int, master: int) -> list[tuple[int, DenseMatrix]]:
    seed = Seed(master)
    return [
        (i, _rand_matrix(seed.rng("suite:hollow", i), n, hollow=True))
        for i in range(count)
    ]
