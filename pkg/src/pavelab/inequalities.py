"""Registry of the nine verifiable moment inequalities.

Each case packages its hypotheses and an exact (full pattern enumeration) or
Monte Carlo evaluation of both sides.  Exact verdicts use strict comparison
with a 1e-12 slack; Monte Carlo verdicts only flag a violation when the gap
exceeds three combined standard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bounds import haagerup_constant, khintchine_constant, rudelson_bound, step3_bound
from .errors import CapacityError, ParameterError, PreconditionError
from .matrices import DenseMatrix, max_abs_entry, max_column_norm, spectral_norm
from .moments import (
    EXACT_BERNOULLI_MAX_N,
    bernoulli_weights,
    exact_moment,
    mask_bits,
    masked_norms,
    mc_moment,
    power_mean,
    weighted_moment_stats,
)
from .polynomials import check_extrapolation
from .sampling import Bernoulli, BernoulliPair, RademacherSigns, Seed, UniformK

_SLACK = 1e-12
_EXACT_SIGN_MAX = 16


@dataclass(frozen=True)
class InequalityInstance:
    """Inputs for one inequality check; unused fields stay None."""

    matrix: DenseMatrix | None = None
    matrices: tuple[DenseMatrix, ...] | None = None
    vector: tuple[float, ...] | None = None
    p: float = 2.0
    rate: float | None = None
    k: int | None = None
    mu: float | None = None
    delta: float | None = None
    rho: float | None = None
    lam: float | None = None


@dataclass(frozen=True)
class InequalityReport:
    case: str
    n: int
    p: float
    params: tuple[tuple[str, float], ...]
    lhs: float
    rhs: float
    ratio: float
    method: str
    trials: int
    seed: int | None
    holds: bool
    notes: tuple[tuple[str, float], ...] = field(default=())


def format_report(rep: InequalityReport) -> str:
    params = ",".join(f"{k}:{'%.12g' % v}" for k, v in rep.params) or "-"
    seed = "-" if rep.seed is None else str(rep.seed)
    fields = [
        f"case={rep.case}",
        f"n={rep.n}",
        f"p={'%.12g' % rep.p}",
        f"params={params}",
        f"lhs={'%.17g' % rep.lhs}",
        f"rhs={'%.17g' % rep.rhs}",
        f"ratio={'%.12g' % rep.ratio}",
        f"method={rep.method}",
        f"trials={rep.trials}",
        f"seed={seed}",
        f"holds={'yes' if rep.holds else 'no'}",
    ]
    for key, value in rep.notes:
        fields.append(f"{key}={'%.12g' % value}")
    return " ".join(fields)


# ---------------------------------------------------------------------------
# Shared pattern machinery.  Exact mode enumerates 2^n masks with Bernoulli
# weights; mc mode samples masks from one seeded stream and dedupes them.
# ---------------------------------------------------------------------------

def _exact_masks(n: int, rate: float):
    if n > EXACT_BERNOULLI_MAX_N:
        raise CapacityError(f"exact enumeration needs 2^{n} patterns")
    bits = mask_bits(n)
    return bits, bernoulli_weights(bits, rate)


def _sampled_masks(n: int, rate: float, trials: int, rng: np.random.Generator):
    draws = rng.random((trials, n)) < rate
    pows = np.uint64(1) << np.arange(n, dtype=np.uint64)
    codes, counts = np.unique(draws.astype(np.uint64) @ pows, return_counts=True)
    bits = ((codes[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(
        np.float64
    )
    return bits, counts


def _exact_signs(count: int):
    if count > _EXACT_SIGN_MAX:
        raise CapacityError(f"exact sign enumeration needs 2^{count} patterns")
    signs = 2.0 * mask_bits(count) - 1.0
    return signs, np.full(signs.shape[0], 1.0 / signs.shape[0])


def _sampled_signs(count: int, trials: int, rng: np.random.Generator):
    draws = rng.integers(0, 2, size=(trials, count)).astype(bool)
    pows = np.uint64(1) << np.arange(count, dtype=np.uint64)
    codes, counts = np.unique(draws.astype(np.uint64) @ pows, return_counts=True)
    bits = ((codes[:, None] >> np.arange(count, dtype=np.uint64)) & np.uint64(1)).astype(
        np.float64
    )
    return 2.0 * bits - 1.0, counts


def _moment_of(values, weights, counts, trials, p):
    """((E v^p)^(1/p), stderr); exact when trials == 0."""
    if trials == 0:
        return power_mean(values, weights, p), 0.0
    return weighted_moment_stats(values, counts, trials, p)


def _col_norms_selected(x: np.ndarray, col_bits: np.ndarray) -> np.ndarray:
    """max Euclidean norm over the selected columns, per mask row."""
    cn2 = np.sum(x * x, axis=0)
    return np.sqrt(np.max(col_bits * cn2[None, :], axis=1))


def _col_norms_row_masked(x: np.ndarray, row_bits: np.ndarray) -> np.ndarray:
    """max column norm of the row-restricted matrix, per mask row."""
    return np.sqrt(np.max(row_bits @ (x * x), axis=1))


def _schatten_batch(stack: np.ndarray, p: float) -> np.ndarray:
    svs = np.linalg.svd(stack, compute_uv=False)
    top = svs[:, 0]
    out = np.zeros(stack.shape[0])
    ok = top > 0
    if np.any(ok):
        scaled = svs[ok] / top[ok, None]
        out[ok] = top[ok] * np.sum(scaled ** p, axis=1) ** (1.0 / p)
    return out


def _need(cond: bool, case: str, what: str) -> None:
    if not cond:
        raise PreconditionError(f"{case}: hypothesis failed: {what}")


def _square_matrix(inst: InequalityInstance, case: str) -> DenseMatrix:
    _need(inst.matrix is not None, case, "matrix required")
    _need(inst.matrix.is_square, case, "matrix must be square")
    return inst.matrix


# ---------------------------------------------------------------------------
# Case definitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCase:
    id: str
    description: str
    check: Callable[[InequalityInstance], None]
    evaluate: Callable[[InequalityInstance, str, int, Seed | None], tuple]
    dims: Callable[[InequalityInstance], int]
    params: Callable[[InequalityInstance], tuple]


def _check_model_equiv(inst):
    a = _square_matrix(inst, "MODEL_EQUIV")
    _need(inst.k is not None and 1 <= inst.k <= a.n_rows, "MODEL_EQUIV", "1 <= k <= n")
    _need(a.n_rows % inst.k == 0, "MODEL_EQUIV", "k must divide n")
    _need(inst.p > 0, "MODEL_EQUIV", "p > 0")


def _eval_model_equiv(inst, method, trials, seed):
    a, k, p = inst.matrix, inst.k, inst.p
    n = a.n_rows
    rate = k / n
    factor = 2.0 ** (1.0 / p)
    if method == "exact":
        lhs = exact_moment(a, UniformK(n, k), p).value
        ref = exact_moment(a, Bernoulli(n, rate), p).value
        return lhs, factor * ref, 0.0, ()
    est_l = mc_moment(a, UniformK(n, k), p, trials, seed, index=0)
    est_r = mc_moment(a, Bernoulli(n, rate), p, trials, seed, index=1)
    se = math.hypot(est_l.stderr, factor * est_r.stderr)
    return est_l.value, factor * est_r.value, se, ()


def _check_decoupling(inst):
    b = _square_matrix(inst, "DECOUPLING")
    diag = np.abs(np.diag(b.data)).max() if b.n_rows else 0.0
    _need(diag == 0.0, "DECOUPLING", "zero diagonal")
    _need(inst.p >= 1, "DECOUPLING", "p >= 1")
    _need(inst.rate is not None and 0.0 <= inst.rate <= 1.0, "DECOUPLING", "rate in [0, 1]")


def _eval_decoupling(inst, method, trials, seed):
    b, rate, p = inst.matrix, inst.rate, inst.p
    n = b.n_rows
    if method == "exact":
        lhs = exact_moment(b, Bernoulli(n, rate), p).value
        pair = exact_moment(b, BernoulliPair(n, rate), p).value
        return lhs, 20.0 * pair, 0.0, ()
    est_l = mc_moment(b, Bernoulli(n, rate), p, trials, seed, index=0)
    est_r = mc_moment(b, BernoulliPair(n, rate), p, trials, seed, index=1)
    se = math.hypot(est_l.stderr, 20.0 * est_r.stderr)
    return est_l.value, 20.0 * est_r.value, se, ()


def _check_restrict_rv(inst):
    x = _square_matrix(inst, "RESTRICT_RV")
    n = x.n_rows
    _need(2.0 * math.log(n) >= 2.0 if n else False, "RESTRICT_RV", "2 log n >= 2")
    _need(inst.p >= 2.0 * math.log(n), "RESTRICT_RV", "p >= 2 log n")
    _need(inst.rate is not None and 0.0 <= inst.rate <= 1.0, "RESTRICT_RV", "rate in [0, 1]")


def _eval_restrict_rv(inst, method, trials, seed):
    x, rate, p = inst.matrix.data, inst.rate, inst.p
    n = x.shape[0]
    if method == "exact":
        bits, weights = _exact_masks(n, rate)
        counts = None
    else:
        bits, counts = _sampled_masks(n, rate, trials, seed.rng("ineq:RESTRICT_RV"))
        weights = None
    spec_vals = masked_norms(x, np.ones_like(bits), bits)
    col_vals = _col_norms_selected(x, bits)
    t = 0 if method == "exact" else trials
    lhs, se_l = _moment_of(spec_vals, weights, counts, t, p)
    colm, se_c = _moment_of(col_vals, weights, counts, t, p)
    factor = 3.0 * math.sqrt(p)
    rhs = factor * colm + math.sqrt(rate) * spectral_norm(inst.matrix)
    return lhs, rhs, math.hypot(se_l, factor * se_c), ()


def _check_colnorm(inst):
    x = _square_matrix(inst, "COLNORM")
    n = x.n_rows
    _need(2.0 * math.log(n) >= 4.0 if n else False, "COLNORM", "2 log n >= 4")
    _need(inst.p >= 2.0 * math.log(n), "COLNORM", "p >= 2 log n")
    _need(inst.rate is not None and 0.0 <= inst.rate <= 1.0, "COLNORM", "rate in [0, 1]")


def _eval_colnorm(inst, method, trials, seed):
    x, rate, p = inst.matrix.data, inst.rate, inst.p
    n = x.shape[0]
    if method == "exact":
        bits, weights = _exact_masks(n, rate)
        counts = None
    else:
        bits, counts = _sampled_masks(n, rate, trials, seed.rng("ineq:COLNORM"))
        weights = None
    vals = _col_norms_row_masked(x, bits)
    t = 0 if method == "exact" else trials
    lhs, se = _moment_of(vals, weights, counts, t, p)
    tail = math.sqrt(rate) * max_column_norm(inst.matrix)
    rhs = 3.0 * math.sqrt(p) * max_abs_entry(inst.matrix) + tail
    rhs_proof = 2.0 ** 1.5 * math.sqrt(p) * max_abs_entry(inst.matrix) + tail
    notes = (
        ("rhs_proof_constant", rhs_proof),
        ("holds_proof_constant", 1.0 if lhs <= rhs_proof + _SLACK * max(1.0, rhs_proof) else 0.0),
    )
    return lhs, rhs, se, notes


def _check_rudelson(inst):
    _need(inst.matrix is not None, "RUDELSON", "matrix required")
    cols = inst.matrix.n_cols
    _need(cols >= 1, "RUDELSON", "at least one column")
    _need(inst.p >= 2.0, "RUDELSON", "p >= 2")
    _need(inst.p >= 2.0 * math.log(cols), "RUDELSON", "p >= 2 log n_cols")


def _eval_rudelson(inst, method, trials, seed):
    x, p = inst.matrix, inst.p
    model = RademacherSigns(x.n_cols)
    if method == "exact":
        lhs, se = exact_moment(x, model, p).value, 0.0
    else:
        est = mc_moment(x, model, p, trials, seed, index=0)
        lhs, se = est.value, est.stderr
    rhs = rudelson_bound(p, max_column_norm(x), spectral_norm(x))
    return lhs, rhs, se, ()


def _check_nc_khintchine(inst):
    _need(bool(inst.matrices), "NC_KHINTCHINE", "matrix sequence required")
    shapes = {m.shape for m in inst.matrices}
    _need(len(shapes) == 1, "NC_KHINTCHINE", "matrices must share one shape")
    _need(inst.p >= 2, "NC_KHINTCHINE", "p >= 2")


def _eval_nc_khintchine(inst, method, trials, seed):
    mats = np.stack([m.data for m in inst.matrices])
    count, p = mats.shape[0], inst.p
    if method == "exact":
        signs, weights = _exact_signs(count)
        counts = None
    else:
        signs, counts = _sampled_signs(count, trials, seed.rng("ineq:NC_KHINTCHINE"))
        weights = None
    sums = np.einsum("sj,jrc->src", signs, mats)
    vals = _schatten_batch(sums, p)
    t = 0 if method == "exact" else trials
    lhs, se = _moment_of(vals, weights, counts, t, p)
    gram_left = np.einsum("jrc,jsc->rs", mats, mats)
    gram_right = np.einsum("jrc,jrs->cs", mats, mats)
    sides = []
    for gram in (gram_left, gram_right):
        eig = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
        sides.append(float(np.sum(eig ** (p / 2.0)) ** (1.0 / p)))
    square_fn = max(sides)
    exact_const, bound_const = khintchine_constant(p)
    rhs = bound_const * square_fn
    notes = (("rhs_exact_constant", exact_const * square_fn),) if exact_const else ()
    return lhs, rhs, se, notes


def _check_scalar_khintchine(inst):
    _need(bool(inst.vector), "SCALAR_KHINTCHINE", "coefficient vector required")
    _need(inst.p >= 2, "SCALAR_KHINTCHINE", "q >= 2")


def _eval_scalar_khintchine(inst, method, trials, seed):
    a = np.asarray(inst.vector, dtype=float)
    q = inst.p
    if method == "exact":
        signs, weights = _exact_signs(a.size)
        counts = None
    else:
        signs, counts = _sampled_signs(a.size, trials, seed.rng("ineq:SCALAR_KHINTCHINE"))
        weights = None
    vals = np.abs(signs @ a)
    t = 0 if method == "exact" else trials
    lhs, se = _moment_of(vals, weights, counts, t, q)
    rhs = haagerup_constant(q) * float(np.sqrt(np.sum(a * a)))
    return lhs, rhs, se, ()


def _check_step3(inst):
    a = _square_matrix(inst, "STEP3")
    n = a.n_rows
    _need(n >= 8, "STEP3", "n >= 8")
    norm = spectral_norm(a)
    _need(abs(norm - 1.0) <= 1e-9, "STEP3", "unit spectral norm")
    _need(inst.mu is not None and inst.mu > 0, "STEP3", "mu > 0")
    _need(
        max_abs_entry(a) <= inst.mu * (1.0 + _SLACK),
        "STEP3",
        "entries bounded by mu",
    )
    _need(inst.rate is not None and 0.0 < inst.rate < 1.0, "STEP3", "rate in (0, 1)")
    _need(inst.p == 2 * math.ceil(math.log(n)), "STEP3", "p = 2 ceil(log n)")


def _eval_step3(inst, method, trials, seed):
    a, rate, p = inst.matrix, inst.rate, inst.p
    n = a.n_rows
    if method == "exact":
        lhs, se = exact_moment(a, Bernoulli(n, rate), p).value, 0.0
    else:
        est = mc_moment(a, Bernoulli(n, rate), p, trials, seed, index=0)
        lhs, se = est.value, est.stderr
    return lhs, step3_bound(inst.mu, rate, n), se, ()


def _check_extrap(inst):
    x = _square_matrix(inst, "EXTRAP")
    _need(spectral_norm(x) <= 1.0 + 1e-9, "EXTRAP", "||X|| <= 1")
    _need(inst.delta is not None and 0.0 < inst.delta < 1.0, "EXTRAP", "delta in (0, 1)")
    _need(inst.rho is not None and 0.0 < inst.rho < 0.5, "EXTRAP", "rho in (0, 0.5)")
    _need(inst.lam is not None and 0.0 < inst.lam < 1.0, "EXTRAP", "lambda in (0, 1)")
    _need(
        inst.p == int(inst.p) and int(inst.p) % 2 == 0 and inst.p >= 2,
        "EXTRAP",
        "p even",
    )
    _need(inst.p >= 2.0 * math.log(x.n_rows), "EXTRAP", "p >= 2 log n")


def _eval_extrap(inst, method, trials, seed):
    rep = check_extrapolation(
        inst.matrix, inst.delta, inst.rho, inst.lam, int(inst.p),
        method=method, trials=trials, seed=seed,
    )
    return rep.lhs, rep.rhs, rep.stderr, (("constant", rep.constant),)


def _matrix_dims(inst):
    return inst.matrix.n_rows


CASES: dict[str, InequalityCase] = {}


def _register(case: InequalityCase) -> None:
    CASES[case.id] = case


_register(InequalityCase(
    id="MODEL_EQUIV",
    description="uniform-k restriction moment vs doubled independent-rate moment",
    check=_check_model_equiv,
    evaluate=_eval_model_equiv,
    dims=_matrix_dims,
    params=lambda i: (("k", float(i.k)), ("rate", i.k / i.matrix.n_rows)),
))

_register(InequalityCase(
    id="DECOUPLING",
    description="one-projector restriction moment vs 20x decoupled pair moment",
    check=_check_decoupling,
    evaluate=_eval_decoupling,
    dims=_matrix_dims,
    params=lambda i: (("rate", i.rate),),
))

_register(InequalityCase(
    id="RESTRICT_RV",
    description="column-restriction spectral moment vs column-norm term plus sqrt(rate) tail",
    check=_check_restrict_rv,
    evaluate=_eval_restrict_rv,
    dims=_matrix_dims,
    params=lambda i: (("rate", i.rate),),
))

_register(InequalityCase(
    id="COLNORM",
    description="row-restriction max-column-norm moment vs entry and column bounds",
    check=_check_colnorm,
    evaluate=_eval_colnorm,
    dims=_matrix_dims,
    params=lambda i: (("rate", i.rate),),
))

_register(InequalityCase(
    id="RUDELSON",
    description="Rademacher column outer-product sum vs 1.5 sqrt(p) norm product",
    check=_check_rudelson,
    evaluate=_eval_rudelson,
    dims=_matrix_dims,
    params=lambda i: (),
))

_register(InequalityCase(
    id="NC_KHINTCHINE",
    description="matrix Rademacher sum Schatten moment vs square-function bound",
    check=_check_nc_khintchine,
    evaluate=_eval_nc_khintchine,
    dims=lambda i: i.matrices[0].n_rows,
    params=lambda i: (("count", float(len(i.matrices))),),
))

_register(InequalityCase(
    id="SCALAR_KHINTCHINE",
    description="scalar Rademacher sum moment vs Euclidean norm bound",
    check=_check_scalar_khintchine,
    evaluate=_eval_scalar_khintchine,
    dims=lambda i: len(i.vector),
    params=lambda i: (),
))

_register(InequalityCase(
    id="STEP3",
    description="restricted moment of a unit-norm bounded matrix vs closed-form bound",
    check=_check_step3,
    evaluate=_eval_step3,
    dims=_matrix_dims,
    params=lambda i: (("mu", i.mu), ("rate", i.rate)),
))

_register(InequalityCase(
    id="EXTRAP",
    description="constant-rate moment vs extrapolation from a small rate",
    check=_check_extrap,
    evaluate=_eval_extrap,
    dims=_matrix_dims,
    params=lambda i: (("delta", i.delta), ("rho", i.rho), ("lambda", i.lam)),
))

CASE_IDS = tuple(CASES)


def verify_inequality(
    case_id: str,
    instance: InequalityInstance,
    method: str = "exact",
    trials: int = 0,
    seed: Seed | None = None,
) -> InequalityReport:
    """Evaluate one registered inequality on one instance."""
    if case_id not in CASES:
        raise ParameterError(f"unknown inequality case {case_id!r}; known: {CASE_IDS}")
    if method not in ("exact", "mc"):
        raise ParameterError(f"method must be 'exact' or 'mc', got {method!r}")
    if method == "mc":
        if trials < 2:
            raise ParameterError("mc method needs trials >= 2")
        if seed is None:
            raise ParameterError("mc method needs a seed")
    case = CASES[case_id]
    case.check(instance)
    lhs, rhs, se, notes = case.evaluate(instance, method, trials, seed)
    if method == "exact":
        holds = lhs <= rhs + _SLACK * max(1.0, abs(rhs))
        trials = 0
    else:
        holds = (lhs - rhs) <= 3.0 * se
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return InequalityReport(
        case=case_id,
        n=case.dims(instance),
        p=instance.p,
        params=case.params(instance),
        lhs=float(lhs),
        rhs=float(rhs),
        ratio=float(ratio),
        method=method,
        trials=trials,
        seed=None if seed is None else seed.master,
        holds=bool(holds),
        notes=notes,
    )
