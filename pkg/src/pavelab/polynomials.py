"""Trace-moment polynomial machinery and the extrapolation check.

For a symmetric contraction X and even p, the map s -> E trace(R_s X R_s)^p
is a degree-p polynomial with no constant term that sandwiches the moment
E ||R_s X R_s||^p between itself and an e^p multiple.  Markov's coefficient
bound applied to that polynomial is what lets a moment measured at a small
selection rate be extrapolated to a constant rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ParameterError, PavelabError, PreconditionError
from .matrices import DenseMatrix, max_abs_entry, spectral_norm
from .moments import (
    bernoulli_weights,
    exact_moment,
    mask_bits,
    masked_norms,
    mc_moment,
)
from .sampling import Bernoulli, Seed

TRACE_POLY_MAX_N = 12
TRACE_POLY_MAX_P = 12
_SLACK = 1e-12


@dataclass(frozen=True)
class PolyCoefficients:
    """Coefficients c_1..c_degree of a polynomial with zero constant term."""

    degree: int
    coeffs: tuple[float, ...]

    def evaluate(self, s: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = (acc + c) * s
        return acc


@dataclass(frozen=True)
class SandwichReport:
    s_grid: tuple[float, ...]
    norm_moments: tuple[float, ...]   # F(s) = E ||R_s X R_s||^p
    trace_moments: tuple[float, ...]  # E trace (R_s X R_s)^p
    p: int
    holds: bool
    monotone: bool


@dataclass(frozen=True)
class MarkovReport:
    degree: int
    max_abs: float
    coeff_abs: tuple[float, ...]
    coeff_bounds: tuple[float, ...]
    exp_bound: float
    holds: bool


@dataclass(frozen=True)
class ExtrapolationReport:
    lhs: float
    rhs: float
    ratio: float
    constant: float
    delta: float
    rho: float
    lam: float
    p: int
    method: str
    trials: int
    stderr: float
    holds: bool


def _is_symmetric(a: DenseMatrix) -> bool:
    return a.is_square and bool(np.array_equal(a.data, a.data.T))


def _check_even_p(p, n: int, what: str) -> int:
    if int(p) != p or int(p) % 2 != 0 or p < 2:
        raise PreconditionError(f"{what}: p must be a positive even integer, got {p}")
    if p < 2 * math.log(n):
        raise PreconditionError(f"{what}: needs p >= 2 log n (p={p}, n={n})")
    return int(p)


def subset_traces_and_norms(x: DenseMatrix, p: int):
    """trace((X_sigma)^p) and ||X_sigma|| over all coordinate masks."""
    n = x.n_rows
    if n > TRACE_POLY_MAX_N:
        raise CapacityError(f"trace enumeration needs 2^{n} patterns")
    bits = mask_bits(n)
    stack = x.data[None, :, :] * bits[:, :, None] * bits[:, None, :]
    norms = np.linalg.svd(stack, compute_uv=False)[:, 0]
    # square-and-multiply on the whole stack
    result = None
    base = stack
    e = p
    while e:
        if e & 1:
            result = base if result is None else result @ base
        e >>= 1
        if e:
            base = base @ base
    traces = np.einsum("bii->b", result)
    return bits, traces, norms


def restricted_trace_moment(x: DenseMatrix, p: int, s: float) -> float:
    """Exact E trace (R_s X R_s)^p by pattern enumeration."""
    bits, traces, _ = subset_traces_and_norms(x, p)
    return float(np.sum(bernoulli_weights(bits, s) * traces))


def restricted_norm_moment_pth(x: DenseMatrix, p: int, s: float) -> float:
    """Exact F(s) = E ||R_s X R_s||^p (the p-th power, not its root)."""
    n = x.n_rows
    if n > TRACE_POLY_MAX_N:
        raise CapacityError(f"norm enumeration needs 2^{n} patterns")
    bits = mask_bits(n)
    norms = masked_norms(x.data, bits, bits)
    return float(np.sum(bernoulli_weights(bits, s) * norms ** p))


def _chebyshev_nodes_unit(count: int) -> np.ndarray:
    i = np.arange(count)
    return (np.cos((2 * i + 1) * math.pi / (2 * count)) + 1.0) / 2.0


def trace_moment_polynomial(x: DenseMatrix, p) -> PolyCoefficients:
    """Coefficients of s -> E trace (R_s X R_s)^p.

    Exact trace moments are evaluated at p+1 Chebyshev nodes in (0, 1) and
    interpolated; the fitted constant term must vanish and the node residual
    must stay below 1e-8 (checked, on the entry-normalized problem).
    """
    if not x.is_square:
        raise ParameterError("trace moments need a square matrix")
    if int(p) != p or p % 2 != 0 or p < 2 or p > TRACE_POLY_MAX_P:
        raise ParameterError(f"p must be even with 2 <= p <= {TRACE_POLY_MAX_P}")
    p = int(p)
    scale = max(1.0, max_abs_entry(x))
    bits, traces, _ = subset_traces_and_norms(DenseMatrix(x.data / scale), p)
    nodes = _chebyshev_nodes_unit(p + 1)
    values = np.array(
        [np.sum(bernoulli_weights(bits, s) * traces) for s in nodes]
    )
    vander = np.vander(nodes, p + 1, increasing=True)
    coeffs = np.linalg.solve(vander, values)
    residual = float(np.max(np.abs(vander @ coeffs - values)))
    if residual >= 1e-8:
        raise PavelabError(f"interpolation residual {residual:g} exceeds 1e-8")
    if abs(coeffs[0]) >= 1e-8:
        raise PavelabError(f"constant term {coeffs[0]:g} should vanish")
    return PolyCoefficients(
        degree=p, coeffs=tuple(float(c) * scale ** p for c in coeffs[1:])
    )


def check_polynomial_sandwich(x: DenseMatrix, p, s_grid) -> SandwichReport:
    """Verify F(s) <= E trace (R_s X R_s)^p <= e^p F(s) and F monotone.

    Requires a symmetric matrix with norm at most one (the trace lower bound
    fails for non-normal inputs) and even p >= 2 log n.
    """
    if not x.is_square or x.n_rows > TRACE_POLY_MAX_N:
        raise PreconditionError(f"sandwich: needs square n <= {TRACE_POLY_MAX_N}")
    if not _is_symmetric(x):
        raise PreconditionError("sandwich: needs a symmetric matrix")
    if spectral_norm(x) > 1.0 + 1e-9:
        raise PreconditionError("sandwich: needs ||X|| <= 1")
    p = _check_even_p(p, x.n_rows, "sandwich")
    grid = tuple(sorted(float(s) for s in s_grid))
    if not grid or grid[0] < 0.0 or grid[-1] > 1.0:
        raise PreconditionError("sandwich: grid must lie in [0, 1]")
    bits, traces, norms = subset_traces_and_norms(x, p)
    f_vals, t_vals = [], []
    for s in grid:
        w = bernoulli_weights(bits, s)
        f_vals.append(float(np.sum(w * norms ** p)))
        t_vals.append(float(np.sum(w * traces)))
    scale = math.exp(p)
    holds = all(
        f <= t + _SLACK and t <= scale * f + _SLACK
        for f, t in zip(f_vals, t_vals)
    )
    monotone = all(
        f_vals[i] <= f_vals[i + 1] + _SLACK for i in range(len(f_vals) - 1)
    )
    return SandwichReport(
        s_grid=grid,
        norm_moments=tuple(f_vals),
        trace_moments=tuple(t_vals),
        p=p,
        holds=holds,
        monotone=monotone,
    )


def polynomial_sup_unit_interval(coeffs, grid_points: int = 10001) -> float:
    """max |r(t)| over [-1, 1]: dense grid plus refinement around the argmax."""
    c = np.asarray(coeffs, dtype=float)
    ts = np.linspace(-1.0, 1.0, grid_points)
    vals = np.abs(np.polynomial.polynomial.polyval(ts, c))
    i = int(np.argmax(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid_points - 1)]
    fine = np.linspace(lo, hi, 1001)
    best = np.max(np.abs(np.polynomial.polynomial.polyval(fine, c)))
    return float(max(vals[i], best))


def check_markov(coeffs, d: int) -> MarkovReport:
    """Verify |c_k| <= (d^k / k!) max|r| <= e^d max|r| for every coefficient.

    `coeffs` lists c_0..c_deg of r(t); d bounds the degree.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        raise ParameterError("empty coefficient list")
    if d < c.size - 1:
        raise ParameterError(f"degree bound d={d} below polynomial degree {c.size - 1}")
    sup = polynomial_sup_unit_interval(c)
    bounds = [d ** k / math.factorial(k) * sup for k in range(c.size)]
    exp_bound = math.exp(d) * sup
    holds = all(
        abs(ck) <= bk + _SLACK * max(1.0, bk) and bk <= exp_bound + _SLACK * max(1.0, exp_bound)
        for ck, bk in zip(c, bounds)
    )
    return MarkovReport(
        degree=d,
        max_abs=sup,
        coeff_abs=tuple(abs(v) for v in c),
        coeff_bounds=tuple(bounds),
        exp_bound=exp_bound,
        holds=holds,
    )


def chebyshev_coefficients(d: int) -> list[int]:
    """Monomial coefficients c_0..c_d of the degree-d Chebyshev polynomial."""
    if d < 0:
        raise ParameterError("degree must be >= 0")
    prev, cur = [1], [0, 1]
    if d == 0:
        return prev
    for _ in range(d - 1):
        nxt = [0] + [2 * v for v in cur]
        for i, v in enumerate(prev):
            nxt[i] -= v
        prev, cur = cur, nxt
    return cur


def check_extrapolation(
    x: DenseMatrix,
    delta: float,
    rho: float,
    lam: float,
    p,
    method: str = "exact",
    trials: int = 0,
    seed: Seed | None = None,
) -> ExtrapolationReport:
    """Check the rate-extrapolation bound on restricted-norm moments.

    lhs = (E ||R_delta X R_delta||^p)^(1/p) against
    rhs = C [delta^lam + rho^(-lam) (E ||R_rho X R_rho||^p)^(1/p)],
    with C = 60, halved for symmetric inputs.
    """
    if not x.is_square:
        raise PreconditionError("extrapolation: needs a square matrix")
    n = x.n_rows
    if spectral_norm(x) > 1.0 + 1e-9:
        raise PreconditionError("extrapolation: needs ||X|| <= 1")
    if not 0.0 < delta < 1.0:
        raise PreconditionError(f"extrapolation: delta must be in (0, 1), got {delta}")
    if not 0.0 < rho < 0.5:
        raise PreconditionError(f"extrapolation: rho must be in (0, 0.5), got {rho}")
    if not 0.0 < lam < 1.0:
        raise PreconditionError(f"extrapolation: lambda must be in (0, 1), got {lam}")
    p = _check_even_p(p, n, "extrapolation")
    constant = 30.0 if _is_symmetric(x) else 60.0
    if method == "exact":
        lhs = exact_moment(x, Bernoulli(n, delta), p).value
        ref = exact_moment(x, Bernoulli(n, rho), p).value
        se = 0.0
        trials = 0
    elif method == "mc":
        if seed is None:
            raise ParameterError("mc method needs a seed")
        est_l = mc_moment(x, Bernoulli(n, delta), p, trials, seed, index=0)
        est_r = mc_moment(x, Bernoulli(n, rho), p, trials, seed, index=1)
        lhs, ref = est_l.value, est_r.value
        se = math.hypot(est_l.stderr, constant * rho ** (-lam) * est_r.stderr)
    else:
        raise ParameterError(f"method must be 'exact' or 'mc', got {method!r}")
    rhs = constant * (delta ** lam + rho ** (-lam) * ref)
    if method == "exact":
        holds = lhs <= rhs + _SLACK * max(1.0, rhs)
    else:
        holds = lhs - rhs <= 3.0 * se
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return ExtrapolationReport(
        lhs=lhs, rhs=rhs, ratio=ratio, constant=constant,
        delta=delta, rho=rho, lam=lam, p=p,
        method=method, trials=trials, stderr=se, holds=bool(holds),
    )
