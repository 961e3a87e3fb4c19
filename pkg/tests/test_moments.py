import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pavelab import (
    Bernoulli,
    BernoulliPair,
    CapacityError,
    DenseMatrix,
    ParameterError,
    RademacherSigns,
    Seed,
    UniformK,
    exact_moment,
    mc_moment,
    spectral_norm,
)

from pavelab.moments import weighted_moment_stats

from .conftest import square_matrices
from .oracles import brute_force_pair_moment, brute_force_sign_moment


class TestExactMoment:
    def test_zero_matrix(self):
        for model in (Bernoulli(4, 0.3), UniformK(4, 2), BernoulliPair(4, 0.5)):
            assert exact_moment(DenseMatrix.zeros(4), model, 4.0).value == 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0, 5.0])
    def test_scalar_matrix(self, p):
        # single coordinate: kept with probability delta, norm |a|
        delta, a = 0.37, -2.5
        est = exact_moment(DenseMatrix([[a]]), Bernoulli(1, delta), p)
        assert est.value == pytest.approx(delta ** (1 / p) * abs(a), rel=1e-14)

    @pytest.mark.parametrize("p", [2.0, 4.0])
    def test_two_by_two_identity(self, p):
        # norm is 1 unless no coordinate survives: value (delta(2-delta))^(1/p)
        delta = 0.3
        est = exact_moment(DenseMatrix.identity(2), Bernoulli(2, delta), p)
        assert est.value == pytest.approx((delta * (2 - delta)) ** (1 / p), rel=1e-14)

    def test_full_selection_equals_spectral_norm(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (5, 5)))
        norm = spectral_norm(a)
        assert exact_moment(a, UniformK(5, 5), 4.0).value == pytest.approx(norm, rel=1e-14)
        assert exact_moment(a, Bernoulli(5, 1.0), 6.0).value == pytest.approx(norm, rel=1e-14)

    def test_estimate_fields(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (4, 4)))
        est = exact_moment(a, Bernoulli(4, 0.5), 2.0)
        assert est.trials == 0 and est.stderr == 0.0 and est.exact

    def test_rate_monotonicity(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (6, 6)))
        values = [
            exact_moment(a, Bernoulli(6, r), 4.0).value
            for r in (0.1, 0.25, 0.5, 0.75, 0.9)
        ]
        assert all(u <= v + 1e-12 for u, v in zip(values, values[1:]))

    def test_p_monotonicity(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (5, 5)))
        for model in (Bernoulli(5, 0.4), UniformK(5, 2)):
            values = [exact_moment(a, model, p).value for p in (1.0, 2.0, 4.0, 8.0)]
            assert all(u <= v + 1e-12 for u, v in zip(values, values[1:]))

    def test_value_bounded_by_spectral_norm(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (5, 5)))
        norm = spectral_norm(a)
        for model in (Bernoulli(5, 0.6), UniformK(5, 3), BernoulliPair(5, 0.6)):
            assert exact_moment(a, model, 6.0).value <= norm + 1e-12

    def test_pair_matches_brute_force(self, rng):
        a = rng.uniform(-1, 1, (3, 3))
        got = exact_moment(DenseMatrix(a), BernoulliPair(3, 0.35), 4.0).value
        assert got == pytest.approx(brute_force_pair_moment(a, 0.35, 4.0), abs=1e-10)

    def test_signs_match_brute_force(self, rng):
        a = rng.uniform(-1, 1, (4, 4))
        got = exact_moment(DenseMatrix(a), RademacherSigns(4), 4.0).value
        assert got == pytest.approx(brute_force_sign_moment(a, 4.0), abs=1e-10)

    def test_uniform_k_matches_brute_force(self, rng):
        a = rng.uniform(-1, 1, (5, 5))
        k, p = 2, 4.0
        vals = []
        for combo in itertools.combinations(range(5), k):
            sub = a[np.ix_(combo, combo)]
            vals.append(np.linalg.norm(sub, 2) ** p)
        expect = (sum(vals) / len(vals)) ** (1 / p)
        got = exact_moment(DenseMatrix(a), UniformK(5, k), p).value
        assert got == pytest.approx(expect, rel=1e-12)

    def test_capacity_errors(self):
        big = DenseMatrix.zeros(15)
        with pytest.raises(CapacityError):
            exact_moment(big, Bernoulli(15, 0.5), 2.0)
        with pytest.raises(CapacityError):
            exact_moment(big, RademacherSigns(15), 2.0)
        with pytest.raises(CapacityError):
            exact_moment(DenseMatrix.zeros(9), BernoulliPair(9, 0.5), 2.0)
        with pytest.raises(CapacityError):
            exact_moment(DenseMatrix.zeros(30), UniformK(30, 15), 2.0)

    def test_rejects_bad_p(self):
        with pytest.raises(ParameterError):
            exact_moment(DenseMatrix.identity(2), Bernoulli(2, 0.5), 0.0)

    def test_rejects_model_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            exact_moment(DenseMatrix.identity(3), Bernoulli(4, 0.5), 2.0)


class TestMcMoment:
    def test_zero_matrix(self):
        est = mc_moment(DenseMatrix.zeros(4), Bernoulli(4, 0.3), 4.0, 100, Seed(1))
        assert est.value == 0.0 and est.stderr == 0.0

    def test_rate_one_is_exact(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (6, 6)))
        est = mc_moment(a, Bernoulli(6, 1.0), 4.0, 500, Seed(2))
        assert est.value == spectral_norm(a)
        assert est.stderr == 0.0

    def test_within_three_stderr_of_exact(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (10, 10)))
        exact = exact_moment(a, Bernoulli(10, 0.3), 4.0).value
        est = mc_moment(a, Bernoulli(10, 0.3), 4.0, 10 ** 5, Seed(5))
        assert abs(est.value - exact) <= 3 * est.stderr

    def test_uniform_k_within_three_stderr(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (8, 8)))
        exact = exact_moment(a, UniformK(8, 3), 4.0).value
        est = mc_moment(a, UniformK(8, 3), 4.0, 5 * 10 ** 4, Seed(6))
        assert abs(est.value - exact) <= 3 * est.stderr

    def test_pair_within_three_stderr(self, rng):
        a = rng.uniform(-1, 1, (5, 5))
        np.fill_diagonal(a, 0.0)
        b = DenseMatrix(a)
        exact = exact_moment(b, BernoulliPair(5, 0.4), 2.0).value
        est = mc_moment(b, BernoulliPair(5, 0.4), 2.0, 5 * 10 ** 4, Seed(7))
        assert abs(est.value - exact) <= 3 * est.stderr

    def test_signs_within_three_stderr(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (6, 6)))
        exact = exact_moment(a, RademacherSigns(6), 4.0).value
        est = mc_moment(a, RademacherSigns(6), 4.0, 5 * 10 ** 4, Seed(8))
        assert abs(est.value - exact) <= 3 * est.stderr

    def test_deterministic_given_seed(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (7, 7)))
        e1 = mc_moment(a, Bernoulli(7, 0.4), 4.0, 1000, Seed(9), index=2)
        e2 = mc_moment(a, Bernoulli(7, 0.4), 4.0, 1000, Seed(9), index=2)
        assert e1.value == e2.value and e1.stderr == e2.stderr

    def test_metadata(self, rng):
        a = DenseMatrix(rng.uniform(-1, 1, (4, 4)))
        est = mc_moment(a, Bernoulli(4, 0.5), 2.0, 250, Seed(10))
        assert est.trials == 250 and not est.exact and est.seed == Seed(10)

    def test_rejects_too_few_trials(self):
        with pytest.raises(ParameterError):
            mc_moment(DenseMatrix.identity(2), Bernoulli(2, 0.5), 2.0, 1, Seed(0))

    def test_large_matrix_path(self, rng):
        # n > 20 skips the dedupe path; result should still be sane
        a = DenseMatrix(rng.uniform(-1, 1, (24, 24)) / 24)
        est = mc_moment(a, Bernoulli(24, 0.5), 2.0, 64, Seed(11))
        assert 0.0 < est.value <= spectral_norm(a) + 1e-12
        assert est.stderr > 0.0


def test_weighted_stats_match_flat_formula(rng):
    values = rng.uniform(0.0, 2.0, 40)
    counts = rng.integers(1, 5, 40)
    trials = int(counts.sum())
    p = 4.0
    est, se = weighted_moment_stats(values, counts.astype(float), trials, p)
    flat = np.repeat(values, counts) ** p
    mean = flat.mean()
    assert est == pytest.approx(mean ** (1 / p), rel=1e-12)
    se_mean = math.sqrt(flat.var(ddof=1) / trials)
    assert se == pytest.approx((1 / p) * mean ** (1 / p - 1) * se_mean, rel=1e-12)


@given(square_matrices(min_n=1, max_n=5), st.floats(0.05, 0.95),
       st.sampled_from([1.0, 2.0, 4.0]))
@settings(max_examples=30, deadline=None)
def test_exact_moment_dominated_by_full_norm(a, rate, p):
    value = exact_moment(a, Bernoulli(a.n_rows, rate), p).value
    assert value <= spectral_norm(a) + 1e-12


@given(square_matrices(min_n=1, max_n=5), st.floats(0.05, 0.45),
       st.sampled_from([2.0, 4.0]))
@settings(max_examples=30, deadline=None)
def test_exact_moment_rate_monotone(a, rate, p):
    low = exact_moment(a, Bernoulli(a.n_rows, rate), p).value
    high = exact_moment(a, Bernoulli(a.n_rows, 2 * rate), p).value
    assert low <= high + 1e-12
