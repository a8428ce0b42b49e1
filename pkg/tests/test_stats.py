import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from sociobadge.stats import (
    cohens_kappa,
    fit_logistic,
    fit_null,
    likelihood_ratio_test,
    log_likelihood,
    score,
    t_test_cohen_d,
)

from oracles import bernoulli_ll, grid_search_ml


def logistic_data(seed, n, b0=-2.0, b1=0.03):
    rng = np.random.default_rng(seed)
    x = rng.gamma(1.5, 30.0, n)
    y = (rng.random(n) < 1 / (1 + np.exp(-(b0 + b1 * x)))).astype(int)
    return y, x


# ---- logistic regression

def test_null_closed_form():
    y = np.array([1, 0, 0, 0] * 25)
    for fit in (fit_null(y), fit_logistic(y, np.full(100, 3.0))):
        assert fit.intercept == pytest.approx(math.log(1 / 3), abs=1e-8)
        assert fit.slope == 0
        assert fit.mcfadden_r2 == 0.0
    assert fit_null(y).intercept == pytest.approx(-1.0986, abs=1e-4)


@pytest.mark.parametrize("seed, n", [(0, 40), (1, 120), (2, 300)])
def test_fit_matches_grid_oracle(seed, n):
    y, x = logistic_data(seed, n)
    fit = fit_logistic(y, x)
    best, _, _ = grid_search_ml(y.tolist(), x.tolist(), rounds=20)
    assert fit.converged
    assert fit.log_likelihood == pytest.approx(best, abs=1e-6)
    assert fit.log_likelihood >= best - 1e-9
    assert fit.log_likelihood == pytest.approx(bernoulli_ll(fit.intercept, fit.slope, y, x), abs=1e-9)


def test_recovers_known_coefficients():
    y, x = logistic_data(11, 4000)
    fit = fit_logistic(y, x)
    assert abs(fit.intercept + 2.0) < 3 * fit.se_intercept
    assert abs(fit.slope - 0.03) < 3 * fit.se_slope
    assert fit.slope > 0 and 0 < fit.mcfadden_r2 < 1
    assert fit.log_likelihood >= fit.null_log_likelihood


@pytest.mark.parametrize("seed", range(5))
def test_score_matches_finite_differences(seed):
    y, x = logistic_data(seed, 150)
    fit = fit_logistic(y, x)
    rng = np.random.default_rng(seed)
    for coef in ([fit.intercept, fit.slope], [fit.intercept + rng.normal(0, 0.3), fit.slope + rng.normal(0, 0.01)]):
        coef = np.array(coef)
        h = 1e-6 * np.maximum(1.0, np.abs(coef))
        fd = np.array([
            (log_likelihood(coef + h[k] * e, y, x) - log_likelihood(coef - h[k] * e, y, x)) / (2 * h[k])
            for k, e in enumerate(np.eye(2))
        ])
        analytic = score(coef, y, x)
        scale = max(1.0, np.abs(analytic).max())
        assert np.abs(analytic - fd).max() <= 1e-6 * scale


@pytest.mark.parametrize("k", [0.01, 60.0, -2.0])
def test_slope_scales_inversely_with_predictor(k):
    y, x = logistic_data(5, 200)
    a, b = fit_logistic(y, x), fit_logistic(y, k * x)
    assert b.slope == pytest.approx(a.slope / k, rel=1e-8)
    assert b.log_likelihood == pytest.approx(a.log_likelihood, abs=1e-9)
    assert b.mcfadden_r2 == pytest.approx(a.mcfadden_r2, abs=1e-10)
    assert np.allclose(b.predict(k * x), a.predict(x), atol=1e-9)


def test_separation_is_flagged():
    fit = fit_logistic([0, 0, 0, 1, 1, 1], [1, 2, 3, 4, 5, 6])
    assert fit.separated and not fit.converged and math.isnan(fit.slope)
    # quasi-complete: the classes touch at x = 3
    assert fit_logistic([0, 0, 1, 1], [1, 3, 3, 5]).separated


def test_constant_outcome_is_degenerate():
    fit = fit_logistic([1, 1, 1], [1.0, 2.0, 3.0])
    assert fit.degenerate and fit.intercept == math.inf and fit.mcfadden_r2 is None


def test_bad_inputs_rejected():
    with pytest.raises(ValueError):
        fit_logistic([0, 1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        fit_logistic([0, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        fit_logistic([1], [1])


# ---- likelihood ratio test

def test_lrt_against_itself():
    y, x = logistic_data(3, 100)
    fit = fit_logistic(y, x)
    res = likelihood_ratio_test(fit, fit)
    assert res.chi2 == 0 and res.p == 1 and res.heuristic


def test_lrt_null_vs_full_identity():
    y, x = logistic_data(4, 200)
    full, null = fit_logistic(y, x), fit_null(y)
    res = likelihood_ratio_test(full, null)
    assert res.df == 1 and not res.heuristic
    assert res.chi2 == pytest.approx(2 * (full.log_likelihood - null.log_likelihood))
    assert res.chi2 == pytest.approx(-2 * full.null_log_likelihood * full.mcfadden_r2)
    assert res.p == pytest.approx(scipy.stats.chi2.sf(res.chi2, 1))


def test_lrt_rejects_different_n():
    a = fit_logistic(*logistic_data(1, 50))
    b = fit_logistic(*logistic_data(1, 60))
    with pytest.raises(ValueError):
        likelihood_ratio_test(a, b)


# ---- t test

def test_t_test_hand_computed():
    res = t_test_cohen_d([1, 2, 3], [4, 5, 6])
    # pooled variance is 1, so t = -3 / sqrt(2/3) and d = -3
    assert res.t == pytest.approx(-3 / math.sqrt(2 / 3))
    assert res.cohen_d == pytest.approx(-3.0)
    assert res.df == 4


def test_t_test_identical_groups():
    res = t_test_cohen_d([1, 2, 4], [1, 2, 4])
    assert (res.t, res.cohen_d, res.p) == (0, 0, 1)


def test_t_test_zero_variance_undefined():
    res = t_test_cohen_d([2, 2], [2, 2, 2])
    assert res.t is None and res.p is None and res.cohen_d is None


@pytest.mark.filterwarnings("ignore:Precision loss")
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30),
       st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30))
def test_t_test_matches_scipy(a, b):
    res = t_test_cohen_d(a, b)
    ref = scipy.stats.ttest_ind(a, b)
    if res.t is None or not np.isfinite(ref.statistic) or abs(ref.statistic) > 1e6:
        return
    assert res.t == pytest.approx(ref.statistic, rel=1e-6, abs=1e-9)
    assert res.p == pytest.approx(ref.pvalue, rel=1e-6, abs=1e-12)
    assert np.sign(res.t) == np.sign(np.mean(a) - np.mean(b)) or res.t == 0


# ---- kappa

def test_kappa_hand_computed():
    # 2x2 table [[40, 10], [10, 40]]: p_o = 0.8, p_e = 0.5
    a = [1] * 50 + [0] * 50
    b = [1] * 40 + [0] * 10 + [1] * 10 + [0] * 40
    res = cohens_kappa(a, b)
    assert (res.observed_agreement, res.chance_agreement) == (0.8, 0.5)
    assert res.kappa == 0.6


def test_kappa_identical_and_constant():
    assert cohens_kappa("abcab", "abcab").kappa == 1.0
    assert cohens_kappa([1, 1, 1, 1], [0, 1, 0, 1]).kappa == 0.0
    assert cohens_kappa([1, 1], [1, 1]).kappa is None


@given(st.lists(st.tuples(st.sampled_from("xyz"), st.sampled_from("xyz")), min_size=1, max_size=40))
def test_kappa_symmetric(pairs):
    a, b = zip(*pairs)
    assert cohens_kappa(a, b) == cohens_kappa(b, a)
