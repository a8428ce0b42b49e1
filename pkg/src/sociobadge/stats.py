"""Logistic regression, likelihood-ratio and t tests, and Cohen's kappa.

The logistic fit is a plain Newton/IRLS solver for one predictor plus an
intercept. scipy is used only for the chi-square, t and normal tail
probabilities.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Hashable, Optional, Sequence

import numpy as np
from scipy import stats as _sps

MAX_ITER = 100
TOL = 1e-10


@dataclass(frozen=True)
class LogitFit:
    intercept: float
    slope: float
    se_intercept: float
    se_slope: float
    log_likelihood: float
    null_log_likelihood: float
    mcfadden_r2: Optional[float]
    n: int
    converged: bool
    iterations: int = 0
    n_params: int = 2
    separated: bool = False
    degenerate: bool = False

    @property
    def aic(self) -> float:
        return 2 * self.n_params - 2 * self.log_likelihood

    @property
    def z_slope(self) -> float:
        return self.slope / self.se_slope if self.se_slope > 0 else math.nan

    @property
    def p_slope(self) -> float:
        z = self.z_slope
        return float(2 * _sps.norm.sf(abs(z))) if not math.isnan(z) else math.nan

    def predict(self, predictor) -> np.ndarray:
        return _expit(self.intercept + self.slope * np.asarray(predictor, dtype=float))

    def summary(self) -> dict[str, object]:
        return {
            "n": self.n,
            "intercept": self.intercept,
            "se_intercept": self.se_intercept,
            "slope": self.slope,
            "se_slope": self.se_slope,
            "p_slope": self.p_slope,
            "log_likelihood": self.log_likelihood,
            "null_log_likelihood": self.null_log_likelihood,
            "mcfadden_r2": self.mcfadden_r2,
            "aic": self.aic,
            "converged": self.converged,
            "separated": self.separated,
            "degenerate": self.degenerate,
            "iterations": self.iterations,
        }


def _expit(eta):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(eta, dtype=float)))


def _design(outcome, predictor) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(outcome, dtype=float)
    x = np.asarray(predictor, dtype=float)
    if y.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"outcome and predictor must be 1-D of equal length, got {y.shape}, {x.shape}")
    if y.size < 2:
        raise ValueError("need at least two observations")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("outcome must be binary 0/1")
    if not np.all(np.isfinite(x)):
        raise ValueError("predictor must be finite")
    return y, x


def log_likelihood(coef, outcome, predictor) -> float:
    """Bernoulli log-likelihood at ``coef = (intercept, slope)``."""
    y = np.asarray(outcome, dtype=float)
    eta = coef[0] + coef[1] * np.asarray(predictor, dtype=float)
    # log(1 + e^eta) without overflow
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def score(coef, outcome, predictor) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to (intercept, slope)."""
    y = np.asarray(outcome, dtype=float)
    x = np.asarray(predictor, dtype=float)
    resid = y - _expit(coef[0] + coef[1] * x)
    return np.array([resid.sum(), (resid * x).sum()])


def _null_ll(y: np.ndarray) -> float:
    n, k = y.size, y.sum()
    p = k / n
    if k == 0 or k == n:
        return 0.0
    return float(k * math.log(p) + (n - k) * math.log1p(-p))


def _separated(y: np.ndarray, x: np.ndarray) -> bool:
    """True when no finite MLE exists (complete or quasi-complete separation)."""
    x1, x0 = x[y == 1], x[y == 0]
    return bool(x0.max() <= x1.min() or x1.max() <= x0.min())


def fit_null(outcome) -> LogitFit:
    """Intercept-only model; closed form ``intercept = logit(mean)``."""
    y = np.asarray(outcome, dtype=float)
    y, _ = _design(y, np.zeros_like(y))
    n, k = y.size, int(y.sum())
    if k in (0, y.size):
        return _degenerate(y, n_params=1)
    p = k / n
    ll0 = _null_ll(y)
    return LogitFit(
        intercept=math.log(p / (1 - p)),
        slope=0.0,
        se_intercept=math.sqrt(1.0 / (n * p * (1 - p))),
        se_slope=math.nan,
        log_likelihood=ll0,
        null_log_likelihood=ll0,
        mcfadden_r2=0.0,
        n=n,
        converged=True,
        n_params=1,
    )


def _degenerate(y: np.ndarray, n_params: int = 2) -> LogitFit:
    intercept = math.inf if y[0] == 1 else -math.inf
    return LogitFit(
        intercept=intercept,
        slope=0.0,
        se_intercept=math.nan,
        se_slope=math.nan,
        log_likelihood=0.0,
        null_log_likelihood=0.0,
        mcfadden_r2=None,
        n=y.size,
        converged=False,
        n_params=n_params,
        degenerate=True,
    )


def fit_logistic(outcome, predictor) -> LogitFit:
    """Maximum-likelihood fit of ``P(y=1) = expit(b0 + b1 * x)`` by IRLS.

    Iterates Newton steps until the largest coefficient change is below
    1e-10 or 100 iterations pass. Standard errors come from the inverse
    information matrix at the solution.

    A constant outcome returns a ``degenerate`` fit with an infinite
    intercept. When the predictor separates the outcome no finite MLE
    exists; the fit is returned with NaN coefficients, ``separated=True``
    and ``converged=False``.
    """
    y, x = _design(outcome, predictor)
    n = y.size
    if y.min() == y.max():
        return _degenerate(y)
    if x.min() == x.max():
        return replace(fit_null(y), n_params=2)
    ll0 = _null_ll(y)
    if _separated(y, x):
        return LogitFit(
            math.nan, math.nan, math.nan, math.nan, math.nan, ll0, None, n,
            converged=False, separated=True,
        )

    X = np.column_stack([np.ones(n), x])
    p_bar = y.mean()
    beta = np.array([math.log(p_bar / (1 - p_bar)), 0.0])
    ll = log_likelihood(beta, y, x)
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        p = _expit(X @ beta)
        w = p * (1 - p)
        info = X.T @ (X * w[:, None])
        step = np.linalg.solve(info, X.T @ (y - p))
        # halve until the likelihood does not drop
        for _ in range(30):
            trial = beta + step
            ll_trial = log_likelihood(trial, y, x)
            if ll_trial >= ll - 1e-12 * abs(ll):
                break
            step = step / 2
        beta, ll = trial, ll_trial
        if np.max(np.abs(step)) < TOL:
            converged = True
            break

    p = _expit(X @ beta)
    info = X.T @ (X * (p * (1 - p))[:, None])
    cov = np.linalg.inv(info)
    return LogitFit(
        intercept=float(beta[0]),
        slope=float(beta[1]),
        se_intercept=float(math.sqrt(cov[0, 0])),
        se_slope=float(math.sqrt(cov[1, 1])),
        log_likelihood=ll,
        null_log_likelihood=ll0,
        mcfadden_r2=1.0 - ll / ll0,
        n=n,
        converged=converged,
        iterations=it,
    )


@dataclass(frozen=True)
class LRTResult:
    chi2: float
    df: int
    p: float
    heuristic: bool
    delta_aic: float


def likelihood_ratio_test(fit_a: LogitFit, fit_b: LogitFit, df: Optional[int] = None) -> LRTResult:
    """Compare two fits on the same observations with ``2 * |LL_a - LL_b|``.

    ``df`` defaults to the difference in parameter counts, or 1 when both
    models have the same number of parameters. In that case the models are
    not nested and the result is flagged ``heuristic``; ``delta_aic``
    (``AIC_a - AIC_b``) is the better-founded comparison there.
    """
    if fit_a.n != fit_b.n:
        raise ValueError(f"fits use different sample sizes ({fit_a.n} vs {fit_b.n})")
    heuristic = fit_a.n_params == fit_b.n_params
    if df is None:
        df = abs(fit_a.n_params - fit_b.n_params) or 1
    chi2 = 2.0 * abs(fit_a.log_likelihood - fit_b.log_likelihood)
    return LRTResult(chi2, int(df), float(_sps.chi2.sf(chi2, df)), heuristic, fit_a.aic - fit_b.aic)


@dataclass(frozen=True)
class TTestResult:
    t: Optional[float]
    df: int
    p: Optional[float]
    cohen_d: Optional[float]
    mean0: float
    mean1: float


def t_test_cohen_d(group0: Sequence[float], group1: Sequence[float]) -> TTestResult:
    """Pooled-variance two-sample t test; effect is ``mean0 - mean1``.

    With zero pooled variance the statistic, p and d are ``None``.
    """
    a = np.asarray(group0, dtype=float)
    b = np.asarray(group1, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each group needs at least two observations")
    df = a.size + b.size - 2
    diff = a.mean() - b.mean()
    pooled = ((a.size - 1) * a.var(ddof=1) + (b.size - 1) * b.var(ddof=1)) / df
    if pooled <= 0:
        return TTestResult(None, df, None, None, float(a.mean()), float(b.mean()))
    sp = math.sqrt(pooled)
    t = diff / (sp * math.sqrt(1 / a.size + 1 / b.size))
    p = float(min(1.0, 2 * _sps.t.sf(abs(t), df)))
    return TTestResult(float(t), df, p, float(diff / sp), float(a.mean()), float(b.mean()))


@dataclass(frozen=True)
class KappaResult:
    kappa: Optional[float]
    observed_agreement: float
    chance_agreement: float


def cohens_kappa(ratings_a: Sequence[Hashable], ratings_b: Sequence[Hashable]) -> KappaResult:
    a, b = list(ratings_a), list(ratings_b)
    if len(a) != len(b):
        raise ValueError(f"rating vectors differ in length ({len(a)} vs {len(b)})")
    if not a:
        raise ValueError("no ratings")
    n = len(a)
    # exact rationals so hand-computed tables come out exact
    p_o = Fraction(sum(x == y for x, y in zip(a, b)), n)
    ca, cb = Counter(a), Counter(b)
    p_e = Fraction(sum(ca[c] * cb[c] for c in ca), n * n)
    if p_e == 1:
        return KappaResult(None, float(p_o), float(p_e))
    return KappaResult(float((p_o - p_e) / (1 - p_e)), float(p_o), float(p_e))
