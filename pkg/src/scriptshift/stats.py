"""Correlation and paired-difference tests with an exact t-distribution tail.

The t CDF is evaluated through the regularized incomplete beta function,
computed with a continued fraction (modified Lentz iteration) and log-gamma
scaling. Sums use compensated summation so results are stable for the small
sample sizes these analyses run at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

SIGNIFICANCE_LEVEL = 0.05

_CF_MAX_ITER = 400
_CF_EPS = 3e-16
_CF_TINY = 1e-300


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    r: float
    p_value: float
    n: int

    def significant(self, alpha: float = SIGNIFICANCE_LEVEL) -> bool:
        return self.p_value < alpha


class TTestResult(NamedTuple):
    t: float
    p_value: float
    n: int


@dataclass(frozen=True)
class PairedSample:
    """Two measurements of the same items, aligned by position."""

    labels: tuple[str, ...]
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.a) == len(self.b)):
            raise ValueError("labels and both measurement lists must align")
        if len(self.a) < 2:
            raise ValueError("paired test needs at least two pairs")


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, evaluated with the
    modified Lentz method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for "
                          f"a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got {a}, {b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # The continued fraction converges fast only on one side of the mean;
    # use the symmetry I_x(a, b) = 1 - I_{1-x}(b, a) on the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def t_cdf(t: float, df: int) -> float:
    """Cumulative distribution of Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        raise ValueError("t statistic is NaN")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def _two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|); the incomplete beta gives this in one call."""
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing their average rank."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        average = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = average
        i = j + 1
    return ranks


def _exact_moments(x: Sequence[float], y: Sequence[float],
                   ) -> tuple[Fraction, Fraction, Fraction]:
    """Centered covariance and variances in exact rational arithmetic.

    Floats convert to Fraction losslessly, so constant series and perfect
    collinearity are detected without rounding artifacts."""
    n = len(x)
    ex = [Fraction(v) for v in x]
    ey = [Fraction(v) for v in y]
    mean_x = sum(ex) / n
    mean_y = sum(ey) / n
    dx = [v - mean_x for v in ex]
    dy = [v - mean_y for v in ey]
    cov = sum(a * b for a, b in zip(dx, dy))
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    return cov, var_x, var_y


def _pearson_core(x: Sequence[float], y: Sequence[float],
                  method: str) -> CorrelationResult:
    n = len(x)
    if n != len(y):
        raise ValueError(f"series differ in length: {n} vs {len(y)}")
    if n < 3:
        raise ValueError(f"correlation needs at least 3 points, got {n}")
    exact_cov, exact_var_x, exact_var_y = _exact_moments(x, y)
    if exact_var_x == 0 or exact_var_y == 0:
        raise ValueError("correlation is undefined for a constant series")
    df = n - 2
    if exact_cov * exact_cov == exact_var_x * exact_var_y:
        r = 1.0 if exact_cov > 0 else -1.0
        return CorrelationResult(method=method, r=r, p_value=0.0, n=n)
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        # float cancellation collapsed a variance; use the exact moments
        ratio = (exact_cov * exact_cov) / (exact_var_x * exact_var_y)
        r = math.copysign(math.sqrt(float(ratio)), float(exact_cov))
    else:
        cov = math.fsum(a * b for a, b in zip(dx, dy))
        r = cov / (math.sqrt(var_x) * math.sqrt(var_y))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
        p = _two_sided_p(t, df)
    return CorrelationResult(method=method, r=r, p_value=p, n=n)


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson correlation with a two-sided p computed from the exact t
    transform t = r * sqrt((n-2) / (1-r^2))."""
    return _pearson_core(list(x), list(y), "pearson")


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman rank correlation: Pearson over average ranks."""
    result = _pearson_core(average_ranks(list(x)), average_ranks(list(y)),
                           "spearman")
    return CorrelationResult(method="spearman", r=result.r,
                             p_value=result.p_value, n=result.n)


def paired_t_test(sample: PairedSample) -> TTestResult:
    """Two-sided paired t-test on the positionwise differences a - b.

    An all-zero difference vector returns t=0, p=1; a constant non-zero
    difference has no sampling variance and returns an infinite t with p=0.
    """
    diffs = [ai - bi for ai, bi in zip(sample.a, sample.b)]
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, p_value=1.0, n=n)
        t = math.inf if mean > 0 else -math.inf
        return TTestResult(t=t, p_value=0.0, n=n)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, p_value=_two_sided_p(t, n - 1), n=n)


def significance_mask(p_values: Mapping, alpha: float = SIGNIFICANCE_LEVEL,
                      ) -> dict:
    """Boolean mask over a keyed collection of p-values."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return {key: p < alpha for key, p in p_values.items()}
