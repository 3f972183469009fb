"""
Summary statistics over session records: rating improvement and the correlation between
reflection cycles and rating gain.
"""
import math
import numpy as np
from forge.constants import CustomError
from forge.externals.iterable_utils import lowerMedian

class EmptyInput(CustomError):
    pass

class DegenerateInput(CustomError):
    pass

def ratingGain(record):
    ratings = record.ratings
    return ratings[-1] - ratings[0]

def improvement_stats(records):
    """
    Args:
        records (list): SessionRecords with at least one rating each.

    Raises:
        EmptyInput: no records.

    Returns:
        tuple: (n_improved, improvement_rate as a fraction, median_gain, max_gain).
        The median of an even count is the lower of the two middle gains.
    """
    if not records:
        raise EmptyInput("no rated records")
    for record in records:
        if not record.ratings:
            raise CustomError("%s has no rating" % record.target)
    gains = [ratingGain(record) for record in records]
    improved = sum(1 for gain in gains if gain > 0)
    return improved, improved / len(gains), lowerMedian(gains), max(gains)

def continuedFraction(a, b, x, maxIterations=500, epsilon=1e-15):
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    c = 1.0
    d = 1.0 - (a + b) * x / (a + 1.0)
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, maxIterations + 1):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2))
        d = 1.0 + numerator * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + numerator / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        numerator = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0))
        d = 1.0 + numerator * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + numerator / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < epsilon:
            break
    return h

def regularizedBeta(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    logFront = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(logFront)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * continuedFraction(a, b, x) / a
    return 1.0 - front * continuedFraction(b, a, 1.0 - x) / b

def correlationPValue(r, n):
    """Two-sided p of a product-moment r from n pairs, t-distribution with n - 2 df."""
    df = n - 2
    # t^2 = r^2 df / (1 - r^2), so df / (df + t^2) = 1 - r^2
    return regularizedBeta(df / 2.0, 0.5, 1.0 - r * r)

def pearson(xs, ys):
    """
    Product-moment correlation with its two-sided p-value.

    Args:
        xs (list): reals.
        ys (list): reals, as many as xs.

    Raises:
        DegenerateInput: fewer than 3 pairs, unequal lengths or zero variance.

    Returns:
        tuple: (r, p)
    """
    if len(xs) != len(ys):
        raise DegenerateInput("%d xs against %d ys" % (len(xs), len(ys)))
    if len(xs) < 3:
        raise DegenerateInput("need at least 3 pairs, got %d" % len(xs))
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("zero variance")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = min(1.0, max(-1.0, r))
    return r, correlationPValue(r, len(xs))
