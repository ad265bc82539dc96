"""Special-function kernel: log-gamma, gamma ratios, Jacobi polynomials and
terminating Gauss hypergeometric series.

Only the parameter ranges needed by the transition formulas are supported:
real arguments, positive gamma arguments, terminating series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import zeta

_EULER_GAMMA = 0.57721566490153286061
# zeta(k) for the Taylor series of lgamma(1 + eps) around its zero at eps = 0
_ZETA = [float(zeta(k)) for k in range(2, 64)]
_SERIES_RADIUS = 0.5
# largest a - b handled by the exact product form of the gamma ratio
_MAX_PRODUCT_TERMS = 64


def _lgamma1p(eps: float) -> float:
    """``ln Gamma(1 + eps)`` for ``|eps| <= 1/2`` by its zeta series."""
    total = 0.0
    power = -eps
    for k, z in enumerate(_ZETA, start=2):
        power *= -eps
        term = z * power / k
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total - _EULER_GAMMA * eps


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``.

    Near the zeros at ``x = 1`` and ``x = 2`` a series is used so the
    result keeps full relative precision; elsewhere ``math.lgamma``.
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    if abs(x - 1.0) <= _SERIES_RADIUS:
        return _lgamma1p(x - 1.0)
    if abs(x - 2.0) <= _SERIES_RADIUS:
        eps = x - 2.0
        return math.log1p(eps) + _lgamma1p(eps)
    if x < _SERIES_RADIUS:
        return _lgamma1p(x) - math.log(x)
    return math.lgamma(x)


@dataclass(frozen=True)
class GammaRatio:
    """``Gamma(a)/Gamma(b)`` stored as ``sign * exp(log_value)``."""

    log_value: float
    sign: int = 1

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_value)


def _integer_offset(a: float, b: float) -> int | None:
    k = a - b
    if k >= 0 and k == round(k) and k <= _MAX_PRODUCT_TERMS:
        return int(round(k))
    return None


def gamma_ratio(a: float, b: float) -> GammaRatio:
    """Ratio ``Gamma(a)/Gamma(b)`` for positive ``a`` and ``b``.

    When ``a - b`` is a small non-negative integer ``k`` the ratio is the
    rising product ``b (b+1) ... (b+k-1)``, accumulated as a sum of logs.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"gamma_ratio requires a, b > 0, got a={a!r}, b={b!r}")
    k = _integer_offset(a, b)
    if k is not None:
        return GammaRatio(math.fsum(math.log(b + i) for i in range(k)))
    k = _integer_offset(b, a)
    if k is not None:
        return GammaRatio(-math.fsum(math.log(a + i) for i in range(k)))
    return GammaRatio(log_gamma(a) - log_gamma(b))


def log_factorial(n: int) -> float:
    return log_gamma(n + 1.0)


def hyp2f1_terminating(S: int, b: float, c: float, z: float, exact: bool = False):
    """``2F1(-S, b; c; z)`` summed as the finite polynomial of degree ``S``.

    With ``exact=True`` the float inputs are taken as exact binary fractions
    and the terms are accumulated in rational arithmetic; the result is a
    :class:`fractions.Fraction`.  Use it where the alternating terms cancel
    (``z`` near a root of the polynomial).
    """
    S = int(S)
    if S < 0:
        raise ValueError(f"S must be a non-negative integer, got {S}")
    if c == round(c) and -(S - 1) <= c <= 0:
        raise ValueError(f"c={c!r} hits a pole before the series terminates")
    if exact:
        b, c, z = Fraction(b), Fraction(c), Fraction(z)
        one = Fraction(1)
    else:
        one = 1.0
    term = one
    total = one
    for k in range(S):
        term = term * (k - S) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


def log_abs(x) -> float:
    """``ln|x|`` for floats or fractions; fractions never underflow."""
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(x))


def jacobi_p(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial ``P_n^(alpha, beta)(x)`` by three-term recurrence in ``n``.

    ``x`` may be a scalar or an array; the return type follows it.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    if not (alpha > -1 and beta > -1):
        raise ValueError(f"need alpha, beta > -1, got {alpha!r}, {beta!r}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev[()]
    ab = alpha + beta
    p = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    a2b2 = alpha * alpha - beta * beta
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        lead = 2.0 * k * (k + ab) * (c - 2.0)
        mid = (c - 1.0) * (c * (c - 2.0) * x + a2b2)
        back = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p, p_prev = (mid * p - back * p_prev) / lead, p
    return p[()]
