"""Closed-form transition probabilities of the singular oscillator.

Every probability depends on the model only through the weight ``j`` and on
the frequency history only through the reflection parameter ``rho``.  With
``L = max(m, n)``, ``S = min(m, n)``::

    w_mn = S!/L! * Gamma(L-2j)/Gamma(S-2j) * rho**(L-S) * (1-rho)**(-2j)
           * P_S^(L-S, -2j-1)(1 - 2 rho)**2

All factorial and gamma factors are combined in log space and exponentiated
once, so rows with ``L`` in the hundreds do not overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PoleError, RangeError
from .special import gamma_ratio, hyp2f1_terminating, jacobi_p, log_abs, log_factorial
from .su11 import OscillatorModel

RHO_MAX = 1.0 - 1e-9


def check_rho(rho: float) -> float:
    """Return ``rho`` as float or raise :class:`RangeError`."""
    try:
        r = float(rho)
    except (TypeError, ValueError):
        raise RangeError(f"rho must be a real number, got {rho!r}") from None
    if not (0.0 <= r <= RHO_MAX):
        raise RangeError(f"rho={rho!r} outside [0, 1 - 1e-9]")
    return r


def _check_level(k, name: str) -> int:
    if int(k) != k or k < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {k!r}")
    return int(k)


def energy_level(model: OscillatorModel, n: int, omega: float) -> float:
    """Instantaneous level ``E_n = 2 omega (n - j)``."""
    n = _check_level(n, "n")
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    return 2.0 * omega * (n - model.j)


def _log_common(model: OscillatorModel, L: int, S: int, rho: float) -> float:
    # Gamma(L-2j)/Gamma(S-2j) * rho^(L-S) * (1-rho)^(-2j)
    two_j = 2.0 * model.j
    out = gamma_ratio(L - two_j, S - two_j).log_value - two_j * math.log1p(-rho)
    if L > S:
        out += (L - S) * math.log(rho)
    return out


def transition_probability(model: OscillatorModel, m: int, n: int, rho: float) -> float:
    """Probability ``w_mn`` of ending in level ``n`` when starting in ``m``."""
    m = _check_level(m, "m")
    n = _check_level(n, "n")
    rho = check_rho(rho)
    L, S = max(m, n), min(m, n)
    if rho == 0.0:
        return 1.0 if L == S else 0.0
    p = float(jacobi_p(S, L - S, -2.0 * model.j - 1.0, 1.0 - 2.0 * rho))
    if p == 0.0:
        return 0.0
    log_w = (
        log_factorial(S) - log_factorial(L)
        + _log_common(model, L, S, rho)
        + 2.0 * math.log(abs(p))
    )
    return math.exp(log_w)


def transition_probability_hypergeometric(
    model: OscillatorModel, m: int, n: int, rho: float
) -> float:
    """``w_mn`` from the terminating ``2F1(-S, L-2j; L-S+1; rho)`` form.

    Kept as an independent cross-check of :func:`transition_probability`.
    The series is summed exactly so that cancellation near its roots does
    not swamp the comparison.
    """
    m = _check_level(m, "m")
    n = _check_level(n, "n")
    rho = check_rho(rho)
    L, S = max(m, n), min(m, n)
    if rho == 0.0:
        return 1.0 if L == S else 0.0
    b = Fraction(L) - 2 * Fraction(model.j)
    f = hyp2f1_terminating(S, b, L - S + 1, rho, exact=True)
    if f == 0.0:
        return 0.0
    log_w = (
        log_factorial(L) - 2.0 * log_factorial(L - S) - log_factorial(S)
        + _log_common(model, L, S, rho)
        + 2.0 * log_abs(f)
    )
    return math.exp(log_w)


def vacuum_probability(model: OscillatorModel, n: int, rho: float) -> float:
    """Excitation of the ground state: ``Gamma(n-2j)/(n! Gamma(-2j)) rho^n (1-rho)^(-2j)``."""
    n = _check_level(n, "n")
    rho = check_rho(rho)
    if rho == 0.0:
        return 1.0 if n == 0 else 0.0
    two_j = 2.0 * model.j
    log_w = (
        gamma_ratio(n - two_j, -two_j).log_value
        - log_factorial(n)
        + n * math.log(rho)
        - two_j * math.log1p(-rho)
    )
    return math.exp(log_w)


def row_probabilities(
    model: OscillatorModel,
    m: int,
    rho: float,
    tail_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    max_terms: int = 1_000_000,
) -> np.ndarray:
    """``w_mn`` for ``n = 0, 1, ...`` until the remaining tail is negligible.

    The row is extended past ``n = m`` until the current term is below
    ``rel_tol`` times the row maximum and the geometric tail bound
    ``w_n r/(1-r)``, with ``r = w_n/w_{n-1}``, is below ``tail_tol``.
    """
    m = _check_level(m, "m")
    rho = check_rho(rho)
    if rho == 0.0:
        row = np.zeros(m + 1)
        row[m] = 1.0
        return row
    row = []
    peak = 0.0
    for n in range(max_terms):
        w = transition_probability(model, m, n, rho)
        row.append(w)
        peak = max(peak, w)
        if n <= m + 1 or w > rel_tol * peak:
            continue
        prev = row[-2]
        if prev <= 0.0:
            continue
        r = w / prev
        if r < 1.0 and w * r / (1.0 - r) < tail_tol:
            break
    else:
        raise RangeError(f"row m={m} did not converge within {max_terms} terms (rho={rho})")
    return np.array(row)


@dataclass(frozen=True)
class TransitionTable:
    """Truncated matrix ``w[m, n]`` with the probability left outside each row."""

    model: OscillatorModel
    rho: float
    max_m: int
    max_n: int
    w: np.ndarray
    row_tail_mass: np.ndarray

    def row_sum(self, m: int) -> float:
        return math.fsum(self.w[m])


def build_table(model: OscillatorModel, rho: float, max_m: int, max_n: int) -> TransitionTable:
    """Fill ``w[m, n]`` for ``m <= max_m``, ``n <= max_n``."""
    rho = check_rho(rho)
    max_m = _check_level(max_m, "max_m")
    max_n = _check_level(max_n, "max_n")
    w = np.empty((max_m + 1, max_n + 1))
    for m in range(max_m + 1):
        for n in range(max_n + 1):
            w[m, n] = transition_probability(model, m, n, rho)
    k = min(max_m, max_n) + 1
    if not np.array_equal(w[:k, :k], w[:k, :k].T):
        raise ArithmeticError("transition table lost its m <-> n symmetry")
    tails = np.array([1.0 - math.fsum(row) for row in w])
    w.setflags(write=False)
    tails.setflags(write=False)
    return TransitionTable(model, rho, max_m, max_n, w, tails)


def _base_log(rho: float, z: complex) -> complex:
    denom = 1.0 - rho * z
    if denom == 0:
        raise PoleError(f"generating function has a pole at z = 1/rho = {1.0 / rho!r}")
    return cmath.log((1.0 - rho) / denom)


def generating_g0(model: OscillatorModel, rho: float, z: complex) -> complex:
    """``G_0(z) = sum_n w_0n z^n = ((1-rho)/(1-rho z))**(-2j)`` (principal branch)."""
    rho = check_rho(rho)
    return cmath.exp(-2.0 * model.j * _base_log(rho, complex(z)))


def generating_g1(model: OscillatorModel, rho: float, z: complex) -> complex:
    """``G_1(z) = sum_n w_1n z^n`` for transitions out of the first excited level."""
    rho = check_rho(rho)
    z = complex(z)
    power = cmath.exp((2.0 - 2.0 * model.j) * _base_log(rho, z))
    return power * (-2.0 * model.j * rho * ((1.0 - z) / (1.0 - rho)) ** 2 + z)


def adiabatic_invariant_ratio(model: OscillatorModel, m: int, rho: float) -> float:
    """Final-to-initial ratio of ``<H>/(2 omega)``: ``(1+rho)/(1-rho)``."""
    _check_level(m, "m")
    rho = check_rho(rho)
    return (1.0 + rho) / (1.0 - rho)


@dataclass(frozen=True)
class InvariantDiagnostic:
    closed_form: float
    summed: float
    residual: float
    tail_mass: float
    terms: int


def adiabatic_invariant_diagnostic(
    model: OscillatorModel, m: int, rho: float, tail_tol: float = 1e-14
) -> InvariantDiagnostic:
    """Compare the closed form with ``sum_n (n-j) w_mn / (m-j)`` over a truncated row."""
    closed = adiabatic_invariant_ratio(model, m, rho)
    row = row_probabilities(model, m, rho, tail_tol=tail_tol, rel_tol=1e-16)
    levels = np.arange(row.size) - model.j
    summed = math.fsum(levels * row) / (m - model.j)
    return InvariantDiagnostic(
        closed_form=closed,
        summed=summed,
        residual=abs(summed - closed),
        tail_mass=1.0 - math.fsum(row),
        terms=int(row.size),
    )
