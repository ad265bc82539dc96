"""Brute-force check of the closed forms by direct Schrodinger propagation.

The state is expanded in the lowest ``N`` levels of the ``omega = 1``
oscillator, where ``H(t) = (omega(t)**2 + 1) J0 + (omega(t)**2 - 1) J2`` is
tridiagonal.  The diagonal gauge ``|n> -> i**n |n>`` makes it real
symmetric, so each exponential is a real tridiagonal eigenproblem.

Time stepping is the two-exponential commutator-free Magnus scheme (fourth
order, exactly unitary) with step-doubling error control.  Where ``omega``
is constant the step is exact and the controller opens the step up.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import LeakageError, NormDriftError, TruncationError
from .reflection import FrequencyProfile, SolverSettings, compute_rho
from .su11 import GeneratorMatrices, OscillatorModel, build_generators, check_algebra, hamiltonian_matrix
from .transitions import transition_probability

log = logging.getLogger(__name__)

_S3 = np.sqrt(3.0)
# Gauss nodes and mixing weights of the commutator-free Magnus step
_C1, _C2 = 0.5 - _S3 / 6.0, 0.5 + _S3 / 6.0
_A1, _A2 = 0.25 - _S3 / 6.0, 0.25 + _S3 / 6.0
# fraction of the basis, counted from the top, watched for leakage
LEAKAGE_FRACTION = 0.1


@dataclass(frozen=True)
class FockVector:
    """Amplitudes in the ``omega = 1`` level basis."""

    amplitudes: np.ndarray
    norm_defect: float = 0.0

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class OracleReport:
    w_numeric: np.ndarray
    w_closed: np.ndarray
    max_abs_diff: float
    N: int
    leakage: float
    rho: float
    norm_defect: float
    steps: int

    @property
    def passed(self) -> bool:
        return self.leakage < 1e-8


def _check_cut(gen: GeneratorMatrices, k: int, what: str) -> int:
    k = int(k)
    if k < 0:
        raise ValueError(f"{what} must be non-negative, got {k}")
    if 4 * k >= gen.N:
        raise TruncationError(f"{what}={k} too close to the basis edge (need {what} < N/4 = {gen.N / 4:g})")
    return k


def _eigenbasis(gen: GeneratorMatrices, omega: float):
    return eigh(hamiltonian_matrix(gen, omega))


def _phase_fix(v: np.ndarray) -> np.ndarray:
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def initial_state(gen: GeneratorMatrices, omega_minus: float, m: int) -> FockVector:
    """Level ``m`` of the truncated ``H(omega_minus)``, largest component real positive."""
    m = _check_cut(gen, m, "m")
    _, vecs = _eigenbasis(gen, omega_minus)
    return FockVector(_phase_fix(vecs[:, m]))


def extract_probabilities(gen: GeneratorMatrices, omega_plus: float, psi_final, n_max: int) -> np.ndarray:
    """``|<phi_n(omega_plus)|psi>|**2`` for ``n = 0..n_max``.

    ``psi_final`` may be a :class:`FockVector`, a vector, or an ``N x k``
    block of column states (the result then has shape ``(k, n_max + 1)``).
    """
    n_max = _check_cut(gen, n_max, "n_max")
    psi = psi_final.amplitudes if isinstance(psi_final, FockVector) else np.asarray(psi_final)
    _, vecs = _eigenbasis(gen, omega_plus)
    amps = vecs[:, : n_max + 1].conj().T @ psi
    return (np.abs(amps) ** 2).T


class _Stepper:
    """Magnus stepping of column blocks in the real gauge."""

    def __init__(self, gen: GeneratorMatrices, profile: FrequencyProfile):
        n = np.arange(gen.N)
        self.gauge = np.array([1, 1j, -1, -1j])[n % 4]
        k = self.gauge.conj()[:, None] * gen.J2 * self.gauge[None, :]
        off = np.diag(k, -1)
        if np.max(np.abs(off.imag)) > 1e-14 * max(1.0, np.max(np.abs(off))):
            raise ValueError("J2 is not real in the i**n gauge")
        self.j0 = np.real(np.diag(gen.J0)).copy()
        self.k_off = off.real.copy()
        self.profile = profile

    def _expo(self, a, b, psi, h):
        lam, vecs = eigh_tridiagonal(a * self.j0, b * self.k_off)
        return vecs @ (np.exp(-1j * lam * h)[:, None] * (vecs.T @ psi))

    def step(self, psi, t, h):
        w1 = float(self.profile.omega_squared(t + _C1 * h))
        w2 = float(self.profile.omega_squared(t + _C2 * h))
        # H = (w^2 + 1) J0 + (w^2 - 1) K is linear in w^2
        # the first factor leans on the earlier node
        u = _A2 * w1 + _A1 * w2
        v = _A1 * w1 + _A2 * w2
        psi = self._expo(u + 0.5, u - 0.5, psi, h)
        return self._expo(v + 0.5, v - 0.5, psi, h)


def _propagate_block(gen, profile, block, settings):
    check_algebra(gen, atol=1e-12, rtol=1e-15)
    stepper = _Stepper(gen, profile)
    psi = stepper.gauge.conj()[:, None] * np.asarray(block, dtype=complex)
    top = int(np.ceil((1.0 - LEAKAGE_FRACTION) * gen.N))
    tol = settings.tdse_tol
    h = settings.tdse_first_step
    steps = rejected = 0
    leakage = float(np.max(np.sum(np.abs(psi[top:]) ** 2, axis=0)))
    for a, b in profile.segments():
        t = a
        while b - t > 1e-12 * max(1.0, abs(b)):
            h = min(h, b - t)
            full = stepper.step(psi, t, h)
            half = stepper.step(stepper.step(psi, t, 0.5 * h), t + 0.5 * h, 0.5 * h)
            err = float(np.max(np.abs(full - half)))
            if err <= tol * h:
                psi = half
                t += h
                steps += 1
                leak = float(np.max(np.sum(np.abs(psi[top:]) ** 2, axis=0)))
                leakage = max(leakage, leak)
                if leakage > settings.leakage_tol:
                    raise LeakageError(
                        f"weight {leakage:.3g} in the top {LEAKAGE_FRACTION:.0%} of the "
                        f"N={gen.N} basis at t={t:g}; increase N"
                    )
            else:
                rejected += 1
            grow = 4.0 if err == 0 else 0.9 * (tol * h / err) ** 0.25
            h *= min(4.0, max(0.2, grow))
    log.debug("propagation: %d steps, %d rejected", steps, rejected)
    norm_defect = np.abs(np.sum(np.abs(psi) ** 2, axis=0) - 1.0)
    if np.max(norm_defect) > settings.norm_tol:
        raise NormDriftError(f"norm drift {np.max(norm_defect):.3g} exceeds {settings.norm_tol:g}")
    return stepper.gauge[:, None] * psi, norm_defect, leakage, steps


def propagate(gen: GeneratorMatrices, profile: FrequencyProfile, psi0: FockVector,
              settings: SolverSettings | None = None) -> FockVector:
    """Solve ``i dpsi/dt = H(t) psi`` across the profile window."""
    settings = settings or SolverSettings()
    block = np.asarray(psi0.amplitudes, dtype=complex)[:, None]
    out, defect, _, _ = _propagate_block(gen, profile, block, settings)
    return FockVector(out[:, 0], float(defect[0]))


def compare(model: OscillatorModel, profile: FrequencyProfile, m_max: int, n_max: int,
            settings: SolverSettings | None = None, basis_size: int = 200) -> OracleReport:
    """Closed form with classical ``rho`` against direct propagation.

    Rows of both matrices are initial levels ``m``, columns final levels ``n``.
    """
    settings = settings or SolverSettings()
    profile.check_asymptotes()
    gen = build_generators(model, basis_size)
    m_max = _check_cut(gen, m_max, "m_max")
    n_max = _check_cut(gen, n_max, "n_max")
    rho = compute_rho(profile, settings).rho
    w_closed = np.array([[transition_probability(model, m, n, rho) for n in range(n_max + 1)]
                         for m in range(m_max + 1)])
    _, vecs = _eigenbasis(gen, profile.omega_minus)
    block = np.column_stack([_phase_fix(vecs[:, m]) for m in range(m_max + 1)])
    final, defect, leakage, steps = _propagate_block(gen, profile, block, settings)
    w_numeric = extract_probabilities(gen, profile.omega_plus, final, n_max)
    return OracleReport(
        w_numeric=w_numeric,
        w_closed=w_closed,
        max_abs_diff=float(np.max(np.abs(w_numeric - w_closed))),
        N=gen.N,
        leakage=leakage,
        rho=rho,
        norm_defect=float(np.max(defect)),
        steps=steps,
    )
