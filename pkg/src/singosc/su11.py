"""Physical model and the truncated su(1,1) discrete-series representation.

The oscillator levels ``|n>`` carry the positive discrete series with
``J0 |n> = (n - j) |n>``.  Ladder elements are real and positive::

    <n+1| J+ |n> = sqrt((n + 1) (n - 2j))

and ``J1 = (J+ + J-)/2``, ``J2 = (J+ - J-)/(2i)``.  The Hamiltonian at
frequency ``omega`` is ``(omega**2 + 1) J0 + (omega**2 - 1) J2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CollapseError, SolverError


class AlgebraError(SolverError):
    """Truncated generators fail the commutator or Casimir identities."""


@dataclass(frozen=True)
class OscillatorModel:
    """Singular oscillator ``p^2/2 + omega^2 x^2/2 + g/(8 x^2)`` on ``x > 0``.

    Attributes
    ----------
    g : float
        Inverse-square coupling, ``g > -1`` (``g = -1`` only with
        ``allow_boundary``).
    j : float
        Representation weight ``-1/2 - sqrt(1 + g)/4``.
    s : float
        Near-origin exponent of the wavefunctions, ``-2j - 1/2``.
    """

    g: float
    allow_boundary: bool = False
    j: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        g = float(self.g)
        if not math.isfinite(g):
            raise CollapseError(f"coupling must be finite, got g={self.g!r}")
        if g < -1.0 or (g == -1.0 and not self.allow_boundary):
            raise CollapseError(
                f"g={g!r} is in the fall-to-center regime (need g > -1; "
                "g = -1 requires allow_boundary=True)"
            )
        j = -0.5 - 0.25 * math.sqrt(1.0 + g)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "s", -2.0 * j - 0.5)

    @property
    def casimir(self) -> float:
        """``j (j + 1)``, equal to ``(g - 3)/16``."""
        return self.j * (self.j + 1.0)


def make_model(g: float, allow_boundary: bool = False) -> OscillatorModel:
    """Validate ``g`` and return the model with derived weight."""
    return OscillatorModel(g, allow_boundary=allow_boundary)


@dataclass(frozen=True)
class GeneratorMatrices:
    """su(1,1) generators truncated to the lowest ``N`` levels."""

    model: OscillatorModel
    N: int
    J0: np.ndarray
    J1: np.ndarray
    J2: np.ndarray

    @property
    def raising(self) -> np.ndarray:
        return self.J1 + 1j * self.J2

    @property
    def lowering(self) -> np.ndarray:
        return self.J1 - 1j * self.J2

    def ladder_elements(self) -> np.ndarray:
        """Sub-diagonal of ``J+``: ``<n+1|J+|n>`` for ``n = 0..N-2``."""
        return ladder_elements(self.model, self.N)


def ladder_elements(model: OscillatorModel, N: int) -> np.ndarray:
    n = np.arange(N - 1, dtype=float)
    return np.sqrt((n + 1.0) * (n - 2.0 * model.j))


def build_generators(model: OscillatorModel, N: int) -> GeneratorMatrices:
    """Dense ``N x N`` matrices of ``J0``, ``J1``, ``J2`` in the level basis."""
    N = int(N)
    if N < 2:
        raise ValueError(f"truncation N must be >= 2, got {N}")
    levels = np.arange(N, dtype=float) - model.j
    jp = np.diag(ladder_elements(model, N), k=-1).astype(complex)
    jm = jp.conj().T
    J0 = np.diag(levels)
    J1 = 0.5 * (jp + jm)
    J2 = (jp - jm) / 2j
    for mat in (J0, J1, J2):
        mat.setflags(write=False)
    return GeneratorMatrices(model, N, J0, J1, J2)


def hamiltonian_matrix(gen: GeneratorMatrices, omega: float) -> np.ndarray:
    """``H = (omega^2 + 1) J0 + (omega^2 - 1) J2`` (Hermitian, tridiagonal)."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    w2 = omega * omega
    return (w2 + 1.0) * gen.J0 + (w2 - 1.0) * gen.J2


def _comm(a, b):
    return a @ b - b @ a


def algebra_residuals(gen: GeneratorMatrices) -> dict[str, float]:
    """Largest entrywise violation of each identity away from the truncation edge.

    The last row and column are excluded: the truncated ladder is missing the
    ``|N>`` contribution there.
    """
    J0, J1, J2 = gen.J0, gen.J1, gen.J2
    inner = np.s_[:-1, :-1]
    eye = np.eye(gen.N)
    checks = {
        "[J1,J2]=-iJ0": _comm(J1, J2) + 1j * J0,
        "[J2,J0]=iJ1": _comm(J2, J0) - 1j * J1,
        "[J0,J1]=iJ2": _comm(J0, J1) - 1j * J2,
        "casimir": J0 @ J0 - J1 @ J1 - J2 @ J2 - gen.model.casimir * eye,
    }
    return {k: float(np.max(np.abs(v[inner]))) for k, v in checks.items()}


def check_algebra(gen: GeneratorMatrices, atol: float = 1e-12, rtol: float = 0.0) -> None:
    """Raise :class:`AlgebraError` if any identity is violated.

    The allowed deviation is ``atol + rtol * (N - j)**2``; the second term
    covers roundoff in squared ladder elements for large ``N``.
    """
    bound = atol + rtol * (gen.N - gen.model.j) ** 2
    bad = {k: v for k, v in algebra_residuals(gen).items() if v > bound}
    if bad:
        raise AlgebraError(f"generator identities violated (bound {bound:.3g}): {bad}")
