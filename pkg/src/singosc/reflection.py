"""Reflection parameter ``rho`` from the classical equation of motion.

The classical mode ``xi'' + omega(t)**2 xi = 0`` is started as the pure
in-wave ``exp(-i omega_- t)`` and matched at the end of the window to::

    xi(t) = C exp(-i omega_+ t) + D exp(+i omega_+ t)

using value and derivative.  ``rho = |D/C|**2``, and the Wronskian fixes
``|C|**2 - |D|**2 = omega_-/omega_+`` exactly; the deviation from that
identity gates every result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import AsymptoteNotReached, WronskianViolation

KINDS = ("constant", "sudden_jump", "tanh_step", "table", "piecewise_linear")
ASYMPTOTE_RTOL = 1e-8
# default half-width of the tanh window in units of tau
TANH_WINDOW = 25.0


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances for the classical integrator and the Schrodinger oracle.

    ``rtol``/``atol`` apply to the adaptive Runge-Kutta pair on
    ``(Re xi, Im xi, Re xi', Im xi')``.  If the Wronskian gate fails the
    tolerances are multiplied by ``refine_factor`` up to ``max_refinements``
    times.  ``tdse_tol`` is the local error per unit time allowed in the
    Schrodinger propagation.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    max_step: float = math.inf
    max_refinements: int = 3
    refine_factor: float = 0.01
    wronskian_tol: float = 1e-8
    tdse_tol: float = 1e-8
    tdse_first_step: float = 0.01
    norm_tol: float = 1e-8
    leakage_tol: float = 1e-8

    def refined(self) -> "SolverSettings":
        f = self.refine_factor
        return replace(self, rtol=max(self.rtol * f, 1e-13), atol=max(self.atol * f, 1e-15))


@dataclass(frozen=True)
class FrequencyProfile:
    """Time-dependent frequency with flat asymptotes ``omega_minus``/``omega_plus``.

    Use the classmethod constructors rather than building one directly.
    For ``sudden_jump`` a positive ``tau`` smooths the jump into a linear
    ramp of that width centred on ``t_center``.
    """

    kind: str
    omega_minus: float
    omega_plus: float
    t_start: float
    t_end: float
    tau: float = 0.0
    t_center: float = 0.0
    samples: tuple = ()
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {KINDS}")
        if not (self.omega_minus > 0 and self.omega_plus > 0):
            raise ValueError(
                f"asymptotic frequencies must be positive, got {self.omega_minus!r}, {self.omega_plus!r}"
            )
        if not self.t_end > self.t_start:
            raise ValueError(f"empty window [{self.t_start}, {self.t_end}]")
        if self.tau < 0 or (self.kind == "tanh_step" and not self.tau > 0):
            raise ValueError(f"invalid switching time tau={self.tau!r}")
        if self.kind in ("table", "piecewise_linear"):
            t, w = np.array(self.samples, dtype=float).reshape(-1, 2).T
            if t.size < 2:
                raise ValueError("a sampled profile needs at least two samples")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sample times must be strictly increasing")
            if np.any(w <= 0):
                raise ValueError("sampled frequencies must be positive")
            if self.kind == "table":
                interp = PchipInterpolator(t, w * w, extrapolate=False)
            else:
                interp = None
            object.__setattr__(self, "_interp", interp)

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, omega: float, t_start: float = -1.0, t_end: float = 1.0):
        return cls("constant", omega, omega, t_start, t_end)

    @classmethod
    def sudden_jump(cls, omega_minus, omega_plus, t_jump=0.0, width=0.0, t_start=None, t_end=None):
        half = 0.5 * width
        t_start = t_jump - half - 1.0 if t_start is None else t_start
        t_end = t_jump + half + 1.0 if t_end is None else t_end
        return cls("sudden_jump", omega_minus, omega_plus, t_start, t_end, tau=width, t_center=t_jump)

    @classmethod
    def tanh_step(cls, omega_minus, omega_plus, tau, t_center=0.0, t_start=None, t_end=None):
        """``omega(t) = omega_- + (omega_+ - omega_-) (1 + tanh((t - t_center)/tau))/2``."""
        t_start = t_center - TANH_WINDOW * tau if t_start is None else t_start
        t_end = t_center + TANH_WINDOW * tau if t_end is None else t_end
        return cls("tanh_step", omega_minus, omega_plus, t_start, t_end, tau=tau, t_center=t_center)

    @classmethod
    def from_samples(cls, t, omega, kind="table", t_start=None, t_end=None,
                     omega_minus=None, omega_plus=None):
        """Sampled profile; ``table`` interpolates ``omega**2`` monotonically,
        ``piecewise_linear`` interpolates ``omega`` linearly.  Outside the
        samples the end values are held."""
        t = [float(x) for x in t]
        omega = [float(x) for x in omega]
        if len(t) != len(omega):
            raise ValueError("t and omega must have the same length")
        return cls(
            kind,
            omega[0] if omega_minus is None else omega_minus,
            omega[-1] if omega_plus is None else omega_plus,
            t[0] if t_start is None else t_start,
            t[-1] if t_end is None else t_end,
            samples=tuple(zip(t, omega)),
        )

    # evaluation ---------------------------------------------------------

    def omega(self, t):
        """Frequency at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        wm, wp = self.omega_minus, self.omega_plus
        if self.kind == "constant":
            out = np.full_like(t, wm)
        elif self.kind == "tanh_step":
            out = wm + (wp - wm) * 0.5 * (1.0 + np.tanh((t - self.t_center) / self.tau))
        elif self.kind == "sudden_jump":
            if self.tau == 0:
                out = np.where(t < self.t_center, wm, wp)
            else:
                frac = np.clip((t - self.t_center) / self.tau + 0.5, 0.0, 1.0)
                out = wm + (wp - wm) * frac
        else:
            ts, ws = np.array(self.samples).T
            if self.kind == "piecewise_linear":
                out = np.interp(t, ts, ws)
            else:
                clipped = np.clip(t, ts[0], ts[-1])
                out = np.sqrt(self._interp(clipped))
        return out[()] if out.ndim == 0 else out

    def omega_squared(self, t):
        w = self.omega(t)
        return w * w

    def breakpoints(self) -> list[float]:
        """Interior times where ``omega`` or its derivative is discontinuous."""
        if self.kind == "sudden_jump":
            half = 0.5 * self.tau
            pts = {self.t_center - half, self.t_center + half}
        elif self.kind in ("table", "piecewise_linear"):
            pts = {t for t, _ in self.samples}
        else:
            pts = set()
        return sorted(p for p in pts if self.t_start < p < self.t_end)

    def segments(self) -> list[tuple[float, float]]:
        edges = [self.t_start, *self.breakpoints(), self.t_end]
        return list(zip(edges[:-1], edges[1:]))

    def shifted(self, dt: float) -> "FrequencyProfile":
        """Same profile translated by ``dt`` in time."""
        samples = tuple((t + dt, w) for t, w in self.samples)
        return replace(self, t_start=self.t_start + dt, t_end=self.t_end + dt,
                       t_center=self.t_center + dt, samples=samples)

    def check_asymptotes(self) -> None:
        """Raise :class:`AsymptoteNotReached` unless the window ends are flat."""
        w0, w1 = float(self.omega(self.t_start)), float(self.omega(self.t_end))
        if abs(w0 - self.omega_minus) >= ASYMPTOTE_RTOL * self.omega_minus:
            raise AsymptoteNotReached(
                f"omega(t_start={self.t_start})={w0!r} differs from omega_minus={self.omega_minus!r}"
            )
        if abs(w1 - self.omega_plus) >= ASYMPTOTE_RTOL * self.omega_plus:
            raise AsymptoteNotReached(
                f"omega(t_end={self.t_end})={w1!r} differs from omega_plus={self.omega_plus!r}"
            )


def load_profile_table(path, kind: str = "table", **kwargs) -> FrequencyProfile:
    """Read a two-column ``t omega`` text file (``#`` starts a comment)."""
    t, omega = [], []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns 't omega', got {line!r}")
        try:
            tv, wv = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
        if t and tv <= t[-1]:
            raise ValueError(f"{path}:{lineno}: time {tv!r} is not strictly increasing")
        if not wv > 0:
            raise ValueError(f"{path}:{lineno}: omega must be positive, got {wv!r}")
        t.append(tv)
        omega.append(wv)
    if len(t) < 2:
        raise ValueError(f"{path}: need at least two samples")
    return FrequencyProfile.from_samples(t, omega, kind=kind, **kwargs)


@dataclass(frozen=True)
class ReflectionResult:
    C: complex
    D: complex
    rho: float
    wronskian_defect: float
    solver_steps: int
    max_step: float

    @property
    def C_abs2(self) -> float:
        return abs(self.C) ** 2

    @property
    def D_abs2(self) -> float:
        return abs(self.D) ** 2


def rho_sudden(omega_minus: float, omega_plus: float) -> float:
    """``rho`` for an instantaneous jump: ``((w+ - w-)/(w+ + w-))**2``."""
    if not (omega_minus > 0 and omega_plus > 0):
        raise ValueError("frequencies must be positive")
    return ((omega_plus - omega_minus) / (omega_plus + omega_minus)) ** 2


def _integrate(profile: FrequencyProfile, settings: SolverSettings):
    def rhs(t, y):
        w2 = profile.omega_squared(t)
        return (y[2], y[3], -w2 * y[0], -w2 * y[1])

    t0 = profile.t_start
    xi = complex(np.exp(-1j * profile.omega_minus * t0))
    dxi = -1j * profile.omega_minus * xi
    y = np.array([xi.real, xi.imag, dxi.real, dxi.imag])
    steps = 0
    hmax = 0.0
    for a, b in profile.segments():
        sol = solve_ivp(rhs, (a, b), y, method=settings.method, rtol=settings.rtol,
                        atol=settings.atol, max_step=settings.max_step)
        if not sol.success:
            raise WronskianViolation(f"integrator failed on [{a}, {b}]: {sol.message}")
        y = sol.y[:, -1]
        steps += sol.t.size - 1
        hmax = max(hmax, float(np.max(np.diff(sol.t))))
    return complex(y[0], y[1]), complex(y[2], y[3]), steps, hmax


def compute_rho(profile: FrequencyProfile, settings: SolverSettings | None = None) -> ReflectionResult:
    """Integrate the classical mode through ``profile`` and extract ``rho``."""
    settings = settings or SolverSettings()
    profile.check_asymptotes()
    wp = profile.omega_plus
    T = profile.t_end
    target = profile.omega_minus / wp
    current = settings
    for _ in range(settings.max_refinements + 1):
        xi, dxi, steps, hmax = _integrate(profile, current)
        C = np.exp(1j * wp * T) * (xi + 1j * dxi / wp) / 2.0
        D = np.exp(-1j * wp * T) * (xi - 1j * dxi / wp) / 2.0
        c2, d2 = abs(C) ** 2, abs(D) ** 2
        defect = abs(c2 - d2 - target)
        if defect < settings.wronskian_tol:
            return ReflectionResult(complex(C), complex(D), float(d2 / c2), float(defect), steps, hmax)
        current = current.refined()
    raise WronskianViolation(
        f"Wronskian defect {defect:.3g} >= {settings.wronskian_tol:g} after "
        f"{settings.max_refinements} refinements"
    )
