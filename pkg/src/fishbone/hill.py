"""Vertical modes and their torsional stability via Hill equations.

A vertical mode is the periodic solution of

    ybar'' + (j^4 + 2) ybar + (3/2) ybar^3 = 0

at energy E; its amplitude is sqrt(Lambda_-^j(E)) and its period T_j(E)
is an elliptic-type integral.  Torsional perturbations along the mode obey
Hill equations xi'' + a(t) xi = 0 with a(t) = i^2 + 6 + 9 alpha ybar(t)^2,
whose coefficient period is T_j/2.  Stability is decided two ways: a
sufficient band criterion (the coefficient stays inside one spectral band
of the half-period), and the Floquet monodromy trace.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

__all__ = [
    "VerticalMode",
    "HillProblem",
    "VerdictKind",
    "StabilityVerdict",
    "lambda_pm",
    "mode_energy",
    "amplitude_of",
    "period",
    "period_bounds",
    "vertical_mode",
    "hill_problem",
    "torsion_alpha",
    "zhukovskii_verdict",
    "theoretical_threshold",
    "floquet_verdict",
]

_GAUSS_NODES, _GAUSS_WEIGHTS = leggauss(128)
_PHI = 0.25 * math.pi * (_GAUSS_NODES + 1.0)  # [-1, 1] -> [0, pi/2]
_PHI_W = 0.25 * math.pi * _GAUSS_WEIGHTS
_SIN2_PHI = np.sin(_PHI) ** 2

SUPPORTED_THRESHOLDS = {(1, 1), (1, 2), (2, 2)}


def lambda_pm(E: float, j: int, sign: int) -> float:
    """Level-set roots Lambda_+/- of the vertical-mode energy relation.

    Lambda_+-^j(E) = 2 sqrt((j^4+2)^2/9 + 2E/3) +- (2/3)(j^4+2); the
    squared amplitude of the mode is Lambda_- and Lambda_+ controls the
    period.  Both are nonnegative and increasing in E.
    """
    if E < 0:
        raise ValueError(f"energy must be nonnegative, got {E}")
    if j < 1:
        raise ValueError(f"mode index must be >= 1, got {j}")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    c = float(j**4 + 2)
    return 2.0 * math.sqrt(c * c / 9.0 + 2.0 * E / 3.0) + sign * (2.0 / 3.0) * c


def mode_energy(alpha: float, beta: float, k: int) -> float:
    """Energy of the k-th vertical mode with initial data (alpha, beta)."""
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")
    return 0.5 * beta * beta + 0.5 * (k**4 + 2) * alpha * alpha + 0.375 * alpha**4


def amplitude_of(E: float, k: int) -> float:
    """The unique mu > 0 with mode_energy(mu, 0, k) = E; equals sqrt(Lambda_-)."""
    return math.sqrt(lambda_pm(E, k, -1))


def period(E: float, j: int = 1) -> float:
    """Period T_j(E) of the j-th vertical mode.

    The defining integrand has an inverse-square-root endpoint
    singularity; substituting s = sin(phi) removes it and the smooth
    integrand is handled by fixed 128-node Gauss-Legendre quadrature
    (error far below 1e-10 over the desk-scale energy range).
    Strictly decreasing in E, with T_j(0) = 2 pi / sqrt(j^4 + 2).
    """
    lam_plus = lambda_pm(E, j, +1)
    lam_minus = lambda_pm(E, j, -1)
    integral = float(np.sum(_PHI_W / np.sqrt(lam_plus + lam_minus * _SIN2_PHI)))
    return 8.0 / math.sqrt(3.0) * integral


def period_bounds(E: float, j: int = 1) -> tuple[float, float]:
    """Rigorous enclosure (lower, upper) of T_j(E) used by the band thresholds."""
    c = float(j**4 + 2)
    lower = 2.0 * math.pi / (c * c + 6.0 * E) ** 0.25
    upper = 4.0 * math.pi / math.sqrt(3.0 * lambda_pm(E, j, +1))
    return lower, upper


@dataclass(frozen=True)
class VerticalMode:
    """One periodic vertical-mode orbit, sampled over a full period."""

    j: int
    energy: float
    amplitude: float
    period: float
    times: np.ndarray
    values: np.ndarray
    velocities: np.ndarray


def _mode_rhs(j: int):
    c = float(j**4 + 2)

    def rhs(t, x):
        return [x[1], -c * x[0] - 1.5 * x[0] ** 3]

    return rhs


def vertical_mode(E: float, j: int, samples: int = 512) -> VerticalMode:
    """Integrate one period of the j-th mode starting from (-amplitude, 0).

    Raises if the orbit fails to close within 1e-8 or the measured period
    disagrees with the quadrature period by more than 1e-6 relative;
    either signals a misconfigured integrator.
    """
    if not (E > 0):
        raise ValueError(f"energy must be positive, got {E}")
    amp = amplitude_of(E, j)
    T = period(E, j)
    t_eval = np.linspace(0.0, T, samples + 1)
    sol = solve_ivp(
        _mode_rhs(j),
        (0.0, T),
        [-amp, 0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        t_eval=t_eval,
    )
    closure = math.hypot(sol.y[0, -1] + amp, sol.y[1, -1])
    if closure > 1e-8:
        raise RuntimeError(
            f"vertical mode failed to close after one period (error {closure:.3e})"
        )
    return VerticalMode(
        j=j,
        energy=E,
        amplitude=amp,
        period=T,
        times=sol.t,
        values=sol.y[0],
        velocities=sol.y[1],
    )


def torsion_alpha(i: int, j: int) -> float:
    """Coupling weight in the Hill coefficient: 3/2 on the resonant index."""
    return 1.5 if i == j else 1.0


@dataclass(frozen=True)
class HillProblem:
    """One linearized torsional equation xi'' + a(t) xi = 0 along a mode.

    a(t) = i^2 + 6 + 9 alpha_{i,j} ybar_j(t)^2 is positive and has period
    T_j(E)/2 (the square of the mode is half-period periodic).
    """

    i: int
    j: int
    mode: VerticalMode

    @property
    def energy(self) -> float:
        return self.mode.energy

    @property
    def alpha(self) -> float:
        return torsion_alpha(self.i, self.j)

    @property
    def half_period(self) -> float:
        return 0.5 * self.mode.period

    @property
    def a_min(self) -> float:
        return self.i**2 + 6.0

    @property
    def a_max(self) -> float:
        return self.i**2 + 6.0 + 9.0 * self.alpha * self.mode.amplitude**2

    def coefficient(self, t: float) -> float:
        ybar = float(np.interp(t % self.mode.period, self.mode.times, self.mode.values))
        return self.i**2 + 6.0 + 9.0 * self.alpha * ybar * ybar


def hill_problem(i: int, j: int, E: float, samples: int = 512) -> HillProblem:
    """Build the (i, j) Hill problem at energy E."""
    if i < 1:
        raise ValueError(f"torsional index must be >= 1, got {i}")
    return HillProblem(i=i, j=j, mode=vertical_mode(E, j, samples=samples))


class VerdictKind(enum.Enum):
    SUFFICIENT_STABLE = "sufficient_stable"
    INCONCLUSIVE = "inconclusive"
    FLOQUET_STABLE = "floquet_stable"
    FLOQUET_UNSTABLE = "floquet_unstable"


@dataclass(frozen=True)
class StabilityVerdict:
    kind: VerdictKind
    band: Optional[int] = None
    band_bounds: Optional[tuple[float, float]] = None
    trace: Optional[float] = None
    determinant: Optional[float] = None

    @property
    def stable(self) -> Optional[bool]:
        if self.kind is VerdictKind.INCONCLUSIVE:
            return None
        return self.kind is not VerdictKind.FLOQUET_UNSTABLE


def _band_verdict(a_min: float, a_max: float, p: float) -> Optional[tuple[int, tuple[float, float]]]:
    """Smallest band n with (n pi / p)^2 <= a_min and a_max <= ((n+1) pi / p)^2."""
    n = 0
    while True:
        lo = (n * math.pi / p) ** 2
        if lo > a_min:
            return None
        hi = ((n + 1) * math.pi / p) ** 2
        if a_max <= hi:
            return n, (lo, hi)
        n += 1


def zhukovskii_verdict(problem: HillProblem) -> StabilityVerdict:
    """Sufficient stability test: confine a(t) inside one half-period band.

    With p the coefficient period T_j/2, the trivial solution is stable
    whenever (n pi / p)^2 <= a(t) <= ((n+1) pi / p)^2 for some integer
    n >= 0.  Returns the band on success, otherwise INCONCLUSIVE (the
    criterion is one-sided; failure proves nothing).
    """
    hit = _band_verdict(problem.a_min, problem.a_max, problem.half_period)
    if hit is None:
        return StabilityVerdict(kind=VerdictKind.INCONCLUSIVE)
    n, bounds = hit
    return StabilityVerdict(kind=VerdictKind.SUFFICIENT_STABLE, band=n, band_bounds=bounds)


def _band_stable_at_energy(i: int, k: int, E: float, exact_period_flag: bool) -> bool:
    a_min = i * i + 6.0
    a_max = a_min + 9.0 * torsion_alpha(i, k) * lambda_pm(E, k, -1)
    if exact_period_flag:
        p = 0.5 * period(E, k)
        return _band_verdict(a_min, a_max, p) is not None
    # Bound mode: replace the period by its rigorous enclosure so the band
    # test becomes a closed-form sufficient condition.  With p = T/2,
    # (2 pi / T)^2 <= sqrt((k^4+2)^2 + 6E)   and   (2 pi / T)^2 >= (3/4) Lambda_+.
    c = float(k**4 + 2)
    lo_rate = math.sqrt(c * c + 6.0 * E)  # upper bound on (pi/p)^2
    hi_rate = 0.75 * lambda_pm(E, k, +1)  # lower bound on (pi/p)^2
    n = 0
    while True:
        if n * n * lo_rate > a_min:
            return False
        if a_max <= (n + 1) ** 2 * hi_rate:
            return True
        n += 1


def theoretical_threshold(
    k: int, m: int, exact_period: bool = False
) -> tuple[float, float]:
    """Largest energy whose band verdict is stable for every torsional index.

    The default closed-form bound mode reproduces the exact rational
    thresholds 235/294 (k=1, m=1), 13/24 (k=1, m=2) and 5024/867
    (k=2, m=2).  With ``exact_period=True`` the quadrature period is used
    instead, giving the sharper numeric thresholds (about 0.945 for the
    one-mode case).  Returns (energy, amplitude).
    """
    if (k, m) not in SUPPORTED_THRESHOLDS:
        raise ValueError(
            f"threshold supported only for (k, m) in {sorted(SUPPORTED_THRESHOLDS)}"
        )

    def stable(E: float) -> bool:
        return all(
            _band_stable_at_energy(i, k, E, exact_period) for i in range(1, m + 1)
        )

    if not stable(1e-9):
        raise RuntimeError("band criterion fails arbitrarily close to zero energy")
    lo, hi = 0.0, 1.0
    while stable(hi):
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("no finite stability threshold found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    e_max = 0.5 * (lo + hi)
    return e_max, amplitude_of(e_max, k)


def floquet_verdict(problem: HillProblem, tol: float = 1e-9) -> StabilityVerdict:
    """Monodromy test over one coefficient period p = T_j/2.

    The mode is integrated alongside the two canonical solution columns so
    the coefficient is evaluated exactly rather than interpolated.  The
    determinant must come back within 1e-6 of 1 (Liouville); stability is
    |trace| <= 2 + tol.
    """
    i, j = problem.i, problem.j
    alpha = problem.alpha
    c = float(j**4 + 2)
    p = problem.half_period

    def rhs(t, x):
        y, yd, u1, u1d, u2, u2d = x
        a = i * i + 6.0 + 9.0 * alpha * y * y
        return [yd, -c * y - 1.5 * y**3, u1d, -a * u1, u2d, -a * u2]

    x0 = [-problem.mode.amplitude, 0.0, 1.0, 0.0, 0.0, 1.0]
    sol = solve_ivp(rhs, (0.0, p), x0, method="DOP853", rtol=1e-12, atol=1e-14)
    xf = sol.y[:, -1]
    monodromy = np.array([[xf[2], xf[4]], [xf[3], xf[5]]])
    trace = float(np.trace(monodromy))
    det = float(np.linalg.det(monodromy))
    if abs(det - 1.0) > 1e-6:
        raise RuntimeError(
            f"monodromy determinant {det} deviates from 1; integration failed"
        )
    kind = (
        VerdictKind.FLOQUET_STABLE
        if abs(trace) <= 2.0 + tol
        else VerdictKind.FLOQUET_UNSTABLE
    )
    return StabilityVerdict(kind=kind, trace=trace, determinant=det)
