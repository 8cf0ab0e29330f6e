"""Decidable bounds justifying the truncation to finitely many torsional modes.

The sup norm of the torsional tail above mode m is controlled by
max(K1, K2) of a two-constraint extremal problem; requiring either
constant to stay below omega^4 yields two polynomial inequalities in
(E, omega, m).  The first caps the modes that must be retained at a given
energy, the second caps the energy below which every mode is already small.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "NegligibilityQuery",
    "Via",
    "maxcalc_constants",
    "maxcalc_supremum",
    "is_negligible",
    "min_negligible_mode",
    "max_negligible_energy",
    "gagliardo_check",
]


@dataclass(frozen=True)
class NegligibilityQuery:
    """Ask whether the torsional tail above mode m stays below omega."""

    E: float
    omega: float
    m: int

    def __post_init__(self):
        if not (self.E > 0):
            raise ValueError(f"energy must be positive, got {self.E}")
        if not (self.omega > 0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValueError(f"m must be a positive integer, got {self.m}")


class Via(enum.Enum):
    PRIMA = "mode_bound"
    SECONDA = "energy_bound"
    NEITHER = "neither"


def maxcalc_constants(a: float, b: float, c: float, d: float) -> tuple[float, float]:
    """Closed-form sup of x*y over {0 < y < d x, a x + y + b y^2 < c}.

    The supremum equals max(K1, K2): K1 is attained where the ray y = d x
    meets the parabola, K2 where a hyperbola x y = k is tangent to the
    parabola.  For 3 b c below 1e-6 the K2 formula loses all significant
    digits to cancellation, so a series in b is used there.
    """
    if min(a, b, c, d) <= 0:
        raise ValueError("all four parameters must be positive")
    s = a + d
    k1 = 2.0 * c * c * d / (
        s * s + 2.0 * b * c * d * d + s * math.sqrt(s * s + 4.0 * b * c * d * d)
    )
    x = 3.0 * b * c
    if x < 1e-6:
        # 2(1+x)^{3/2} - 2 - 3x = (3/4)x^2 - (1/8)x^3 + (3/64)x^4 - ...
        k2 = c * c / (4.0 * a) - b * c**3 / (8.0 * a) + 9.0 * b * b * c**4 / (64.0 * a)
    else:
        k2 = (2.0 * (1.0 + x) ** 1.5 - 2.0 - 3.0 * x) / (27.0 * a * b * b)
    return k1, k2


def maxcalc_supremum(a: float, b: float, c: float, d: float) -> float:
    """Exact sup of x*y over the region of :func:`maxcalc_constants`.

    K2 is the hyperbola-parabola tangency value; it competes only when the
    tangency point, whose ordinate is y* = (sqrt(1+3bc) - 1) / (3b), falls
    inside the sector y < d x.  Otherwise the supremum sits at the corner
    and equals K1.  max(K1, K2) is an upper bound in every case, which is
    all the tail estimate uses.
    """
    k1, k2 = maxcalc_constants(a, b, c, d)
    if a <= d:
        return max(k1, k2)
    y_star = (math.sqrt(1.0 + 3.0 * b * c) - 1.0) / (3.0 * b)
    if y_star > (a - d) / (2.0 * b * d):
        return max(k1, k2)
    return k1


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def mode_inequality_value(E, omega, m: int) -> float:
    """Value of the mode-count inequality; the tail bound holds when >= 0.

    pi w^4 (m+1)^2 [pi D^2 + 36 E] - 36 pi^2 E^2 (m+1)^4 - 9 w^8,
    D = m^2 + 2m + 7.  The pi^2 bracket cancels two terms that grow like
    m^6 and m^4 while the w^8 term is ~20 orders smaller, so the bracket
    is accumulated exactly over rationals before any float rounding.
    """
    ef, wf = _as_fraction(E), _as_fraction(omega)
    d = m * m + 2 * m + 7
    mp1sq = (m + 1) * (m + 1)
    bracket = wf**4 * mp1sq * d * d - 36 * ef * ef * mp1sq * mp1sq
    linear = 36 * ef * wf**4 * mp1sq
    const = -9 * wf**8
    pi = math.pi
    return math.fsum((pi * pi * float(bracket), pi * float(linear), float(const)))


def energy_inequality_value(E, omega) -> float:
    """Value of the small-energy inequality; the tail bound holds when <= 0.

    E^3 + (pi/2) E^2 - (3 w^4 / 4) E - 3 w^8 / (32 pi) - pi w^4 / 3.
    """
    E = float(E)
    w4 = float(omega) ** 4
    pi = math.pi
    return math.fsum(
        (E**3, 0.5 * pi * E * E, -0.75 * w4 * E, -3.0 * w4 * w4 / (32.0 * pi), -pi * w4 / 3.0)
    )


def is_negligible(q: NegligibilityQuery) -> tuple[bool, Via]:
    """Evaluate both tail-bound inequalities exactly as stated.

    The small-energy route is reported first when both hold: it makes the
    stronger statement (every mode stays small, not just the tail).
    """
    if energy_inequality_value(q.E, q.omega) <= 0.0:
        return True, Via.SECONDA
    if mode_inequality_value(q.E, q.omega, q.m) >= 0.0:
        return True, Via.PRIMA
    return False, Via.NEITHER


def min_negligible_mode(E, omega) -> int:
    """Smallest m for which the mode-count inequality holds.

    Uses the monotonicity of the inequality in m: exponential search for a
    satisfying m, then binary search down to the boundary.  Close to
    6 E / omega^2 - 2 for small omega (one above it on typical grids).
    """
    if not (float(E) > 0 and float(omega) > 0):
        raise ValueError("E and omega must be positive")

    def holds(m: int) -> bool:
        return mode_inequality_value(E, omega, m) >= 0.0

    guess = max(1, int(6.0 * float(E) / float(omega) ** 2) - 4)
    lo = 1
    if holds(1):
        return 1
    hi = guess
    while not holds(hi):
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def max_negligible_energy(omega) -> float:
    """Largest E satisfying the small-energy inequality, by bisection.

    The cubic is negative at 0 and eventually increasing, with a single
    positive root; close to sqrt(2/3) * omega^2 for small omega.
    """
    w = float(omega)
    if not (w > 0):
        raise ValueError(f"omega must be positive, got {omega}")
    lo, hi = 0.0, max(1.0, w * w)
    while energy_inequality_value(hi, w) <= 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if energy_inequality_value(mid, w) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo  # largest energy verified to satisfy the inequality


def gagliardo_check(coefficients: Sequence[float], grid: int = 4096) -> tuple[float, float]:
    """Both sides of the interpolation inequality ||u||_inf^2 <= ||u||_2 ||u'||_2.

    `coefficients` are the sine coefficients of u on (0, pi).  The L2
    norms are exact by Parseval; the sup norm is located by dense sampling
    followed by golden-section refinement around the best sample.
    """
    b = np.asarray(coefficients, dtype=float)
    if b.size == 0 or not np.any(b):
        return 0.0, 0.0
    j = np.arange(1, b.size + 1)
    norm2 = math.sqrt(0.5 * math.pi * float(np.sum(b * b)))
    dnorm2 = math.sqrt(0.5 * math.pi * float(np.sum(j * j * b * b)))

    def u_abs(x):
        return np.abs(np.sin(np.multiply.outer(x, j)) @ b)

    xs = np.linspace(0.0, math.pi, grid)
    vals = u_abs(xs)
    i0 = int(np.argmax(vals))
    lo = xs[max(i0 - 1, 0)]
    hi = xs[min(i0 + 1, grid - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = float(u_abs(x1)), float(u_abs(x2))
    for _ in range(80):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = float(u_abs(x2))
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = float(u_abs(x1))
    sup = max(float(np.max(vals)), f1, f2)
    return sup * sup, norm2 * dnorm2
