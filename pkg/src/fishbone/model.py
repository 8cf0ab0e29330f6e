"""Domain types and exact modal algebra for the fish-bone bridge model.

The deck is modeled as a beam of span pi whose cross sections rotate
rigidly.  Vertical displacement and torsional rotation are expanded in
sine series; this module holds the truncated-state types, the cubic
hanger restoring force f(s) = s + gamma*s^3, the exact sine-product
coupling coefficients, and the conserved energy of the truncated system.

All quartic integrals over (0, pi) are evaluated in closed form by
expanding squared sine series into cosine series (a finite convolution),
so no numerical quadrature enters the energy or any right-hand side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "TorsionVariant",
    "ModelSpec",
    "ModalState",
    "EnergyBreakdown",
    "CouplingTable",
    "restoring_force",
    "coupling_coefficient",
    "coupling_table",
    "total_energy",
    "rescale_gamma",
    "pack_state",
    "unpack_state",
]


class TorsionVariant(enum.Enum):
    """Scaling of the linear torsional stiffness.

    STANDARD uses the unit scaling in which the linear torsional
    coefficient of mode j is j^2 + 6; STIFF keeps flexural and torsional
    rigidities equal, raising it to 3*j^2 + 6.  The cubic coupling terms
    are identical in both variants.
    """

    STANDARD = "standard"
    STIFF = "stiff"

    @property
    def torsion_scale(self) -> float:
        return 3.0 if self is TorsionVariant.STIFF else 1.0


@dataclass(frozen=True)
class ModelSpec:
    """Parameters defining one truncated fish-bone system."""

    gamma: float
    modes: int
    torsion_variant: TorsionVariant = TorsionVariant.STANDARD
    ell: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (isinstance(self.modes, int) and self.modes >= 1):
            raise ValueError(f"modes must be a positive integer, got {self.modes}")
        if not (self.ell > 0):
            raise ValueError(f"ell must be positive, got {self.ell}")
        if not isinstance(self.torsion_variant, TorsionVariant):
            raise ValueError(f"bad torsion variant: {self.torsion_variant!r}")


def _as_vector(v, m: int, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (m,):
        raise ValueError(f"{name} must have shape ({m},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ModalState:
    """One phase-space point: sine coefficients and their velocities.

    Vectors are ordered by mode index j = 1..m.  `y` holds the vertical
    coefficients, `z` the torsional ones (z = ell * theta).
    """

    t: float
    y: np.ndarray
    ydot: np.ndarray
    z: np.ndarray
    zdot: np.ndarray

    def __post_init__(self):
        m = len(np.atleast_1d(self.y))
        object.__setattr__(self, "y", _as_vector(self.y, m, "y"))
        object.__setattr__(self, "ydot", _as_vector(self.ydot, m, "ydot"))
        object.__setattr__(self, "z", _as_vector(self.z, m, "z"))
        object.__setattr__(self, "zdot", _as_vector(self.zdot, m, "zdot"))
        if not math.isfinite(self.t):
            raise ValueError("time must be finite")

    @property
    def modes(self) -> int:
        return self.y.shape[0]

    @staticmethod
    def zero(m: int, t: float = 0.0) -> "ModalState":
        zeros = np.zeros(m)
        return ModalState(t, zeros, zeros, zeros, zeros)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Conserved energy split into its nonnegative contributions.

    `total` is the exact sum of the seven components.
    """

    kinetic_y: float
    kinetic_z: float
    bending: float
    torsion_elastic: float
    quadratic_potential: float
    quartic_potential: float
    coupling_potential: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "total",
            math.fsum(
                (
                    self.kinetic_y,
                    self.kinetic_z,
                    self.bending,
                    self.torsion_elastic,
                    self.quadratic_potential,
                    self.quartic_potential,
                    self.coupling_potential,
                )
            ),
        )


def restoring_force(s: float, gamma: float) -> float:
    """Hanger restoring force f(s) = s + gamma*s^3 (odd, nondecreasing)."""
    return s + gamma * s * s * s


def coupling_coefficient(l: int, j: int, k: int) -> float:
    """Closed form of (8/pi) * integral of sin(lx) sin(jx) sin(kx)^2 over (0, pi).

    Symmetric in (l, j).  Values lie in {3, 2, 1, 0, -1}:

    * l == j == k            -> 3
    * l == j != k            -> 2
    * one of l, j equals k   -> -1 if the other equals 3k, else 0
    * all distinct           -> +1 if l+j == 2k, -1 if |j-l| == 2k, else 0
    """
    if min(l, j, k) < 1:
        raise ValueError(f"indices must be >= 1, got ({l}, {j}, {k})")
    if l == j:
        return 3.0 if l == k else 2.0
    # l != j from here on
    if l == k or j == k:
        other = j if l == k else l
        return -1.0 if other == 3 * k else 0.0
    lo, hi = min(l, j), max(l, j)
    if hi + lo == 2 * k:
        return 1.0
    if hi - lo == 2 * k:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class CouplingTable:
    """Dense table of coupling coefficients for indices 1..m.

    `entries[l-1, j-1, k-1]` equals ``coupling_coefficient(l, j, k)``.
    Memory is O(m^3); fine for desk-scale m.
    """

    m: int
    entries: np.ndarray

    def value(self, l: int, j: int, k: int) -> float:
        return float(self.entries[l - 1, j - 1, k - 1])


@lru_cache(maxsize=None)
def coupling_table(m: int) -> CouplingTable:
    """Build (and cache) the coupling table for truncation m."""
    entries = np.empty((m, m, m))
    for l in range(1, m + 1):
        for j in range(1, m + 1):
            for k in range(1, m + 1):
                entries[l - 1, j - 1, k - 1] = coupling_coefficient(l, j, k)
    entries.flags.writeable = False
    return CouplingTable(m, entries)


# ---------------------------------------------------------------------------
# Cosine-series expansion of squared sine series.
#
# For u = sum_a v_a sin(a x), u^2 = sum_{n=0}^{2m} q_n cos(n x) with
# q accumulating +v_a v_b / 2 at n = |a-b| and -v_a v_b / 2 at n = a+b.
# Every integral below reduces to finite sums over these coefficients.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pair_projection(m: int) -> np.ndarray:
    """(m*m, 2m+1) matrix mapping outer(v, v).ravel() to cosine coefficients."""
    proj = np.zeros((m * m, 2 * m + 1))
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            row = (a - 1) * m + (b - 1)
            proj[row, abs(a - b)] += 0.5
            proj[row, a + b] -= 0.5
    proj.flags.writeable = False
    return proj


def square_cosine_coeffs(v: np.ndarray) -> np.ndarray:
    """Cosine coefficients of the square of the sine series with coefficients v."""
    v = np.asarray(v, dtype=float)
    m = v.shape[-1]
    outer = v[..., :, None] * v[..., None, :]
    return outer.reshape(*v.shape[:-1], m * m) @ _pair_projection(m)


def _quartic_integral(q: np.ndarray) -> np.ndarray:
    """(1/pi) * integral of u^4 from the cosine coefficients q of u^2."""
    return q[..., 0] ** 2 + 0.5 * np.sum(q[..., 1:] ** 2, axis=-1)


def _cross_integral(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """(1/pi) * integral of u^2 w^2 from the cosine coefficients of u^2 and w^2."""
    return q[..., 0] * r[..., 0] + 0.5 * np.sum(q[..., 1:] * r[..., 1:], axis=-1)


def energy_parts_arrays(
    spec: ModelSpec,
    y: np.ndarray,
    ydot: np.ndarray,
    z: np.ndarray,
    zdot: np.ndarray,
) -> dict[str, np.ndarray]:
    """Energy components for a batch of states (leading axes broadcast).

    Each input has shape (..., m).  Returns arrays of shape (...).
    """
    j = np.arange(1, spec.modes + 1, dtype=float)
    cv = spec.torsion_variant.torsion_scale
    q = square_cosine_coeffs(y)
    r = square_cosine_coeffs(z)
    parts = {
        "kinetic_y": 0.5 * np.sum(ydot * ydot, axis=-1),
        "kinetic_z": np.sum(zdot * zdot, axis=-1) / 6.0,
        "bending": 0.5 * np.sum(j**4 * y * y, axis=-1),
        "torsion_elastic": cv * np.sum(j**2 * z * z, axis=-1) / 6.0,
        "quadratic_potential": np.sum(y * y, axis=-1) + np.sum(z * z, axis=-1),
        "quartic_potential": spec.gamma * (_quartic_integral(q) + _quartic_integral(r)),
        "coupling_potential": 6.0 * spec.gamma * _cross_integral(q, r),
    }
    return parts


def total_energy(state: ModalState, spec: ModelSpec) -> EnergyBreakdown:
    """Conserved energy of the truncated system at one state, in closed form.

    Under the STIFF variant the torsional elastic term carries the factor
    3 on j^2; for m >= 2 that placement extrapolates the unit-scaling
    energy display (only the linear torsional stiffness changes between
    the two variants).
    """
    if state.modes != spec.modes:
        raise ValueError(
            f"state has {state.modes} modes but spec expects {spec.modes}"
        )
    parts = energy_parts_arrays(spec, state.y, state.ydot, state.z, state.zdot)
    return EnergyBreakdown(**{k: float(v) for k, v in parts.items()})


def rescale_gamma(state: ModalState, gamma: float) -> ModalState:
    """Map a solution of the gamma-system to the equivalent unit-gamma state.

    Multiplying all coordinates and velocities by sqrt(gamma) turns a
    trajectory of the gamma-system into one of the gamma = 1 system, with
    energies related by E_gamma = E_1 / gamma.
    """
    if not (gamma > 0):
        raise ValueError(f"gamma must be positive, got {gamma}")
    s = math.sqrt(gamma)
    return ModalState(state.t, s * state.y, s * state.ydot, s * state.z, s * state.zdot)


def pack_state(state: ModalState) -> np.ndarray:
    """Flatten to the project-wide packing order [Y, Ydot, Z, Zdot]."""
    return np.concatenate([state.y, state.ydot, state.z, state.zdot])


def unpack_state(t: float, x: np.ndarray, m: int) -> ModalState:
    """Inverse of :func:`pack_state`."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4 * m,):
        raise ValueError(f"packed state must have length {4 * m}, got {x.shape}")
    return ModalState(t, x[:m], x[m : 2 * m], x[2 * m : 3 * m], x[3 * m :])
