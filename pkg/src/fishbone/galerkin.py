"""Assembly of the truncated modal ODE system and its torsional linearization.

The m-mode system, packed as x = [Y, Ydot, Z, Zdot], is

    yj'' = -(j^4 + 2) yj - gamma * (4/pi) Int y^m ((y^m)^2 + 3 (z^m)^2) sin(jx)
    zj'' = -(cv j^2 + 6) zj - gamma * (12/pi) Int z^m (3 (y^m)^2 + (z^m)^2) sin(jx)

with cv = 1 (standard) or 3 (stiff torsion).  The cubic integrals are
expanded exactly through the cosine coefficients of (y^m)^2 and (z^m)^2,
which keeps the right-hand side closed-form and O(m^2) per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

from .model import ModelSpec, coupling_table, square_cosine_coeffs

if TYPE_CHECKING:  # pragma: no cover
    from .integrator import Trajectory

__all__ = ["OdeSystem", "LinearizedTorsion", "build_system", "linearize_about_vertical_mode"]

VERTICAL_MODE_TOL = 1e-12


@dataclass(frozen=True)
class OdeSystem:
    """First-order form of the truncated system; `rhs(t, x)` is scipy-ready."""

    spec: ModelSpec
    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]


def build_system(spec: ModelSpec) -> OdeSystem:
    """Assemble the right-hand side evaluator for the given model."""
    m = spec.modes
    gamma = spec.gamma
    j = np.arange(1, m + 1, dtype=float)
    lin_y = j**4 + 2.0
    lin_z = spec.torsion_variant.torsion_scale * j**2 + 6.0
    idx = np.arange(1, m + 1)
    idx_diff = np.abs(idx[:, None] - idx[None, :])
    idx_sum = idx[:, None] + idx[None, :]

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        y = x[:m]
        ydot = x[m : 2 * m]
        z = x[2 * m : 3 * m]
        zdot = x[3 * m :]
        q = square_cosine_coeffs(y)
        r = square_cosine_coeffs(z)
        qt = q.copy()
        qt[0] *= 2.0
        rt = r.copy()
        rt[0] *= 2.0
        # coupling matrices: C[a, j] multiplies v_a in the cubic sum for mode j
        cy = qt[idx_diff] - q[idx_sum]
        cz = rt[idx_diff] - r[idx_sum]
        ydd = -lin_y * y - gamma * (y @ cy + 3.0 * (y @ cz))
        zdd = -lin_z * z - gamma * (3.0 * (z @ cz) + 9.0 * (z @ cy))
        return np.concatenate([ydot, ydd, zdot, zdd])

    return OdeSystem(spec=spec, dimension=4 * m, rhs=rhs)


@dataclass(frozen=True)
class LinearizedTorsion:
    """Periodic coefficient law of the torsional linearization along a vertical mode.

    The torsional perturbation Xi satisfies Xi'' + P_k(t) Xi = 0 with

        P_k(t)[i, j] = (cv j^2 + 6) delta_ij + (9/2) c_{i,j,k} ybar_k(t)^2,

    where c is the coupling table.  For m <= 2 the matrix is diagonal with
    entries i^2 + 6 + 9 alpha_{i,k} ybar_k(t)^2, alpha_{k,k} = 3/2 and
    alpha_{i,k} = 1 otherwise.  For m >= 3 nonzero off-diagonal entries
    (e.g. c_{3k,k,k} = -1) couple the components; the law is assembled but
    its stability classification is outside the diagonal theory.
    """

    spec: ModelSpec
    k: int
    m: int
    times: np.ndarray
    mode_values: np.ndarray  # ybar_k at the stored sample times

    def matrix(self, t: float) -> np.ndarray:
        """Evaluate P_k(t), interpolating ybar_k between stored samples."""
        ybar = float(np.interp(t, self.times, self.mode_values))
        return self.matrix_for_value(ybar)

    def matrix_for_value(self, ybar: float) -> np.ndarray:
        cv = self.spec.torsion_variant.torsion_scale
        j = np.arange(1, self.m + 1, dtype=float)
        table = coupling_table(self.m)
        p = np.diag(cv * j**2 + 6.0)
        p += 4.5 * ybar * ybar * table.entries[:, :, self.k - 1]
        return p

    def diagonal_coefficient(self, i: int, ybar: float) -> float:
        """Hill coefficient a_{i,k} = i^2 + 6 + 9 alpha_{i,k} ybar^2 (standard scaling)."""
        alpha = 1.5 if i == self.k else 1.0
        return i * i + 6.0 + 9.0 * alpha * ybar * ybar


def linearize_about_vertical_mode(
    spec: ModelSpec, k: int, trajectory: "Trajectory"
) -> LinearizedTorsion:
    """Extract the torsional coefficient law along a pure vertical-mode orbit.

    The trajectory must have Z identically zero and Y supported on
    component k only (both within 1e-12); anything else is rejected.
    """
    m = spec.modes
    if not (1 <= k <= m):
        raise ValueError(f"mode index k={k} out of range 1..{m}")
    z_max = float(np.max(np.abs(trajectory.z))) if trajectory.z.size else 0.0
    zd_max = float(np.max(np.abs(trajectory.zdot))) if trajectory.zdot.size else 0.0
    if max(z_max, zd_max) > VERTICAL_MODE_TOL:
        raise ValueError(
            f"trajectory is not torsion-free: max |z| component {max(z_max, zd_max):.3e}"
        )
    other = [i for i in range(m) if i != k - 1]
    if other:
        spread = float(np.max(np.abs(trajectory.y[:, other])))
        if spread > VERTICAL_MODE_TOL:
            raise ValueError(
                f"vertical motion spreads off component {k}: max {spread:.3e}"
            )
    return LinearizedTorsion(
        spec=spec,
        k=k,
        m=m,
        times=trajectory.times,
        mode_values=trajectory.y[:, k - 1],
    )
