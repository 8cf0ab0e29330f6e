"""Adaptive time integration of the modal system under an energy-drift contract.

Stepping is delegated to scipy's DOP853 embedded pair (order 8) with dense
sampling on a fixed grid.  Energy is recomputed at every sample; a run that
drifts past its relative-energy budget is cut short and flagged, so a
`Completed` trajectory certifies conservation within the budget.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.integrate import solve_ivp
from scipy.integrate._ivp.rk import DOP853

from .galerkin import OdeSystem
from .model import EnergyBreakdown, ModalState, ModelSpec, energy_parts_arrays, pack_state

__all__ = [
    "IntegratorConfig",
    "TrajectoryStatus",
    "Trajectory",
    "IntegrationError",
    "integrate",
    "max_component_amplitude",
]

_PART_KEYS = (
    "kinetic_y",
    "kinetic_z",
    "bending",
    "torsion_elastic",
    "quadratic_potential",
    "quartic_potential",
    "coupling_potential",
)


class IntegrationError(RuntimeError):
    """Raised when the solver produces non-finite states."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, sampling grid, and the energy-conservation budget."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    min_step: float = 0.0
    sample_interval: float = 0.01
    energy_drift_budget: float = 1e-7

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (self.min_step < self.max_step):
            raise ValueError("min_step must be smaller than max_step")
        if not (self.sample_interval > 0):
            raise ValueError("sample_interval must be positive")
        if not (self.energy_drift_budget > 0):
            raise ValueError("energy_drift_budget must be positive")


class TrajectoryStatus(enum.Enum):
    COMPLETED = "completed"
    ENERGY_BUDGET_EXCEEDED = "energy_budget_exceeded"
    STEP_UNDERFLOW = "step_underflow"


class _FlooredDOP853(DOP853):
    """DOP853 that fails (rather than stalls) below a user step floor."""

    def __init__(self, *args, step_floor: float = 0.0, **kwargs):
        self._step_floor = step_floor
        super().__init__(*args, **kwargs)

    def _step_impl(self):
        if self._step_floor > 0 and self.h_abs < self._step_floor:
            return False, self.TOO_SMALL_STEP
        return super()._step_impl()


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution with per-sample energies.

    Column layout follows the packing order [Y, Ydot, Z, Zdot]; the
    component arrays have shape (n_samples, m).  `samples` materializes
    the (ModalState, EnergyBreakdown) pairs on demand.
    """

    spec: ModelSpec
    times: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    z: np.ndarray
    zdot: np.ndarray
    status: TrajectoryStatus
    energy_parts: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.times.size and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def energy_total(self) -> np.ndarray:
        return self.energy_parts["total"]

    @property
    def energy_drift(self) -> np.ndarray:
        """Relative energy drift |E(t) - E(0)| / max(E(0), tiny)."""
        e = self.energy_total
        ref = e[0] if e[0] > 0 else 1.0
        return np.abs(e - e[0]) / ref

    def state_at(self, index: int) -> ModalState:
        return ModalState(
            float(self.times[index]),
            self.y[index],
            self.ydot[index],
            self.z[index],
            self.zdot[index],
        )

    def breakdown_at(self, index: int) -> EnergyBreakdown:
        return EnergyBreakdown(
            **{k: float(self.energy_parts[k][index]) for k in _PART_KEYS}
        )

    @property
    def samples(self) -> Iterator[tuple[ModalState, EnergyBreakdown]]:
        for i in range(len(self)):
            yield self.state_at(i), self.breakdown_at(i)


def _sample_grid(t0: float, t_end: float, dt: float) -> np.ndarray:
    n = int(math.floor((t_end - t0) / dt + 1e-9))
    grid = t0 + dt * np.arange(n + 1)
    np.minimum(grid, t_end, out=grid)  # guard against fp overshoot past t_end
    if grid[-1] < t_end - 1e-12 * max(1.0, abs(t_end)):
        grid = np.append(grid, t_end)
    if grid.size >= 2 and grid[-1] <= grid[-2]:
        grid = np.delete(grid, -2)
    return grid


def integrate(
    system: OdeSystem,
    initial: ModalState,
    t_end: float,
    config: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Advance the system from `initial` to `t_end` on the sampling grid.

    The run terminates early with ``ENERGY_BUDGET_EXCEEDED`` if the
    relative energy drift crosses the configured budget, and with
    ``STEP_UNDERFLOW`` if the controller would need a step below
    ``min_step``.
    """
    spec = system.spec
    if initial.modes != spec.modes:
        raise ValueError("initial state dimension does not match the system")
    if not (t_end > initial.t):
        raise ValueError(f"t_end={t_end} must exceed the initial time {initial.t}")

    x0 = pack_state(initial)
    m = spec.modes
    e0_parts = energy_parts_arrays(spec, initial.y, initial.ydot, initial.z, initial.zdot)
    e0 = float(sum(e0_parts[k] for k in _PART_KEYS))
    ref = e0 if e0 > 0 else 1.0
    budget = config.energy_drift_budget

    def drift_event(t, x):
        parts = energy_parts_arrays(spec, x[:m], x[m : 2 * m], x[2 * m : 3 * m], x[3 * m :])
        e = float(sum(parts[k] for k in _PART_KEYS))
        return budget - abs(e - e0) / ref

    drift_event.terminal = True
    drift_event.direction = -1

    grid = _sample_grid(initial.t, t_end, config.sample_interval)
    sol = solve_ivp(
        system.rhs,
        (initial.t, t_end),
        x0,
        method=_FlooredDOP853,
        t_eval=grid,
        rtol=config.rel_tol,
        atol=config.abs_tol,
        max_step=config.max_step,
        events=[drift_event],
        step_floor=config.min_step,
    )

    if sol.status == -1:
        status = TrajectoryStatus.STEP_UNDERFLOW
    elif sol.status == 1:
        status = TrajectoryStatus.ENERGY_BUDGET_EXCEEDED
    else:
        status = TrajectoryStatus.COMPLETED

    times = np.asarray(sol.t, dtype=float)
    states = np.asarray(sol.y, dtype=float).T
    if times.size == 0:  # failed before reaching the first sample point
        times = np.array([initial.t])
        states = x0[None, :]
    if not np.all(np.isfinite(states)):
        raise IntegrationError("integration produced non-finite state values")

    parts = energy_parts_arrays(
        spec, states[:, :m], states[:, m : 2 * m], states[:, 2 * m : 3 * m], states[:, 3 * m :]
    )
    total = np.sum(np.stack([parts[k] for k in _PART_KEYS]), axis=0)
    parts = dict(parts)
    parts["total"] = total

    # Contract check at the samples themselves; dense-output interpolation
    # could in principle peek past the budget between event checks.
    drift = np.abs(total - total[0]) / (total[0] if total[0] > 0 else 1.0)
    if status is TrajectoryStatus.COMPLETED and np.any(drift > budget):
        cut = int(np.argmax(drift > budget))
        times = times[:cut]
        states = states[:cut]
        parts = {k: v[:cut] for k, v in parts.items()}
        status = TrajectoryStatus.ENERGY_BUDGET_EXCEEDED

    return Trajectory(
        spec=spec,
        times=times,
        y=states[:, :m],
        ydot=states[:, m : 2 * m],
        z=states[:, 2 * m : 3 * m],
        zdot=states[:, 3 * m :],
        status=status,
        energy_parts=parts,
    )


def _parse_selector(which) -> tuple[str, int]:
    if isinstance(which, str):
        kind, idx = which[0], which[1:]
        return kind, int(idx)
    kind, idx = which
    return str(kind), int(idx)


def max_component_amplitude(traj: Trajectory, which) -> float:
    """Maximum of |selected coefficient| over the trajectory samples.

    `which` selects a component as e.g. ``"y1"``, ``"z2"`` or ``("y", 1)``.
    """
    if len(traj) == 0:
        raise ValueError("trajectory has no samples")
    kind, idx = _parse_selector(which)
    if not (1 <= idx <= traj.spec.modes):
        raise ValueError(f"component index {idx} out of range")
    columns = {"y": traj.y, "z": traj.z, "ydot": traj.ydot, "zdot": traj.zdot}
    try:
        arr = columns[kind]
    except KeyError:
        raise ValueError(f"unknown component kind {kind!r}") from None
    return float(np.max(np.abs(arr[:, idx - 1])))
