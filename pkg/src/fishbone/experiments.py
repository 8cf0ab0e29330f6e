"""Scripted numerical studies: instability onsets, threshold bisections,
torsional sign-change statistics, scaling verification, and the
small-angle approximation error table.

An instability run starts a vertical mode at a given amplitude with all
torsional coefficients seeded four orders of magnitude smaller, then
watches whether any torsional coefficient grows past `ratio` times its
seed within the horizon.  The growth criterion (default: two orders of
magnitude within t = 200) is the operational stand-in for "sudden wide
torsional oscillation" and is exposed as configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .galerkin import build_system
from .hill import mode_energy
from .integrator import IntegratorConfig, Trajectory, TrajectoryStatus, integrate
from .model import ModalState, ModelSpec, TorsionVariant, rescale_gamma, total_energy

__all__ = [
    "GrowthCriterion",
    "ThresholdResult",
    "InstabilityOutcome",
    "BracketError",
    "instability_run",
    "threshold_bisection",
    "amplitude_scan",
    "sign_change_census",
    "CensusReport",
    "trig_error_report",
    "TrigErrorRow",
    "scaling_experiment",
    "ScalingReport",
]

DEFAULT_SEED_SCALE = 1e-4


@dataclass(frozen=True)
class GrowthCriterion:
    """Fire when any torsional coefficient grows `ratio`-fold within `horizon`."""

    ratio: float = 100.0
    horizon: float = 200.0

    def __post_init__(self):
        if not (self.ratio > 1):
            raise ValueError("ratio must exceed 1")
        if not (self.horizon > 0):
            raise ValueError("horizon must be positive")


class InstabilityOutcome(NamedTuple):
    unstable: bool
    onset_time: Optional[float]
    trajectory: Trajectory


class BracketError(ValueError):
    """The bisection bracket does not straddle the stability boundary."""


def _initial_state(spec: ModelSpec, k: int, amplitude: float, seed_scale: float) -> ModalState:
    m = spec.modes
    y0 = np.zeros(m)
    y0[k - 1] = amplitude
    z0 = np.full(m, amplitude * seed_scale)
    return ModalState(0.0, y0, np.zeros(m), z0, np.zeros(m))


def instability_run(
    spec: ModelSpec,
    k: int,
    amplitude: float,
    seed_scale: float = DEFAULT_SEED_SCALE,
    criterion: GrowthCriterion = GrowthCriterion(),
    config: IntegratorConfig = IntegratorConfig(),
) -> InstabilityOutcome:
    """Integrate a torsionally-seeded vertical mode and test for growth.

    Initial data: Y(0) = amplitude * e_k, Z(0) = amplitude * seed_scale on
    every torsional component, all velocities zero.
    """
    if not (amplitude > 0):
        raise ValueError("amplitude must be positive")
    if not (1 <= k <= spec.modes):
        raise ValueError(f"mode index k={k} out of range 1..{spec.modes}")
    system = build_system(spec)
    initial = _initial_state(spec, k, amplitude, seed_scale)
    traj = integrate(system, initial, criterion.horizon, config)
    if traj.status is TrajectoryStatus.STEP_UNDERFLOW:
        raise RuntimeError("integration failed before the horizon (step underflow)")
    trigger = criterion.ratio * amplitude * seed_scale
    exceeded = np.abs(traj.z).max(axis=1) > trigger
    if exceeded.any():
        onset = float(traj.times[int(np.argmax(exceeded))])
        return InstabilityOutcome(True, onset, traj)
    return InstabilityOutcome(False, None, traj)


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of an amplitude bisection for the onset of torsional growth."""

    k: int
    m: int
    amplitude_lo: float
    amplitude_hi: float
    critical_energy: float
    onset_time: Optional[float]
    runs: tuple[tuple[float, bool], ...] = field(repr=False)

    @property
    def amplitude(self) -> float:
        return 0.5 * (self.amplitude_lo + self.amplitude_hi)


def threshold_bisection(
    spec: ModelSpec,
    k: int,
    bracket: tuple[float, float],
    criterion: GrowthCriterion = GrowthCriterion(),
    tol: float = 0.005,
    seed_scale: float = DEFAULT_SEED_SCALE,
    config: IntegratorConfig = IntegratorConfig(),
) -> ThresholdResult:
    """Bisect the vertical amplitude between a stable and an unstable run.

    Assumes monotone verdicts near the bracket (use :func:`amplitude_scan`
    to document any resonance-tongue structure before trusting a bracket).
    Critical energy is reported for the midpoint amplitude at zero
    velocity.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError(f"bad bracket {bracket}")
    runs: list[tuple[float, bool]] = []

    def probe(amplitude: float) -> InstabilityOutcome:
        outcome = instability_run(spec, k, amplitude, seed_scale, criterion, config)
        runs.append((amplitude, outcome.unstable))
        return outcome

    lo_out = probe(lo)
    hi_out = probe(hi)
    if lo_out.unstable or not hi_out.unstable:
        raise BracketError(
            f"bracket does not straddle: lo={lo} unstable={lo_out.unstable}, "
            f"hi={hi} unstable={hi_out.unstable}"
        )
    onset = hi_out.onset_time
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        out = probe(mid)
        if out.unstable:
            hi, onset = mid, out.onset_time
        else:
            lo = mid
    return ThresholdResult(
        k=k,
        m=spec.modes,
        amplitude_lo=lo,
        amplitude_hi=hi,
        critical_energy=mode_energy(0.5 * (lo + hi), 0.0, k),
        onset_time=onset,
        runs=tuple(runs),
    )


def amplitude_scan(
    spec: ModelSpec,
    k: int,
    amplitudes: Sequence[float],
    criterion: GrowthCriterion = GrowthCriterion(),
    seed_scale: float = DEFAULT_SEED_SCALE,
    config: IntegratorConfig = IntegratorConfig(),
) -> list[tuple[float, bool, Optional[float]]]:
    """Verdict grid over amplitudes: (amplitude, unstable, onset_time) rows."""
    rows = []
    for amplitude in amplitudes:
        out = instability_run(spec, k, amplitude, seed_scale, criterion, config)
        rows.append((float(amplitude), out.unstable, out.onset_time))
    return rows


# ---------------------------------------------------------------------------
# Sign-change census (stiff-torsion single mode).
# ---------------------------------------------------------------------------


def _refined_root(t: np.ndarray, v: np.ndarray, i: int) -> float:
    """Root of v between samples i and i+1 via a local cubic through 4 points."""
    a = max(i - 1, 0)
    b = min(i + 3, len(t))
    coeffs = np.polynomial.polynomial.polyfit(t[a:b] - t[i], v[a:b], min(3, b - a - 1))
    roots = np.polynomial.polynomial.polyroots(coeffs)
    dt = t[i + 1] - t[i]
    real = [r.real for r in roots if abs(r.imag) < 1e-9 * dt and -0.5 * dt <= r.real <= 1.5 * dt]
    if real:
        return t[i] + min(real, key=lambda r: abs(r - 0.5 * dt))
    # fall back to the secant point
    return t[i] + dt * v[i] / (v[i] - v[i + 1])


@dataclass(frozen=True)
class CensusReport:
    """Zeros of z1 between consecutive critical points of y1, per run."""

    min_count: int
    interval_counts: tuple[tuple[int, ...], ...]
    total_intervals: int
    total_zeros: int


def sign_change_census(
    spec: ModelSpec,
    initial_states: Sequence[ModalState],
    horizon: float = 100.0,
    config: IntegratorConfig = IntegratorConfig(),
) -> CensusReport:
    """Count zeros of z1 inside every interval between critical points of y1.

    Requires the stiff-torsion single-mode system and nontrivial torsional
    data (with z = zdot = 0 the torsional component stays zero and the
    census is vacuous).  Critical points of y1 are located by cubic
    refinement of the sign changes of ydot1.
    """
    if spec.modes != 1 or spec.torsion_variant is not TorsionVariant.STIFF:
        raise ValueError("census applies to the stiff-torsion single-mode system")
    system = build_system(spec)
    all_counts: list[tuple[int, ...]] = []
    for state in initial_states:
        if np.max(np.abs(state.z)) + np.max(np.abs(state.zdot)) == 0.0:
            raise ValueError("initial state has identically zero torsion")
        traj = integrate(system, state, horizon, config)
        t = traj.times
        yd = traj.ydot[:, 0]
        z = traj.z[:, 0]
        flips = np.nonzero(np.sign(yd[:-1]) * np.sign(yd[1:]) < 0)[0]
        crit_times = [_refined_root(t, yd, int(i)) for i in flips]
        counts = []
        for t1, t2 in zip(crit_times[:-1], crit_times[1:]):
            inside = (t > t1) & (t < t2)
            zs = z[inside]
            counts.append(int(np.sum(np.sign(zs[:-1]) * np.sign(zs[1:]) < 0)))
        all_counts.append(tuple(counts))
    flat = [c for counts in all_counts for c in counts]
    return CensusReport(
        min_count=min(flat) if flat else 0,
        interval_counts=tuple(all_counts),
        total_intervals=len(flat),
        total_zeros=sum(flat),
    )


# ---------------------------------------------------------------------------
# Small-angle approximation error table.
# ---------------------------------------------------------------------------


class TrigErrorRow(NamedTuple):
    function: str  # "sin" or "cos"
    epsilon: float
    order: int
    relative_error: float


def _sin_poly(eps: float, n: int) -> float:
    return math.fsum(
        (-1) ** k * eps ** (2 * k + 1) / math.factorial(2 * k + 1) for k in range(n + 1)
    )


def _cos_poly(eps: float, n: int) -> float:
    return math.fsum(
        (-1) ** k * eps ** (2 * k) / math.factorial(2 * k) for k in range(n + 1)
    )


def trig_error_report(
    epsilons: Sequence[float] = (math.pi / 60, math.pi / 4),
    orders: Sequence[int] = (0, 1),
) -> list[TrigErrorRow]:
    """Relative error of the Taylor truncations of sin and cos.

    The default grid covers the harmless rotation angle (pi/60) and the
    largest observed one (pi/4) at truncation orders 0 and 1.
    """
    rows = []
    for eps in epsilons:
        for n in orders:
            rows.append(
                TrigErrorRow(
                    "sin", eps, n, abs((math.sin(eps) - _sin_poly(eps, n)) / math.sin(eps))
                )
            )
            rows.append(
                TrigErrorRow(
                    "cos", eps, n, abs((math.cos(eps) - _cos_poly(eps, n)) / math.cos(eps))
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Nonlinearity-strength scaling.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingReport:
    """Comparison of a gamma-system run against the rescaled unit-gamma run."""

    gamma: float
    energy_gamma: float
    energy_unit: float
    energy_identity_error: float  # |gamma * E_gamma - E_1| / E_1
    amplitude_gamma: float
    amplitude_unit: float
    amplitude_identity_error: float  # |sqrt(gamma) * ||y_gamma|| - ||y_1|||


def scaling_experiment(
    gamma: float,
    initial: ModalState,
    horizon: float = 100.0,
    variant: TorsionVariant = TorsionVariant.STANDARD,
    config: IntegratorConfig = IntegratorConfig(),
) -> ScalingReport:
    """Run the gamma-system and the rescaled unit-gamma system side by side.

    Checks the two exact identities gamma * E_gamma = E_1 and
    sqrt(gamma) * sup|y_gamma| = sup|y_1| over the horizon.
    """
    if not (gamma > 0):
        raise ValueError("gamma must be positive")
    m = initial.modes
    if not np.any(np.abs(initial.y) + np.abs(initial.ydot)):
        raise ValueError("initial state must have nonzero vertical data")
    spec_g = ModelSpec(gamma=gamma, modes=m, torsion_variant=variant)
    spec_1 = ModelSpec(gamma=1.0, modes=m, torsion_variant=variant)
    traj_g = integrate(build_system(spec_g), initial, horizon, config)
    traj_1 = integrate(build_system(spec_1), rescale_gamma(initial, gamma), horizon, config)
    e_g = float(total_energy(initial, spec_g).total)
    e_1 = float(total_energy(rescale_gamma(initial, gamma), spec_1).total)
    amp_g = float(np.max(np.abs(traj_g.y)))
    amp_1 = float(np.max(np.abs(traj_1.y)))
    return ScalingReport(
        gamma=gamma,
        energy_gamma=e_g,
        energy_unit=e_1,
        energy_identity_error=abs(gamma * e_g - e_1) / e_1,
        amplitude_gamma=amp_g,
        amplitude_unit=amp_1,
        amplitude_identity_error=abs(math.sqrt(gamma) * amp_g - amp_1),
    )
