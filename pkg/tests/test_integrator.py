"""Integration contract tests: equilibrium, periodic closure, energy-drift
budget enforcement, time reversal, tolerance convergence, and failure
statuses."""

import math

import numpy as np
import pytest

from fishbone.galerkin import build_system
from fishbone.hill import mode_energy, period
from fishbone.integrator import (
    IntegratorConfig,
    Trajectory,
    TrajectoryStatus,
    integrate,
    max_component_amplitude,
)
from fishbone.model import ModalState, ModelSpec, total_energy

RNG = np.random.default_rng(7)

SPEC1 = ModelSpec(gamma=1.0, modes=1)
SYS1 = build_system(SPEC1)


def random_state(m, max_energy=10.0):
    spec = ModelSpec(gamma=1.0, modes=m)
    while True:
        state = ModalState(0.0, *(RNG.uniform(-0.8, 0.8, (4, m))))
        if 0.05 < total_energy(state, spec).total <= max_energy:
            return state


class TestBasics:
    def test_zero_state_stays_zero(self):
        traj = integrate(SYS1, ModalState.zero(1), 5.0, IntegratorConfig(sample_interval=0.1))
        assert traj.status is TrajectoryStatus.COMPLETED
        assert np.all(traj.y == 0.0) and np.all(traj.zdot == 0.0)
        assert np.all(traj.energy_total == 0.0)

    def test_requires_forward_time(self):
        with pytest.raises(ValueError):
            integrate(SYS1, ModalState.zero(1), 0.0)

    def test_sample_times_strictly_increasing(self):
        traj = integrate(SYS1, random_state(1), 3.0, IntegratorConfig(sample_interval=0.05))
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[0] == 0.0 and traj.times[-1] == 3.0

    def test_samples_carry_energy(self):
        traj = integrate(SYS1, random_state(1), 1.0, IntegratorConfig(sample_interval=0.25))
        for state, breakdown in traj.samples:
            recomputed = total_energy(state, SPEC1)
            assert breakdown.total == pytest.approx(recomputed.total, rel=1e-12)

    def test_vertical_mode_period_closure(self):
        alpha = 1.0
        energy = mode_energy(alpha, 0.0, 1)
        assert energy == pytest.approx(15.0 / 8.0, rel=1e-15)
        T = period(energy, 1)
        state = ModalState(0.0, [alpha], [0.0], [0.0], [0.0])
        traj = integrate(SYS1, state, T, IntegratorConfig(sample_interval=T / 500))
        closure = math.hypot(traj.y[-1, 0] - alpha, traj.ydot[-1, 0])
        assert closure < 1e-6


class TestEnergyContract:
    @pytest.mark.parametrize("m", [1, 2])
    def test_drift_within_budget_long_run(self, m):
        system = build_system(ModelSpec(gamma=1.0, modes=m))
        config = IntegratorConfig(sample_interval=0.05)
        for _ in range(3):
            traj = integrate(system, random_state(m), 200.0, config)
            assert traj.status is TrajectoryStatus.COMPLETED
            assert traj.energy_drift.max() < 1e-8

    def test_budget_violation_flags_run(self):
        # a loose tolerance cannot hold a 1e-12 drift budget over a long run
        config = IntegratorConfig(
            rel_tol=1e-5, abs_tol=1e-8, energy_drift_budget=1e-12, sample_interval=0.1
        )
        traj = integrate(SYS1, random_state(1), 50.0, config)
        assert traj.status is TrajectoryStatus.ENERGY_BUDGET_EXCEEDED
        assert traj.times[-1] < 50.0

    def test_completed_certifies_drift(self):
        config = IntegratorConfig(sample_interval=0.02)
        traj = integrate(SYS1, random_state(1), 20.0, config)
        assert traj.status is TrajectoryStatus.COMPLETED
        assert traj.energy_drift.max() <= config.energy_drift_budget


class TestReversalAndConvergence:
    def test_time_reversal(self):
        state = random_state(2)
        system = build_system(ModelSpec(gamma=1.0, modes=2))
        config = IntegratorConfig(sample_interval=0.5)
        fwd = integrate(system, state, 30.0, config)
        turned = ModalState(
            0.0, fwd.y[-1], -fwd.ydot[-1], fwd.z[-1], -fwd.zdot[-1]
        )
        back = integrate(system, turned, 30.0, config)
        recovered = np.concatenate([back.y[-1], -back.ydot[-1], back.z[-1], -back.zdot[-1]])
        original = np.concatenate([state.y, state.ydot, state.z, state.zdot])
        assert np.max(np.abs(recovered - original)) < 1e-6

    def test_tolerance_convergence(self):
        state = random_state(1)
        reference = integrate(
            SYS1, state, 20.0,
            IntegratorConfig(rel_tol=1e-13, abs_tol=1e-14, sample_interval=1.0,
                             energy_drift_budget=1e-5),
        )
        ref = np.concatenate([reference.y[-1], reference.ydot[-1]])

        def final_error(rtol):
            traj = integrate(
                SYS1, state, 20.0,
                IntegratorConfig(rel_tol=rtol, abs_tol=rtol * 1e-2, sample_interval=1.0,
                                 energy_drift_budget=1.0),
            )
            return np.max(np.abs(np.concatenate([traj.y[-1], traj.ydot[-1]]) - ref))

        errors = [final_error(rtol) for rtol in (1e-5, 1e-7, 1e-9)]
        assert errors[1] < errors[0] and errors[2] < errors[1]
        # two decades of tolerance should buy at least one decade of accuracy
        assert errors[2] < errors[0] / 10


class TestFailures:
    def test_step_underflow_status(self):
        config = IntegratorConfig(
            rel_tol=1e-12, abs_tol=1e-14, min_step=0.5, max_step=1.0, sample_interval=0.5
        )
        traj = integrate(SYS1, random_state(1), 10.0, config)
        assert traj.status is TrajectoryStatus.STEP_UNDERFLOW

    def test_min_step_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(min_step=2.0, max_step=1.0)


class TestAmplitude:
    def test_zero_trajectory(self):
        traj = integrate(SYS1, ModalState.zero(1), 1.0, IntegratorConfig(sample_interval=0.5))
        assert max_component_amplitude(traj, "y1") == 0.0

    def test_single_sample(self):
        parts = {k: np.zeros(1) for k in (
            "kinetic_y", "kinetic_z", "bending", "torsion_elastic",
            "quadratic_potential", "quartic_potential", "coupling_potential", "total",
        )}
        traj = Trajectory(
            spec=SPEC1,
            times=np.array([0.0]),
            y=np.array([[-2.0]]),
            ydot=np.zeros((1, 1)),
            z=np.zeros((1, 1)),
            zdot=np.zeros((1, 1)),
            status=TrajectoryStatus.COMPLETED,
            energy_parts=parts,
        )
        assert max_component_amplitude(traj, "y1") == 2.0
        assert max_component_amplitude(traj, ("y", 1)) == 2.0

    def test_empty_trajectory_rejected(self):
        parts = {k: np.zeros(0) for k in (
            "kinetic_y", "kinetic_z", "bending", "torsion_elastic",
            "quadratic_potential", "quartic_potential", "coupling_potential", "total",
        )}
        traj = Trajectory(
            spec=SPEC1,
            times=np.zeros(0),
            y=np.zeros((0, 1)),
            ydot=np.zeros((0, 1)),
            z=np.zeros((0, 1)),
            zdot=np.zeros((0, 1)),
            status=TrajectoryStatus.COMPLETED,
            energy_parts=parts,
        )
        with pytest.raises(ValueError):
            max_component_amplitude(traj, "y1")

    def test_bad_selector(self):
        traj = integrate(SYS1, ModalState.zero(1), 1.0, IntegratorConfig(sample_interval=0.5))
        with pytest.raises(ValueError):
            max_component_amplitude(traj, "y2")
        with pytest.raises(ValueError):
            max_component_amplitude(traj, "w1")
