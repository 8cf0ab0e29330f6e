"""Experiment-layer tests: growth-criterion plumbing, bracket handling,
sign-change census, scaling identities, and the approximation-error table.
The full-horizon threshold reproductions live in the acceptance suite."""

import math

import numpy as np
import pytest

from fishbone.experiments import (
    BracketError,
    GrowthCriterion,
    amplitude_scan,
    instability_run,
    scaling_experiment,
    sign_change_census,
    threshold_bisection,
    trig_error_report,
)
from fishbone.integrator import IntegratorConfig
from fishbone.model import ModalState, ModelSpec, TorsionVariant

RNG = np.random.default_rng(3)

SPEC1 = ModelSpec(gamma=1.0, modes=1)
FAST = IntegratorConfig(sample_interval=0.02)


def two_significant(x: float) -> float:
    return float(f"{x:.1e}")


class TestInstabilityRun:
    def test_initial_data_layout(self):
        out = instability_run(
            SPEC1, 1, 0.5, criterion=GrowthCriterion(horizon=1.0), config=FAST
        )
        state = out.trajectory.state_at(0)
        assert state.y[0] == 0.5
        assert state.z[0] == pytest.approx(0.5e-4)
        assert np.all(state.ydot == 0.0) and np.all(state.zdot == 0.0)

    def test_strong_forcing_fires_early(self):
        out = instability_run(
            SPEC1, 1, 1.7, criterion=GrowthCriterion(horizon=40.0), config=FAST
        )
        assert out.unstable
        assert out.onset_time < 30.0

    def test_low_amplitude_is_quiet(self):
        out = instability_run(
            SPEC1, 1, 0.5, criterion=GrowthCriterion(horizon=40.0), config=FAST
        )
        assert not out.unstable and out.onset_time is None

    def test_validation(self):
        with pytest.raises(ValueError):
            instability_run(SPEC1, 1, -1.0)
        with pytest.raises(ValueError):
            instability_run(SPEC1, 2, 1.0)


class TestThresholdBisection:
    def test_rejects_non_straddling_bracket(self):
        criterion = GrowthCriterion(horizon=20.0)
        with pytest.raises(BracketError) as err:
            threshold_bisection(SPEC1, 1, (0.2, 0.4), criterion, tol=0.1, config=FAST)
        assert "unstable=False" in str(err.value)

    def test_short_horizon_bracket(self):
        # at horizon 40 the flip sits between 1.5 and 1.8; the bisected
        # bracket must stay inside and keep the verdict order
        criterion = GrowthCriterion(horizon=40.0)
        result = threshold_bisection(SPEC1, 1, (1.2, 1.9), criterion, tol=0.05, config=FAST)
        assert 1.2 < result.amplitude_lo < result.amplitude_hi < 1.9
        assert result.amplitude_hi - result.amplitude_lo <= 0.05
        verdicts = dict(result.runs)
        assert verdicts[1.2] is False and verdicts[1.9] is True
        assert result.onset_time is not None
        expected_e = 1.5 * result.amplitude**2 + 0.375 * result.amplitude**4
        assert result.critical_energy == pytest.approx(expected_e, rel=1e-12)

    def test_amplitude_scan_orders(self):
        criterion = GrowthCriterion(horizon=40.0)
        rows = amplitude_scan(SPEC1, 1, [0.5, 1.9], criterion, config=FAST)
        assert rows[0][1] is False and rows[1][1] is True


class TestSignChangeCensus:
    @staticmethod
    def stiff_spec():
        return ModelSpec(gamma=1.0, modes=1, torsion_variant=TorsionVariant.STIFF)

    def test_every_interval_has_a_zero(self):
        states = [
            ModalState(0.0, *(RNG.uniform(-1.0, 1.0, (4, 1)))) for _ in range(5)
        ]
        report = sign_change_census(self.stiff_spec(), states, horizon=50.0, config=FAST)
        assert report.min_count >= 1
        assert report.total_intervals > 50

    def test_rejects_standard_variant(self):
        with pytest.raises(ValueError):
            sign_change_census(SPEC1, [ModalState(0.0, [1.0], [0], [0.1], [0])])

    def test_rejects_torsion_free_data(self):
        with pytest.raises(ValueError):
            sign_change_census(
                self.stiff_spec(), [ModalState(0.0, [1.0], [0.0], [0.0], [0.0])]
            )

    def test_zero_frequency_ordering(self):
        # corollary of the census: z1 has at least as many zeros as y1 has
        # monotonicity intervals
        state = ModalState(0.0, [0.9], [0.2], [0.3], [-0.1])
        report = sign_change_census(self.stiff_spec(), [state], horizon=100.0, config=FAST)
        assert report.total_zeros >= report.total_intervals


class TestTrigErrors:
    def test_all_eight_values(self):
        expected = {
            ("sin", 0, "small"): 4.6e-4,
            ("sin", 1, "small"): 6.3e-8,
            ("sin", 0, "large"): 0.11,
            ("sin", 1, "large"): 3.5e-3,
            ("cos", 0, "small"): 1.4e-3,
            ("cos", 1, "small"): 3.1e-7,
            ("cos", 0, "large"): 0.41,
            ("cos", 1, "large"): 2.2e-2,
        }
        rows = trig_error_report()
        assert len(rows) == 8
        for row in rows:
            size = "small" if row.epsilon < 0.1 else "large"
            assert two_significant(row.relative_error) == expected[(row.function, row.order, size)]


class TestScaling:
    def test_unit_gamma_is_identity(self):
        state = ModalState(0.0, [0.7], [0.0], [7e-5], [0.0])
        report = scaling_experiment(1.0, state, horizon=10.0, config=FAST)
        assert report.energy_identity_error < 1e-12
        assert report.amplitude_identity_error < 1e-9

    @pytest.mark.parametrize("gamma", [0.25, 4.0])
    def test_scaling_identities(self, gamma):
        state = ModalState(0.0, [0.8], [0.1], [8e-5], [0.0])
        report = scaling_experiment(gamma, state, horizon=20.0, config=FAST)
        assert report.energy_identity_error < 1e-8
        assert report.amplitude_identity_error < 1e-6
        # E_gamma = E_1 / gamma
        assert report.energy_gamma == pytest.approx(report.energy_unit / gamma, rel=1e-10)

    def test_rejects_trivial_vertical_data(self):
        with pytest.raises(ValueError):
            scaling_experiment(2.0, ModalState(0.0, [0.0], [0.0], [0.1], [0.0]))
