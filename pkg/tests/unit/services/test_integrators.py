import logging
import math

import numpy as np
import pytest

from app.core.exceptions import BlowUpError, ConfigurationError, PreconditionError
from app.models import PRODUCT_H1_L2, PRODUCT_L2_HM1, GridSpec, NormKind, StateVector, TorusField
from app.schemas import InitialDataSpec, ProblemConfig, SchemeConfig
from app.services.integrators import (
    STEPPERS,
    EnergyObserver,
    NormObserver,
    StateCollector,
    energy,
    evolve,
    g_eval,
    high_freq_shortcut,
    lie_step,
    linear_only,
    shortcut_band,
    strang_step,
    to_grid,
)
from app.services.initial_data import make_initial_state
from app.services.propagator import WaveGroup, apply_filter, apply_group
from app.services.spectral import max_imaginary_part, product_norm

SCALE_1D = math.sqrt(2.0 * math.pi)


def constant_state(u: float, v: float, d: int = 1, K: int = 1) -> StateVector:
    grid = GridSpec(d=d, K=K)
    return StateVector(u=TorusField.constant(grid, u), v=TorusField.constant(grid, v))


def mean_values(U: StateVector):
    return U.u.mode((0,)).real / SCALE_1D, U.v.mode((0,)).real / SCALE_1D


@pytest.mark.unit
@pytest.mark.service
class TestSteps:
    """Test the Strang and Lie steps"""

    def test_strang_hand_example(self, cubic_1d, half_step_scheme):
        """(1, 0) with tau = 1/2: kick to v = -1/4, drift to u = 7/8, kick again"""
        u, v = mean_values(strang_step(constant_state(1.0, 0.0), cubic_1d, half_step_scheme))

        assert u == pytest.approx(0.875, abs=1e-14)
        assert v == pytest.approx(-0.41748046875, abs=1e-14)

    def test_lie_hand_example(self, cubic_1d):
        cfg = SchemeConfig(tau=0.5, T=0.5, K=1, scheme="lie")
        u, v = mean_values(lie_step(constant_state(1.0, 0.0), cubic_1d, cfg))

        assert u == pytest.approx(0.75, abs=1e-14)
        assert v == pytest.approx(-0.5, abs=1e-14)

    def test_focusing_sign(self, half_step_scheme):
        p = ProblemConfig(alpha=3, mu=-1, d=1)
        _, v = mean_values(strang_step(constant_state(1.0, 0.0), p, half_step_scheme))

        assert v > 0.0

    def test_g_eval(self, cubic_1d, half_step_scheme):
        g = g_eval(constant_state(2.0, 0.0).u, cubic_1d, half_step_scheme)

        assert g.mode((0,)).real / SCALE_1D == pytest.approx(-8.0, abs=1e-13)

    def test_g_eval_filters_before_the_power(self, cubic_1d):
        """A mode above the cutoff does not enter the nonlinearity"""
        grid = GridSpec(d=1, K=4)
        u = TorusField.from_modes(grid, {(3,): 1.0, (-3,): 1.0}, real_flag=True)
        cfg = SchemeConfig(tau=0.5, T=0.5, K=4)

        assert not np.any(g_eval(u, cubic_1d, cfg).coeff)

    @pytest.mark.parametrize("scheme", ["strang", "lie"])
    def test_linear_only_reduces_to_group(self, make_state, cubic, scheme):
        U = make_state(3, 4)
        cfg = SchemeConfig(tau=0.25, T=0.25, K=4, scheme=scheme)
        with linear_only():
            out = STEPPERS[scheme](U, cubic, cfg)

        assert np.allclose(out.stacked(), apply_group(U, 0.25).stacked(), atol=1e-14)

    def test_linear_only_is_scoped(self, cubic_1d, half_step_scheme):
        with linear_only():
            pass
        _, v = mean_values(strang_step(constant_state(1.0, 0.0), cubic_1d, half_step_scheme))

        assert v != 0.0

    def test_blow_up_reports_step(self):
        p = ProblemConfig(alpha=5, mu=-1, d=1)
        cfg = SchemeConfig(tau=1.0, T=1.0, K=1)
        with pytest.raises(BlowUpError) as exc_info:
            strang_step(constant_state(1e100, 0.0), p, cfg, step=7)

        assert exc_info.value.step == 7
        assert exc_info.value.exit_code == 2

    def test_steps_keep_realness(self, make_state, cubic):
        U = make_state(3, 4)
        cfg = SchemeConfig(tau=0.125, T=0.125, K=4)
        out = strang_step(U, cubic, cfg)

        assert max(max_imaginary_part(out.u), max_imaginary_part(out.v)) <= 1e-12

    def test_unit_box_hand_example(self):
        """(1, 0) on the unit box with tau = 1/8, run in stretched time"""
        p = ProblemConfig(alpha=3, mu=1, d=1, box="unit")
        scale = p.length_scale
        cfg = SchemeConfig(tau=scale / 8, T=scale / 8, K=1, filter_cutoff=8)
        u, w = mean_values(strang_step(constant_state(1.0, 0.0), p, cfg))

        assert u == pytest.approx(0.9921875, abs=1e-14)
        assert scale * w == pytest.approx(-(1.0 + u ** 3) / 16, abs=1e-14)

    @pytest.mark.parametrize("scheme", ["strang", "lie"])
    def test_step_with_group_matches(self, make_state, cubic, scheme):
        U = make_state(3, 4)
        cfg = SchemeConfig(tau=0.125, T=0.125, K=4, scheme=scheme)
        group = WaveGroup(U.grid, cfg.tau)

        assert np.array_equal(
            STEPPERS[scheme](U, cubic, cfg, group=group).stacked(),
            STEPPERS[scheme](U, cubic, cfg).stacked(),
        )


@pytest.mark.unit
@pytest.mark.service
class TestStrangAccuracy:
    """Test the local accuracy of one filtered Strang step"""

    def test_local_error_is_third_order(self, make_state, cubic_1d):
        """One step against a 2^-14 reference, tau = 2^-4 .. 2^-9"""
        U0 = make_state(1, 8, decay=3.0)
        ratios = []
        for j in range(4, 10):
            tau = 2.0 ** -j
            one = strang_step(U0, cubic_1d, SchemeConfig(tau=tau, T=tau, K=8))
            exact = evolve(U0, cubic_1d, SchemeConfig(tau=2.0 ** -14, T=tau, K=8)).state
            ratios.append(product_norm(one - exact, PRODUCT_L2_HM1) / tau ** 3)

        assert min(ratios) > 0.0
        assert max(ratios) <= 2.5 * min(ratios)

    def test_step_doubling_ratio(self, make_state, cubic_1d):
        """One step against two half steps shrinks by about 8 when tau halves"""
        U0 = make_state(1, 8, decay=3.0)

        def defect(tau):
            one = strang_step(U0, cubic_1d, SchemeConfig(tau=tau, T=tau, K=8))
            two = evolve(U0, cubic_1d, SchemeConfig(tau=tau / 2, T=tau, K=8)).state
            return product_norm(one - two, PRODUCT_L2_HM1)

        assert 6.0 <= defect(2.0 ** -5) / defect(2.0 ** -6) <= 10.0

    def test_cutoff_above_degree_is_unfiltered(self, make_state, cubic):
        """Any cutoff >= K gives the same step"""
        U = make_state(3, 4)
        outs = [
            strang_step(U, cubic, SchemeConfig(tau=0.5, T=0.5, K=4, filter_cutoff=c)).stacked()
            for c in (4, 9, 1e9)
        ]

        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[0], outs[2])
        filtered = strang_step(U, cubic, SchemeConfig(tau=0.5, T=0.5, K=4)).stacked()
        assert not np.array_equal(outs[0], filtered)

    def test_second_kick_sees_drifted_position(self, make_state, cubic_1d):
        """The second kick leaves u alone, so G is the same before and after it"""
        U = make_state(1, 8)
        cfg = SchemeConfig(tau=0.125, T=0.125, K=8)
        half = apply_group(StateVector.trusted(U.u, U.v + g_eval(U.u, cubic_1d, cfg) * (cfg.tau / 2)), cfg.tau)
        out = strang_step(U, cubic_1d, cfg)

        assert np.array_equal(out.u.coeff, half.u.coeff)
        assert np.array_equal(g_eval(out.u, cubic_1d, cfg).coeff, g_eval(half.u, cubic_1d, cfg).coeff)


@pytest.mark.unit
@pytest.mark.service
class TestEnergy:
    """Test the discrete energy"""

    def test_constant_state(self, cubic_1d):
        """E = 2 pi * (v^2/2 + u^4/4) for constants"""
        E = energy(constant_state(2.0, 3.0), cubic_1d)

        assert E == pytest.approx(2.0 * math.pi * (4.5 + 4.0), rel=1e-13)

    def test_focusing_potential_is_negative(self):
        p = ProblemConfig(alpha=3, mu=-1, d=1)

        assert energy(constant_state(1.0, 0.0), p) < 0.0

    def test_single_mode_gradient_energy(self):
        grid = GridSpec(d=1, K=2)
        u = TorusField.from_modes(grid, {(2,): 0.5, (-2,): 0.5}, real_flag=True)
        U = StateVector(u=u, v=TorusField.zeros(grid))
        p = ProblemConfig(alpha=2, mu=1, d=1)

        # the integral of a pure cosine cubed vanishes
        assert energy(U, p) == pytest.approx(0.5 * 4 * 0.5, rel=1e-12)

    def test_strang_drift_is_small(self, make_state, cubic_1d):
        U0 = make_state(1, 8, decay=2.0) * 0.5
        cfg = SchemeConfig(tau=1 / 64, T=1.0, K=8)
        observer = EnergyObserver(cubic_1d)
        evolve(U0, cubic_1d, cfg, observers=[observer])

        assert len(observer.records) == 65
        assert observer.max_relative_drift() <= 1e-3

    @staticmethod
    def _default_data_drift(tau: float, dealias: bool) -> float:
        p = ProblemConfig(alpha=3, mu=1, d=3)
        U0 = make_initial_state(InitialDataSpec(), GridSpec(d=3, K=8))
        observer = EnergyObserver(p)
        evolve(U0, p, SchemeConfig(tau=tau, T=0.25, K=8, dealias=dealias), observers=[observer])
        return observer.max_relative_drift()

    def test_dealiased_drift_three_dimensions(self):
        """mu = 1, alpha = 3, K = 8, tau = 2^-8, T = 1/4 on the default data"""
        assert self._default_data_drift(2.0 ** -8, dealias=True) <= 1e-3

    def test_aliased_drift_does_not_shrink_with_tau(self):
        """Without dealiasing the drift is set by the aliasing error, not by tau"""
        coarse = self._default_data_drift(2.0 ** -6, dealias=False)
        fine = self._default_data_drift(2.0 ** -8, dealias=False)

        assert min(coarse, fine) > 5e-3
        assert 0.8 <= fine / coarse <= 1.25


@pytest.mark.unit
@pytest.mark.service
class TestShortcut:
    """Test the high-frequency shortcut"""

    def test_band(self, cubic_1d):
        assert shortcut_band(cubic_1d, SchemeConfig(tau=1 / 8, T=1.0, K=32)) == 24

    def test_band_with_explicit_cutoff(self, cubic_1d):
        cfg = SchemeConfig(tau=1 / 8, T=1.0, K=32, filter_cutoff=2.5)

        assert shortcut_band(cubic_1d, cfg) == 6

    def test_requires_high_band(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=1 / 8, T=1.0, K=24)
        with pytest.raises(PreconditionError):
            high_freq_shortcut(make_state(1, 24), 1, cubic_1d, cfg)

    def test_requires_nonnegative_steps(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=1 / 8, T=1.0, K=32)
        with pytest.raises(PreconditionError):
            high_freq_shortcut(make_state(1, 32), -1, cubic_1d, cfg)

    def test_zero_steps_is_high_band_of_data(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=1 / 8, T=1.0, K=32)
        U0 = make_state(1, 32)
        high = high_freq_shortcut(U0, 0, cubic_1d, cfg)

        assert np.allclose(high.stacked(), (U0 - apply_filter(U0, 24)).stacked(), atol=0)

    def test_matches_full_evolution(self, make_state, cubic_1d):
        """16 steps of tau = 1/8 with K = 32 > 24"""
        cfg = SchemeConfig(tau=1 / 8, T=2.0, K=32)
        U0 = make_state(1, 32, decay=1.5)
        final = evolve(U0, cubic_1d, cfg).state
        high = final - apply_filter(final, 24)
        shortcut = high_freq_shortcut(U0, 16, cubic_1d, cfg)

        scale = np.max(np.abs(high.stacked()))
        assert np.max(np.abs(high.stacked() - shortcut.stacked())) <= 1e-11 * scale

    def test_evolve_with_shortcut_matches(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=1 / 8, T=2.0, K=32)
        U0 = make_state(1, 32, decay=1.5)
        plain = evolve(U0, cubic_1d, cfg)
        fast = evolve(U0, cubic_1d, cfg.model_copy(update={"shortcut": True}))

        assert fast.shortcut_used is True
        assert plain.shortcut_used is False
        assert fast.state.grid == plain.state.grid
        scale = np.max(np.abs(plain.state.stacked()))
        assert np.max(np.abs(fast.state.stacked() - plain.state.stacked())) <= 1e-11 * scale

    def test_shortcut_ignored_without_high_band(self, make_state, cubic_1d, caplog):
        cfg = SchemeConfig(tau=1 / 8, T=0.25, K=8, shortcut=True)
        with caplog.at_level(logging.WARNING):
            result = evolve(make_state(1, 8), cubic_1d, cfg)

        assert result.shortcut_used is False
        assert "Shortcut ignored" in caplog.text


@pytest.mark.unit
@pytest.mark.service
class TestEvolve:
    """Test evolve and the observers"""

    def test_step_count(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=0.125, T=0.5, K=4)

        assert evolve(make_state(1, 4), cubic_1d, cfg).steps == 4

    def test_horizon_not_multiple(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=0.1, T=0.25, K=4)
        with pytest.raises(ConfigurationError):
            evolve(make_state(1, 4), cubic_1d, cfg)

    def test_projects_data_onto_grid(self, make_state, cubic_1d):
        cfg = SchemeConfig(tau=0.125, T=0.125, K=4)

        assert evolve(make_state(1, 12), cubic_1d, cfg).state.grid == GridSpec(d=1, K=4)

    def test_equals_repeated_steps(self, make_state, cubic):
        U0 = make_state(3, 3)
        cfg = SchemeConfig(tau=0.25, T=0.75, K=3)
        U = U0
        for n in range(1, 4):
            U = strang_step(U, cubic, cfg, n)

        assert np.array_equal(evolve(U0, cubic, cfg).state.stacked(), U.stacked())

    def test_observers_see_every_step(self, make_state, cubic_1d):
        collector = StateCollector()
        cfg = SchemeConfig(tau=0.125, T=0.5, K=4)
        result = evolve(make_state(1, 4), cubic_1d, cfg, observers=[collector])

        assert [n for n, _, _ in collector.states] == [0, 1, 2, 3, 4]
        assert [t for _, t, _ in collector.states] == [0.0, 0.125, 0.25, 0.375, 0.5]
        assert "states" in result.records

    def test_observers_at_selected_steps(self, make_state, cubic_1d):
        observer = NormObserver(PRODUCT_H1_L2)
        cfg = SchemeConfig(tau=0.125, T=0.5, K=4)
        result = evolve(make_state(1, 4), cubic_1d, cfg, observers=[observer], at=[0, 4])

        assert [n for n, _, _ in observer.records] == [0, 4]
        assert result.records["norm_H1xL2"] == observer.records

    def test_component_norm_observer(self):
        observer = NormObserver(NormKind.lebesgue(4.0), component="v")

        assert observer.name == "norm_v_L^4"

    def test_plain_callables(self, make_state, cubic_1d):
        seen = []
        cfg = SchemeConfig(tau=0.125, T=0.25, K=4)
        result = evolve(make_state(1, 4), cubic_1d, cfg, observers=[lambda n, t, U: seen.append(n)])

        assert seen == [0, 1, 2]
        assert result.records == {}

    def test_linear_evolution_is_exact(self, make_state, cubic):
        """With g switched off N steps equal e^{T A}"""
        U0 = make_state(3, 4)
        cfg = SchemeConfig(tau=0.125, T=1.0, K=4)
        with linear_only():
            out = evolve(U0, cubic, cfg).state

        assert np.allclose(out.stacked(), apply_group(U0, 1.0).stacked(), atol=1e-12)


@pytest.mark.unit
@pytest.mark.service
class TestToGrid:
    """Test to_grid"""

    def test_identity(self, make_state):
        U = make_state(2, 3)

        assert to_grid(U, 3) is U

    def test_truncate_and_pad(self, make_state):
        U = make_state(2, 5)
        small = to_grid(U, 2)
        back = to_grid(small, 5)

        assert small.grid.K == 2
        assert np.array_equal(back.stacked(), apply_filter(U, 2).stacked())
