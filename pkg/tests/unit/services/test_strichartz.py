import math

import pytest

from app.core.exceptions import AdmissibilityError
from app.models import GridSpec, StateVector, TorusField
from app.schemas import SchemeConfig
from app.services.integrators import StateCollector, evolve
from app.services.spectral import lebesgue_norm, project
from app.services.strichartz import StrichartzAccumulator, check_admissible, strichartz_norm


@pytest.mark.unit
@pytest.mark.service
class TestAdmissibility:
    """Test check_admissible"""

    @pytest.mark.parametrize("p,q", [(6.0, 9.0), (math.inf, 6.0), (4.0, 12.0)])
    def test_admissible_in_3d(self, p, q):
        check_admissible(p, q)

    @pytest.mark.parametrize("p,q", [(2.0, math.inf), (2.0, 6.0), (4.0, 4.0), (6.0, 2.0), (3.0, 5.0)])
    def test_not_admissible_in_3d(self, p, q):
        with pytest.raises(AdmissibilityError):
            check_admissible(p, q)

    def test_other_dimension_and_loss(self):
        """(inf, 2) is the energy pair in one dimension without loss"""
        check_admissible(math.inf, 2.0, d=1, gamma=0.0)
        with pytest.raises(AdmissibilityError):
            check_admissible(math.inf, 2.0, d=1, gamma=1.0)


@pytest.mark.unit
@pytest.mark.service
class TestStrichartzNorm:
    """Test strichartz_norm and StrichartzAccumulator"""

    def test_constant_trajectory(self):
        grid = GridSpec(d=3, K=2)
        f = TorusField.constant(grid, 2.0)
        value = strichartz_norm([f] * 5, 0.25, 6.0, 9.0, cutoff=2)
        expected = (0.25 * 5) ** (1 / 6) * 2.0 * (2.0 * math.pi) ** (3 / 9)

        assert value == pytest.approx(expected, rel=1e-12)

    def test_constant_trajectory_on_unit_box(self):
        grid = GridSpec(d=3, K=2)
        f = TorusField.constant(grid, 2.0)
        value = strichartz_norm([f] * 5, 0.25, 6.0, 9.0, cutoff=2, length_scale=2.0 * math.pi)
        accumulator = StrichartzAccumulator(0.25, 6.0, 9.0, cutoff=2, length_scale=2.0 * math.pi)
        for n in range(5):
            accumulator(n, n * 0.25, StateVector(u=f, v=TorusField.zeros(grid)))

        assert value == pytest.approx((0.25 * 5) ** (1 / 6) * 2.0, rel=1e-12)
        assert accumulator.value == pytest.approx(value, rel=1e-12)

    def test_infinite_time_exponent_is_max(self):
        grid = GridSpec(d=3, K=1)
        trajectory = [TorusField.constant(grid, c) for c in (1.0, -3.0, 2.0)]
        value = strichartz_norm(trajectory, 0.5, math.inf, 6.0, cutoff=1)

        assert value == pytest.approx(3.0 * (2.0 * math.pi) ** 0.5, rel=1e-12)

    def test_uses_filtered_position(self, make_state):
        U = make_state(3, 4)
        value = strichartz_norm([U], 1.0, 6.0, 9.0, cutoff=2)

        assert value == pytest.approx(lebesgue_norm(project(U.u, 2), 9.0) ** 1.0, rel=1e-12)

    def test_empty_trajectory(self):
        assert strichartz_norm([], 0.1, 6.0, 9.0, cutoff=4) == 0.0

    def test_checks_pair(self, make_field):
        with pytest.raises(AdmissibilityError):
            strichartz_norm([make_field(3, 2)], 0.1, 4.0, 4.0, cutoff=2)

    def test_dimension_from_data(self, make_field):
        """In d = 1 with loss 1 the pair (6, 9) is not admissible"""
        with pytest.raises(AdmissibilityError):
            strichartz_norm([make_field(1, 4)], 0.1, 6.0, 9.0, cutoff=2)

    def test_accumulator_matches_stored_trajectory(self, make_state, cubic):
        cfg = SchemeConfig(tau=0.125, T=0.5, K=4)
        accumulator = StrichartzAccumulator(0.125, 6.0, 9.0, cutoff=3)
        collector = StateCollector()
        result = evolve(make_state(3, 4), cubic, cfg, observers=[accumulator, collector])
        trajectory = [U for _, _, U in collector.states]

        assert accumulator.count == 5
        assert accumulator.value == pytest.approx(strichartz_norm(trajectory, 0.125, 6.0, 9.0, cutoff=3), rel=1e-12)
        assert result.records["strichartz_6_9"] == accumulator.value

    def test_accumulator_max(self, make_state):
        U = make_state(3, 2)
        accumulator = StrichartzAccumulator(0.5, math.inf, 6.0, cutoff=2)
        accumulator(0, 0.0, U)
        accumulator(1, 0.5, U * 2.0)

        assert accumulator.value == pytest.approx(lebesgue_norm(U.u, 6.0) * 2.0, rel=1e-12)

    def test_accumulator_empty(self):
        assert StrichartzAccumulator(0.1, 6.0, 9.0, cutoff=2).value == 0.0

    def test_accumulator_rejects_pair(self):
        with pytest.raises(AdmissibilityError):
            StrichartzAccumulator(0.1, 2.0, math.inf, cutoff=2)
