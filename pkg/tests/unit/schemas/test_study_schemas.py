import math

import pytest
from pydantic import ValidationError

from app.schemas import ConvergenceReport, FitRequest, ProblemConfig, ReportRow, StudyConfig


def make_row(K: int, tau: float, err: float = 1e-3, flag: str = "ok") -> ReportRow:
    return ReportRow(alpha=3, mu=1, d=3, K=K, tau=tau, err_l2_hm1=err, err_h1_l2=err,
                     steps=4, walltime_s=0.01, flag=flag)


@pytest.mark.unit
@pytest.mark.schema
class TestStudyConfig:
    """Test StudyConfig schema"""

    def test_valid_config(self):
        cfg = StudyConfig(K_list=[16, 8, 16], tau_list=[0.125, 0.0625], tau_ref=2.0 ** -10)

        assert cfg.K_list == [8, 16]
        assert cfg.ratio(0.125) == 128
        assert cfg.reference_steps == 256

    def test_preset_step_is_multiple(self):
        """411 * 2^-12 is accepted with tau_ref = 2^-12"""
        cfg = StudyConfig(K_list=[8], tau_list=[0.100341796875], tau_ref=2.0 ** -12)

        assert cfg.ratio(0.100341796875) == 411

    def test_step_not_multiple_of_reference(self):
        with pytest.raises(ValidationError) as exc_info:
            StudyConfig(K_list=[8], tau_list=[0.1], tau_ref=2.0 ** -10)

        assert "multiple" in str(exc_info.value)

    def test_horizon_not_multiple_of_reference(self):
        with pytest.raises(ValidationError):
            StudyConfig(K_list=[8], tau_list=[0.125], tau_ref=0.125, T=0.3)

    def test_horizon_need_not_be_multiple_of_coarse_step(self):
        """Coarse runs compare at the times n*tau <= T only"""
        cfg = StudyConfig(K_list=[8], tau_list=[0.1875], tau_ref=2.0 ** -6, T=0.25)

        assert cfg.ratio(0.1875) == 12

    def test_step_longer_than_horizon(self):
        with pytest.raises(ValidationError):
            StudyConfig(K_list=[8], tau_list=[0.5], tau_ref=2.0 ** -6, T=0.25)

    def test_duplicate_steps(self):
        with pytest.raises(ValidationError):
            StudyConfig(K_list=[8], tau_list=[0.125, 0.125], tau_ref=2.0 ** -6)

    def test_fit_window(self):
        with pytest.raises(ValidationError):
            StudyConfig(K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6, fit_window=1)

    def test_empty_lists(self):
        with pytest.raises(ValidationError):
            StudyConfig(K_list=[], tau_list=[0.125])

    def test_default_strichartz_pairs(self):
        cfg3 = StudyConfig(K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6)
        cfg1 = StudyConfig(problem=ProblemConfig(d=1), K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6)

        assert cfg3.pairs == [(6.0, 9.0)]
        assert cfg1.pairs == []

    def test_scheme_for(self):
        cfg = StudyConfig(K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6, scheme="lie", dealias=True)
        scheme = cfg.scheme_for(8, 0.125)

        assert (scheme.tau, scheme.K, scheme.scheme, scheme.dealias) == (0.125, 8, "lie", True)

    def test_unit_box_step_limit(self):
        """A step on [0, 1]^d stretched by 2*pi must stay within one time unit"""
        unit = ProblemConfig(box="unit")
        with pytest.raises(ValidationError) as exc_info:
            StudyConfig(problem=unit, K_list=[8], tau_list=[0.25], tau_ref=2.0 ** -6, T=0.5)

        assert "unit box" in str(exc_info.value)
        StudyConfig(problem=unit, K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6, T=0.5)

    def test_unit_box_scheme_for(self):
        cfg = StudyConfig(problem=ProblemConfig(box="unit"), K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6)
        scheme = cfg.scheme_for(8, 0.125)

        assert scheme.tau == pytest.approx(2.0 * math.pi / 8, rel=1e-15)
        assert scheme.T == pytest.approx(2.0 * math.pi / 4, rel=1e-15)
        assert scheme.cutoff == 8.0
        assert scheme.steps_for() == 2

    def test_unit_box_keeps_explicit_cutoff(self):
        cfg = StudyConfig(
            problem=ProblemConfig(box="unit"), K_list=[8], tau_list=[0.125], tau_ref=2.0 ** -6, filter_cutoff=3.0
        )

        assert cfg.scheme_for(8, 0.125).cutoff == 3.0


@pytest.mark.unit
@pytest.mark.schema
class TestConvergenceReport:
    """Test ReportRow and ConvergenceReport schemas"""

    def test_rows_sorted(self):
        report = ConvergenceReport(rows=[make_row(16, 0.125), make_row(8, 0.0625), make_row(8, 0.125)])

        assert [(row.K, row.tau) for row in report.rows] == [(8, 0.125), (8, 0.0625), (16, 0.125)]

    def test_negative_error(self):
        with pytest.raises(ValidationError):
            make_row(8, 0.125, err=-1.0)

    def test_blowup_row(self):
        row = ReportRow(alpha=2, mu=-1, d=3, K=8, tau=0.5, steps=3, walltime_s=0.1, flag="blowup", blowup_step=3)

        assert row.usable is False
        assert row.error("l2_hm1") is None

    def test_order_lookup(self):
        report = ConvergenceReport(orders=[{"K": 8, "norm": "l2_hm1", "order": 2.0, "window": 8}])

        assert report.order(8, "l2_hm1") == 2.0
        assert report.order(8, "h1_l2") is None

    def test_fit_request_window(self):
        with pytest.raises(ValidationError):
            FitRequest(rows=[make_row(8, 0.125)], window=1)
