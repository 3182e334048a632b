import math

import numpy as np
import pytest

from bioquake.core import DomainError, ErrorObservation, bioquake
from bioquake.planner import (
    CurveSpec,
    InfeasiblePlanError,
    PlanRequest,
    curve,
    curve_to_csv,
    format_min_error,
    min_reportable_error,
    normal_quantile,
    required_comparisons_approx,
    required_comparisons_exact,
    rule_constant,
)

from helpers import delta_rel_by_scan


def test_normal_quantile_accuracy():
    assert normal_quantile(0.975) == pytest.approx(1.959963985, abs=1e-8)
    assert normal_quantile(0.995) == pytest.approx(2.575829304, abs=1e-8)


class TestRuleConstant:
    def test_one_percent_rule(self):
        assert rule_constant(0.01, 0.05) == pytest.approx(3.83e4, rel=0.01)
        assert rule_constant(0.01, 0.05) == pytest.approx(38414.588, rel=1e-6)

    def test_six_percent_rule(self):
        assert rule_constant(0.061, 0.05) == pytest.approx(1e3, rel=0.04)

    def test_ten_percent_rule(self):
        # the published numerator 3.7e2 is a conservative rounding of ~384
        assert rule_constant(0.1, 0.05) == pytest.approx(3.7e2, rel=0.04)

    def test_domain(self):
        with pytest.raises(DomainError):
            rule_constant(0.0)
        with pytest.raises(DomainError):
            rule_constant(0.1, alpha=1.0)


class TestApprox:
    def test_six_percent_worked_example(self):
        n = required_comparisons_approx(PlanRequest(1e-3, 0.061, mode="approx"))
        assert n == pytest.approx(1e6, rel=0.04)

    def test_ten_percent_worked_example(self):
        n = required_comparisons_approx(PlanRequest(1e-3, 0.10, mode="approx"))
        assert n == pytest.approx(3.7e5, rel=0.04)

    def test_one_percent_worked_example(self):
        n = required_comparisons_approx(PlanRequest(1e-3, 0.01, mode="approx"))
        assert n == pytest.approx(3.83e7, rel=0.01)

    def test_scaling_law(self):
        # RC * ER / (1 - ER) stays within one comparison of z^2/delta^2
        c = rule_constant(0.061, 0.05)
        for er in (1e-4, 1e-3, 1e-2, 0.05, 0.2):
            n = required_comparisons_approx(PlanRequest(er, 0.061, mode="approx"))
            assert abs(n * er / (1 - er) - c) < 1.0

    def test_mode_enforced(self):
        with pytest.raises(DomainError):
            required_comparisons_approx(PlanRequest(1e-3, 0.061, mode="exact"))


class TestExact:
    def test_brute_force_smallest_at_half(self):
        # scan of N = 2..200 with the summation oracle gives 90 as the
        # smallest N with delta <= 0.2 at p = 0.5 (N = 100 achieves 0.20 too)
        smallest = None
        for n in range(2, 201):
            if delta_rel_by_scan(n, 0.5, 0.05) <= 0.2:
                smallest = n
                break
        assert smallest == 90
        result = required_comparisons_exact(PlanRequest(0.5, 0.20, alpha=0.05))
        assert result == smallest
        assert result <= 100

    def test_result_meets_target_and_predecessor_fails(self):
        req = PlanRequest(0.02, 0.1, alpha=0.05)
        n = required_comparisons_exact(req)
        assert bioquake(ErrorObservation(n, rate=0.02, alpha=0.05)).delta_rel <= 0.1
        assert bioquake(ErrorObservation(n - 1, rate=0.02, alpha=0.05)).delta_rel > 0.1

    def test_six_percent_worked_example(self):
        n = required_comparisons_exact(PlanRequest(1e-3, 0.061, alpha=0.05))
        assert n == pytest.approx(1e6, rel=0.10)

    def test_near_certain_error_rate(self):
        # delta_min = 1/(2N) at near-certain error keeps N small; direct
        # evaluation puts the answer in the low thousands
        n = required_comparisons_exact(PlanRequest(0.999, 0.001, alpha=0.05))
        assert n < 10_000
        assert bioquake(ErrorObservation(n, rate=0.999, alpha=0.05)).delta_rel <= 0.001

    @pytest.mark.parametrize("delta", [0.01, 0.061, 0.1])
    @pytest.mark.parametrize("er", [1e-4, 1e-3, 1e-2, 1e-1])
    def test_approx_vs_exact_within_15_percent(self, er, delta):
        approx = required_comparisons_approx(PlanRequest(er, delta, mode="approx"))
        exact = required_comparisons_exact(PlanRequest(er, delta))
        assert abs(exact - approx) / approx < 0.15

    def test_consistency_invariant(self):
        for er, delta in [(0.01, 0.05), (0.1, 0.2), (0.003, 0.1)]:
            n = required_comparisons_exact(PlanRequest(er, delta))
            r = bioquake(ErrorObservation(n, rate=er, alpha=0.05))
            assert r.delta_rel <= delta

    def test_conservative_flag_is_stable_forward(self):
        req = PlanRequest(0.02, 0.1, alpha=0.05)
        n = required_comparisons_exact(req, conservative=True)
        for m in np.unique(np.geomspace(n, 4 * n, 60).astype(int)):
            r = bioquake(ErrorObservation(int(m), rate=0.02, alpha=0.05))
            assert r.delta_rel <= 0.1

    def test_infeasible_target(self):
        with pytest.raises(InfeasiblePlanError):
            required_comparisons_exact(PlanRequest(0.5, 1e-13))

    def test_mode_enforced(self):
        with pytest.raises(DomainError):
            required_comparisons_exact(PlanRequest(1e-3, 0.061, mode="approx"))


class TestMinReportableError:
    def test_published_cells(self):
        assert min_reportable_error(3000) == pytest.approx(1 / 3)
        assert min_reportable_error(45_000) == pytest.approx(0.022222, rel=1e-3)
        assert min_reportable_error(500) == 1.0

    def test_general_delta(self):
        v = min_reportable_error(100_000, delta=0.01, alpha=0.05)
        assert v == pytest.approx(rule_constant(0.01, 0.05) / 100_000)

    def test_cap_below_rule_constant(self):
        assert min_reportable_error(1000) == 1.0  # 1e3 / 1000 reaches the cap
        assert min_reportable_error(999) == 1.0

    def test_non_increasing_in_comparisons(self):
        values = [min_reportable_error(n) for n in (10, 100, 1000, 10**4, 10**6)]
        for a, b in zip(values, values[1:]):
            assert b <= a

    def test_domain(self):
        with pytest.raises(DomainError):
            min_reportable_error(0)


class TestFormatMinError:
    @pytest.mark.parametrize(
        "value,rendered",
        [
            (1 / 3, "3e-1"),
            (0.022222222, "2e-2"),
            (1e3 / 1e6, "1e-3"),
            (1e3 / 23_500, "4e-2"),
            (1e3 / 11_100_000_000, "9e-8"),
            (0.5, "5e-1"),
        ],
    )
    def test_ascii_cells(self, value, rendered):
        assert format_min_error(value) == rendered

    def test_cap(self):
        assert format_min_error(1.0) == ">=1"
        assert format_min_error(2.5) == ">=1"
        assert format_min_error(1.0, style="unicode") == "≥1"

    def test_unicode(self):
        assert format_min_error(1 / 3, style="unicode") == "3×10⁻¹"

    def test_half_even_rounding(self):
        assert format_min_error(0.25) == "2e-1"
        assert format_min_error(0.35) == "4e-1"
        assert format_min_error(0.025) == "2e-2"

    def test_mantissa_rollover(self):
        assert format_min_error(0.96) == "1e0"


class TestCurve:
    def test_rows_ordered_and_sized(self):
        spec = CurveSpec(delta_list=(0.061, 0.1), points=5, error_range=(1e-3, 0.1))
        rows = curve(spec)
        assert len(rows) == 10
        assert [r.delta for r in rows] == [0.061] * 5 + [0.1] * 5
        for chunk in (rows[:5], rows[5:]):
            rates = [r.error_rate for r in chunk]
            assert rates == sorted(rates)

    def test_six_percent_point(self):
        spec = CurveSpec(delta_list=(0.061,), points=2, error_range=(1e-3, 0.5))
        rows = curve(spec)
        assert rows[0].error_rate == pytest.approx(1e-3)
        assert rows[0].required_comparisons == pytest.approx(1e6, rel=0.04)

    def test_ten_percent_point(self):
        spec = CurveSpec(delta_list=(0.1,), points=2, error_range=(1e-3, 0.5))
        rows = curve(spec)
        assert rows[0].required_comparisons == pytest.approx(3.8e5, rel=0.05)

    def test_inverse_scaling_in_error_rate(self):
        spec = CurveSpec(delta_list=(0.061,), points=9, error_range=(1e-4, 0.01))
        rows = curve(spec)
        for a, b in zip(rows, rows[1:]):
            ratio = a.required_comparisons / b.required_comparisons
            expected = b.error_rate / a.error_rate
            assert ratio == pytest.approx(expected, rel=0.05)

    def test_exact_mode(self):
        spec = CurveSpec(delta_list=(0.1,), points=3, error_range=(0.01, 0.1), exact=True)
        rows = curve(spec)
        for r in rows:
            res = bioquake(ErrorObservation(r.required_comparisons, rate=r.error_rate))
            assert res.delta_rel <= 0.1

    def test_csv_format(self):
        spec = CurveSpec(delta_list=(0.061,), points=2, error_range=(1e-3, 0.5))
        text = curve_to_csv(curve(spec))
        lines = text.strip().split("\n")
        assert lines[0] == "error_rate,delta,confidence,required_comparisons"
        assert len(lines) == 3
        first = lines[1].split(",")
        # decimal notation, 6 significant digits, never scientific
        assert first[0] == "0.00100000"
        assert first[1] == "0.0610000"
        assert first[2] == "0.950000"
        assert first[3].isdigit()

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            CurveSpec(delta_list=())
        with pytest.raises(DomainError):
            CurveSpec(delta_list=(0.1,), points=1)
        with pytest.raises(DomainError):
            CurveSpec(delta_list=(0.1,), error_range=(0.2, 0.1))


def test_plan_request_validation():
    with pytest.raises(DomainError):
        PlanRequest(0.0, 0.1)
    with pytest.raises(DomainError):
        PlanRequest(0.5, -1.0)
    with pytest.raises(DomainError):
        PlanRequest(0.5, 0.1, mode="fast")
