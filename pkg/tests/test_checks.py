"""Randomized inequality battery: determinism, pass behavior on the
reference families, and the one structurally expected failure."""

import numpy as np
import pytest

from fglap.checks import (
    CheckOutcome,
    check_comparison,
    check_delta2,
    check_gdiff,
    check_lindqvist,
    check_phi_mvt,
    check_rpower,
    lindqvist_constant,
    run_check_suite,
)
from fglap.errors import ConfigurationError
from fglap.fractional import OperatorConfig
from fglap.young import PhiWeight, PowerYoung

# exponent budgets under which each family's tail domination holds inside
# the scanned window; the double-power family needs the smaller budget
Q_STAR = {"power": 2.0, "double-power": 1.5, "log-type": 2.0}


class TestOutcomeSemantics:
    def test_pass_is_margin_above_minus_tol(self):
        ok = CheckOutcome(name="x", family="f", n_samples=10,
                          worst_margin=-0.5e-9, tolerance=1e-9,
                          offending={"t": 1.0})
        assert ok.passed and ok.offending is None
        bad = CheckOutcome(name="x", family="f", n_samples=10,
                           worst_margin=-2e-9, tolerance=1e-9,
                           offending={"t": 1.0})
        assert not bad.passed and bad.offending == {"t": 1.0}

    def test_str_shape(self):
        out = CheckOutcome(name="delta2", family="power(p=4)", n_samples=5,
                           worst_margin=1e-3, tolerance=1e-9)
        s = str(out)
        assert "delta2[power(p=4)]" in s and "pass" in s


class TestDeterminism:
    def test_same_seed_same_margins(self, power4):
        a = check_delta2(power4, 1000, seed=123)
        b = check_delta2(power4, 1000, seed=123)
        assert a.worst_margin == b.worst_margin

    def test_different_seed_moves_margin(self, power4):
        a = check_lindqvist(power4, 1000, seed=1)
        b = check_lindqvist(power4, 1000, seed=2)
        assert a.worst_margin != b.worst_margin

    def test_streams_independent_of_call_order(self, power4):
        first = check_gdiff(power4, 1000, seed=9).worst_margin
        check_delta2(power4, 1000, seed=9)
        again = check_gdiff(power4, 1000, seed=9).worst_margin
        assert first == again


class TestSuitePasses:
    def test_all_families(self, families):
        for yf in families:
            outcomes = run_check_suite(yf, q_star=Q_STAR[yf.family_tag])
            assert len(outcomes) == 6
            for out in outcomes:
                assert out.passed, str(out)

    def test_lindqvist_constant_value(self, power4):
        # min(1/2, 2^{-p+} / (2 p-)) = min(1/2, 1/128)
        assert lindqvist_constant(power4) == pytest.approx(1.0 / 128.0)

    def test_lindqvist_worked_example(self, power4):
        # pair (-1, 1): G''-free bound gives lhs = g(1)-g(-1) paired at 4,
        # rhs = G(2)/128 = 1/32
        cl = lindqvist_constant(power4)
        lhs = (power4.g(1.0) - power4.g(-1.0)) * (1.0 - (-1.0)) / 2.0 * 2.0
        rhs = cl * power4.G(2.0)
        assert lhs == pytest.approx(4.0) and rhs == pytest.approx(1.0 / 32.0)
        assert lhs >= rhs


class TestSampleFloor:
    def test_minimum_sample_count(self, power4):
        with pytest.raises(ConfigurationError):
            check_delta2(power4, 999)
        # the other checks accept smaller draws
        assert check_lindqvist(power4, 500).n_samples == 500


class TestPhiMvt:
    def test_positive_eps_required(self, power4):
        w = PhiWeight(power4, 2.0)
        with pytest.raises(ConfigurationError):
            check_phi_mvt(w, eps=0.0)

    def test_passes_on_power(self, power4):
        out = check_phi_mvt(PhiWeight(power4, 2.0))
        assert out.passed
        assert out.info["constant"] == pytest.approx(0.8, abs=1e-9)


class TestRpower:
    def test_power_exact_margin(self, power4):
        out = check_rpower(PhiWeight(power4, 2.0))
        # power case is exact: lhs = t^{1/r} = phi(t)/r, margin 1/2
        assert out.passed
        assert out.info["t0"] == 1.0
        assert out.worst_margin == pytest.approx(0.5, rel=1e-9)

    def test_detects_structural_failure(self, dp34):
        # with the larger exponent budget the tail bound genuinely fails
        # inside the scan window and the failure reaches its end
        out = check_rpower(PhiWeight(dp34, 2.0))
        assert not out.passed
        assert out.info["t0"] == float("inf")
        assert out.offending is not None
        assert out.offending["t"] == pytest.approx(1e6, rel=1e-9)

    def test_smaller_budget_restores_it(self, dp34):
        out = check_rpower(PhiWeight(dp34, 1.5))
        assert out.passed

    def test_log_type_in_window(self, log221):
        out = check_rpower(PhiWeight(log221, 2.0))
        assert out.passed
        assert out.worst_margin == pytest.approx(0.233, abs=0.01)


class TestComparison:
    def test_ordered_pairs_and_doubling(self, power4, mesh33):
        cfg = OperatorConfig(young=power4, s=0.3)
        out = check_comparison(cfg, trials=5, mesh=mesh33)
        assert out.passed
        assert out.n_samples == 5

    def test_determinism(self, power4, mesh33):
        cfg = OperatorConfig(young=power4, s=0.3)
        a = check_comparison(cfg, trials=3, mesh=mesh33, seed=5)
        b = check_comparison(cfg, trials=3, mesh=mesh33, seed=5)
        assert a.worst_margin == b.worst_margin
