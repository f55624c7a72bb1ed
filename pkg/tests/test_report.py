"""Test cases for the thermokit.report module."""

import math
import unittest

import numpy as np

from thermokit import maps
from thermokit import report


class TestChecks(unittest.TestCase):

    def test_close(self):
        self.assertTrue(report.check_close("x", 1.004, 1.0, 0.01).passed)
        self.assertFalse(report.check_close("x", 1.1, 1.0, 0.01).passed)
        self.assertFalse(report.check_close("x", math.nan, 1.0, 0.01).passed)
        self.assertFalse(report.check_close("x", None, 1.0, 0.01).passed)

    def test_range(self):
        check = report.check_range("L", 0.55, 0.5, 0.6)
        self.assertTrue(check.passed)
        self.assertEqual(check.expected, "[0.5, 0.6]")
        self.assertFalse(report.check_range("L", 0.45, 0.5, 0.6).passed)

    def test_at_least(self):
        check = report.check_at_least("L", 1.0000020, 0.95)
        self.assertTrue(check.passed)
        self.assertEqual(check.expected, ">= 0.95")
        self.assertFalse(report.check_at_least("L", math.nan, 0.95).passed)

    def test_large_alpha_expansion(self):
        self.assertAlmostEqual(report.gauss_large_alpha(30.0), 0.6236, delta=1e-4)
        self.assertAlmostEqual(report.gauss_large_alpha(2.0), 1.0)


class TestClosedForms(unittest.TestCase):

    def test_pressure(self):
        model = maps.build_linear([3.0, 1.5])
        self.assertAlmostEqual(report.linear_pressure(model, 0.0), math.log(2.0))
        self.assertAlmostEqual(report.linear_pressure(model, 1.0), 0.0, places=12)

    def test_spectrum_outside_range(self):
        model = maps.build_linear([3.0, 1.5])
        self.assertTrue(math.isnan(report.linear_spectrum(model, 2.0)))

    def test_equal_slopes(self):
        model = maps.build_linear([3.0, 3.0, 3.0])
        self.assertTrue(math.isnan(report.linear_spectrum(model, math.log(3.0))))


class TestLinearReport(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = maps.build_linear([3.0, 1.5])
        cls.report = report.build_report(cls.model,
                                         t_grid=np.linspace(-1.0, 4.0, 501),
                                         alpha_grid=np.linspace(0.46, 0.86, 41))

    def test_passed(self):
        failed = [c for c in self.report["checks"] if not c["passed"]]
        self.assertTrue(self.report["passed"], failed)

    def test_closed_form_checks(self):
        names = [c["name"] for c in self.report["checks"]]
        self.assertEqual(names, ["pressure_closed_form", "spectrum_closed_form"])

    def test_regime(self):
        self.assertEqual(self.report["regime"]["regime"], "gauss_like")
        self.assertAlmostEqual(self.report["regime"]["dim_estimate"], 1.0, delta=1e-8)
        self.assertEqual(self.report["dim_identity"]["dim_J_prime"],
                         self.report["dim_identity"]["dim_Lambda"])

    def test_features(self):
        self.assertAlmostEqual(self.report["features"]["L_max"], 1.0, delta=1e-5)
        self.assertTrue(self.report["pressure_converged"])
        self.assertEqual(self.report["curve_violations"], [])


class FamilyReportTest(unittest.TestCase):

    model = None

    @classmethod
    def setUpClass(cls):
        if cls.model is None:
            raise unittest.SkipTest("base class")
        cls.report = report.build_report(cls.model)
        cls.checks = {c["name"]: c for c in cls.report["checks"]}

    def assertChecksPass(self, *names):
        for name in names:
            self.assertTrue(self.checks[name]["passed"], self.checks[name])


class TestGaussReport(FamilyReportTest):

    model = maps.build_gauss()

    def test_passed(self):
        failed = [c for c in self.report["checks"] if not c["passed"]]
        self.assertTrue(self.report["passed"], failed)

    def test_constants(self):
        self.assertChecksPass("critical_t", "dim", "alpha_star", "alpha_min",
                              "maximum_location", "maximum_value", "asymptote", "regime")

    def test_large_alpha(self):
        self.assertChecksPass("L_at_30", "L_at_30_lower")
        self.assertIn("large-alpha", self.checks["L_at_30"]["note"])

    def test_inflections(self):
        self.assertChecksPass("inflection_found", "inflections_above_alpha_star",
                              "curvature_sign_agreement")


class TestRenyiReport(FamilyReportTest):

    model = maps.build_renyi()

    def test_passed(self):
        failed = [c for c in self.report["checks"] if not c["passed"]]
        self.assertTrue(self.report["passed"], failed)

    def test_zero_pressure(self):
        self.assertChecksPass("pressure_zero_at_1", "pressure_zero_at_1.2", "pressure_zero_at_1.5")

    def test_spectrum(self):
        self.assertChecksPass("L_at_0.05", "asymptote", "inflection_found",
                              "inflections_above_alpha_star")

    def test_alpha_star_sign(self):
        self.assertEqual(math.copysign(1.0, self.report["features"]["alpha_star"]), 1.0)


class TestInfiniteMPReport(FamilyReportTest):

    model = maps.build_infinite_mp(0.5)

    def test_passed(self):
        failed = [c for c in self.report["checks"] if not c["passed"]]
        self.assertTrue(self.report["passed"], failed)

    def test_flat_part(self):
        self.assertChecksPass("regime", "alpha_star", "flat_part")
        self.assertGreater(self.report["features"]["alpha_star"], 0.1)


class TestDegenerateReport(unittest.TestCase):

    def test_pathological(self):
        result = report.build_report(maps.build_pathological(2))
        self.assertEqual(result["regime"]["regime"], "degenerate")
        self.assertIsNone(result["features"])
        self.assertEqual(result["truncated_lower_bounds"]["N"], [4, 8])
        checks = {c["name"]: c for c in result["checks"]}
        self.assertTrue(checks["regime"]["passed"])
        self.assertTrue(checks["divergent_below_one"]["passed"])


if __name__ == "__main__":
    unittest.main()
