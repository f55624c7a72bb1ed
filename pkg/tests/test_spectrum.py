"""Test cases for the thermokit.spectrum module."""

import math
import unittest
from unittest import mock

import numpy as np

from thermokit import maps
from thermokit import pressure as pr
from thermokit import report
from thermokit import spectrum as sp

GOLDEN_LYAPUNOV = 2.0 * math.log((1.0 + math.sqrt(5.0)) / 2.0)
GAUSS_LYAPUNOV = math.pi ** 2 / (6.0 * math.log(2.0))


class TestLinearSpectrum(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = maps.build_linear([3.0, 1.5])
        cls.curve = pr.pressure_curve(cls.model, np.linspace(-1.0, 4.0, 501))
        cls.alpha = np.linspace(0.46, 0.86, 81)
        cls.spectrum = sp.legendre_spectrum(cls.curve, cls.alpha)

    def test_closed_form(self):
        for alpha in (0.5, 0.6, 0.7, 0.8):
            value = self.spectrum.solver().value(alpha)
            self.assertAlmostEqual(value, report.linear_spectrum(self.model, alpha), delta=1e-5)

    def test_all_points_free(self):
        self.assertTrue(np.all(self.spectrum.free))
        self.assertTrue(np.all(np.isfinite(self.spectrum.L)))

    def test_entropy_below_topological_entropy(self):
        self.assertTrue(np.all(self.spectrum.entropy <= math.log(2.0) + 1e-9))

    def test_absent_outside_exponent_range(self):
        t, p, flag = self.spectrum.solver().solve(1.5)
        self.assertEqual(flag, sp.ABSENT)
        self.assertTrue(math.isnan(self.spectrum.solver().value(1.5)))

    def test_maximum_is_dimension(self):
        features = sp.features(self.curve, self.spectrum, self.model)
        self.assertTrue(features.maximum_interior)
        self.assertAlmostEqual(features.L_max, 1.0, delta=1e-5)
        self.assertLess(sp.maximum_t_identity(self.spectrum, features.alpha_max_at), 1e-4)

    def test_alpha_star_is_slope_at_root(self):
        expected = (math.log(3.0) / 3.0 + 2.0 * math.log(1.5) / 3.0)
        self.assertAlmostEqual(sp.alpha_star(self.curve), expected, delta=1e-5)

    def test_exponent_range(self):
        self.assertAlmostEqual(sp.alpha_min(self.model), math.log(1.5), places=9)
        self.assertAlmostEqual(sp.alpha_max(self.model), math.log(3.0), places=9)

    def test_frame(self):
        frame = self.spectrum.to_frame()
        self.assertEqual(len(frame), 81)
        self.assertIn("residual", frame.columns)
        self.assertTrue(all(f == "" for f in frame["flags"]))

    def test_second_differences_follow_residual(self):
        signs = sp.second_difference_signs(self.spectrum)
        residual = self.spectrum.curvature_residual
        mask = np.abs(residual) > 1e-3
        mask[:2] = mask[-2:] = False
        self.assertTrue(mask.any())
        np.testing.assert_array_equal(signs[mask], np.sign(residual[mask]))

    def test_nonpositive_alpha_rejected(self):
        self.assertRaises(ValueError, sp.legendre_spectrum, self.curve, [0.0, 0.5])


class TestResidual(unittest.TestCase):

    def test_sign_follows_curvature(self):
        # L'' = 2 R / alpha^3 on an exact curve
        model = maps.build_linear([3.0, 1.5])
        curve = pr.pressure_curve(model, np.linspace(-1.0, 4.0, 501))
        solver = sp.LegendreSolver(curve)
        h = 1e-3
        for alpha in (0.5, 0.65, 0.8):
            second = (solver.value(alpha + h) - 2.0 * solver.value(alpha) +
                      solver.value(alpha - h)) / h ** 2
            self.assertAlmostEqual(second, 2.0 * solver.residual(alpha) / alpha ** 3, delta=1e-2)


class TestGaussExponents(unittest.TestCase):

    def test_alpha_min_is_golden_mean(self):
        self.assertAlmostEqual(sp.alpha_min(maps.build_gauss()), GOLDEN_LYAPUNOV, delta=1e-3)

    def test_alpha_max_unbounded(self):
        self.assertEqual(sp.alpha_max(maps.build_gauss()), math.inf)

    def test_parabolic_alpha_min(self):
        self.assertEqual(sp.alpha_min(maps.build_renyi()), 0.0)

    def test_periodic_exponents(self):
        exponents = sp.periodic_exponents(maps.build_gauss(), period_cap=2, N=3)
        self.assertEqual(len(exponents), 3 + 9)
        self.assertAlmostEqual(float(exponents[0]), GOLDEN_LYAPUNOV, places=9)


class TestGaussSpectrum(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = maps.build_gauss()
        cls.curve, cls.spectrum, cls.features = sp.spectrum_for_model(cls.model)

    def test_alpha_star(self):
        self.assertAlmostEqual(self.features.alpha_star, GAUSS_LYAPUNOV, delta=0.05)

    def test_maximum(self):
        self.assertAlmostEqual(self.features.alpha_max_at, GAUSS_LYAPUNOV, delta=0.05)
        self.assertAlmostEqual(self.features.L_max, 1.0, delta=0.01)

    def test_alpha_min(self):
        self.assertAlmostEqual(self.features.alpha_min, GOLDEN_LYAPUNOV, delta=1e-3)

    def test_valid_above_alpha_min(self):
        above = self.spectrum.alpha_grid > GOLDEN_LYAPUNOV + 0.5
        self.assertTrue(np.all(self.spectrum.valid[above]))

    def test_inflection_found(self):
        self.assertGreaterEqual(len(self.features.inflections), 1)

    def test_inflections_above_alpha_star(self):
        for a in self.features.inflections:
            self.assertGreater(a, self.features.alpha_star)

    def test_large_alpha(self):
        value = self.spectrum.solver().value(30.0)
        self.assertGreaterEqual(value, 0.5)
        self.assertAlmostEqual(value, report.gauss_large_alpha(30.0), delta=0.01)

    def test_asymptote(self):
        self.assertAlmostEqual(self.features.asymptote, 0.5, delta=0.02)

    def test_every_sign_change_is_reported(self):
        # inflections are not filtered by their position relative to alpha*
        late = sp.AlphaStar(100.0, False)
        with mock.patch.object(sp, "estimate_alpha_star", return_value=late):
            shifted = sp.features(self.curve, self.spectrum, self.model)
        self.assertEqual(shifted.inflections, self.features.inflections)
        checks = {c.name: c for c in report._inflection_checks(self.spectrum, shifted)}
        self.assertFalse(checks["inflections_above_alpha_star"].passed)


class TestRenyiSpectrum(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = maps.build_renyi()
        cls.curve, cls.spectrum, cls.features = sp.spectrum_for_model(cls.model)

    def test_tends_to_one_at_zero(self):
        self.assertGreaterEqual(self.spectrum.solver().value(0.05), 0.95)

    def test_asymptote(self):
        self.assertAlmostEqual(self.features.asymptote, 0.5, delta=0.02)

    def test_inflection_found(self):
        self.assertGreaterEqual(len(self.features.inflections), 1)
        self.assertTrue(any(a > self.features.alpha_star for a in self.features.inflections))

    def test_alpha_star_is_not_negative_zero(self):
        self.assertGreaterEqual(math.copysign(1.0, self.features.alpha_star), 0.0)


class TestInfiniteMPSpectrum(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = maps.build_infinite_mp(0.5)
        cls.curve, cls.spectrum, cls.features = sp.spectrum_for_model(cls.model)

    def test_alpha_star(self):
        self.assertGreater(self.features.alpha_star, 0.1)

    def test_flat_part(self):
        pinned = np.array([f == sp.PINNED for f in self.spectrum.flags])
        self.assertTrue(pinned.any())
        np.testing.assert_allclose(self.spectrum.L[pinned], self.curve.dim, atol=0.02)
        self.assertTrue(np.all(self.spectrum.alpha_grid[pinned] <= self.features.alpha_star))


class TestAlphaStarSign(unittest.TestCase):

    def test_zero_slope_gives_positive_zero(self):
        curve = pr.PressureCurve(
            t_grid=[0.0, 1.0], values=[0.1, 0.0], lower=[0.1, 0.0], upper=[0.1, 0.0],
            errors=[0.0, 0.0], depths=[1, 1],
            meta={"dim": 1.0, "parabolic": True, "left_slope": 0.0})
        value = sp.alpha_star(curve)
        self.assertEqual(value, 0.0)
        self.assertEqual(math.copysign(1.0, value), 1.0)


class TestRandomAffine(unittest.TestCase):
    """piecewise linear maps against their closed forms."""

    def random_model(self, rng):
        K = rng.randint(2, 7)
        while True:
            lengths = rng.dirichlet(np.ones(K)) * rng.uniform(0.6, 1.0)
            slopes = 1.0 / lengths
            if math.log(slopes.max() / slopes.min()) >= 0.1:
                return maps.build_linear(slopes)

    def test_random_maps(self):
        rng = np.random.RandomState(5)
        for _ in range(20):
            model = self.random_model(rng)
            curve, spectrum, _ = sp.spectrum_for_model(model)
            inside = (curve.t_grid >= 0.0) & (curve.t_grid <= 3.0)
            exact = np.array([report.linear_pressure(model, t) for t in curve.t_grid[inside]])
            np.testing.assert_allclose(curve.values[inside], exact, atol=1e-6)

            solver = spectrum.solver()
            log_slopes = np.log(model.slopes)
            lo, span = log_slopes.min(), log_slopes.max() - log_slopes.min()
            for alpha in lo + span * np.linspace(0.05, 0.95, 19):
                _, _, flag = solver.solve(alpha)
                self.assertIsNone(flag, (model.slopes, alpha))
                self.assertAlmostEqual(solver.value(alpha), report.linear_spectrum(model, alpha),
                                       delta=1e-5, msg=(model.slopes, alpha))


class TestTruncatedSpectra(unittest.TestCase):

    def test_monotone_in_N(self):
        model = maps.build_gauss()
        full = pr.pressure_curve(model, np.linspace(0.6, 4.0, 35))
        result = sp.truncated_spectra(model, 1.5, [2, 4, 8],
                                      t_grid=np.linspace(-1.0, 4.0, 26), full_curve=full)
        self.assertEqual(result.N, [2, 4, 8])
        self.assertTrue(result.monotone)
        self.assertTrue(result.below_full)

    def test_renyi_nondecreasing_in_N(self):
        result = sp.truncated_spectra(maps.build_renyi(), 1.0, [5, 25, 100])
        self.assertTrue(np.all(np.isfinite(result.values)), result.values)
        self.assertTrue(result.monotone)
        self.assertLessEqual(result.values[0], result.values[-1])
        self.assertGreater(result.values[0], 0.8)


if __name__ == "__main__":
    unittest.main()
