"""Test cases for the thermokit.maps module."""

import math
import os
import unittest

import numpy as np

import thermokit
from thermokit import config
from thermokit import maps
from thermokit.errors import ConfigError

DATA = os.path.join(os.path.dirname(thermokit.__file__), "data")


class TestGauss(unittest.TestCase):

    def setUp(self):
        self.model = maps.build_gauss()

    def test_first_branch_is_upper_half(self):
        a, b = self.model.interval(1)
        self.assertAlmostEqual(float(a), 0.5)
        self.assertAlmostEqual(float(b), 1.0)

    def test_inverse_at_zero(self):
        self.assertAlmostEqual(float(self.model.inverse(2, 0.0)), 0.5)

    def test_derivative_bounds(self):
        n = np.arange(1, 20)
        lo, hi = self.model.deriv_bounds(n)
        np.testing.assert_allclose(lo, n ** 2)
        np.testing.assert_allclose(hi, (n + 1) ** 2)

    def test_map_applies_branch(self):
        y, d = self.model.map(np.array([0.3]))
        self.assertAlmostEqual(float(y[0]), 1.0 / 0.3 - 3.0)
        self.assertAlmostEqual(float(d[0]), 1.0 / 0.09)

    def test_has_no_parabolic_point(self):
        self.assertIsNone(self.model.parabolic)
        self.assertFalse(self.model.is_finite)

    def test_tail_exponent(self):
        self.assertAlmostEqual(maps.tail_exponent(self.model), 2.0, delta=1e-3)

    def test_tail_exponent_depth(self):
        self.assertAlmostEqual(maps.tail_exponent(self.model, tail_log2=60), 2.0, delta=1e-2)
        self.assertRaises(ConfigError, maps.tail_exponent, self.model, tail_log2=2)
        with config.overrides({"pressure": {"tail_log2": 2}}):
            self.assertRaises(ConfigError, maps.tail_exponent, self.model)

    def test_validate(self):
        report = maps.validate(self.model)
        self.assertTrue(report.surjective)
        self.assertTrue(report.inverse_ok)
        self.assertTrue(report.condition5)
        self.assertTrue(report.tempered)
        self.assertAlmostEqual(report.growth_exponent, 2.0, delta=0.05)
        self.assertIsNone(report.parabolic)


class TestRenyi(unittest.TestCase):

    def setUp(self):
        self.model = maps.build_renyi()

    def test_second_branch(self):
        a, b = self.model.interval(2)
        self.assertAlmostEqual(float(a), 0.5)
        self.assertAlmostEqual(float(b), 2.0 / 3.0)

    def test_parabolic_fixed_point(self):
        self.assertEqual(self.model.parabolic.point, 0.0)
        self.assertEqual(float(self.model.forward(1, 0.0)), 0.0)
        self.assertEqual(float(self.model.derivative(1, 0.0)), 1.0)

    def test_validate_parabolic(self):
        report = maps.validate(self.model)
        self.assertTrue(report.parabolic)
        self.assertTrue(report.surjective)
        self.assertTrue(report.inverse_ok)


class TestInfiniteMP(unittest.TestCase):

    def test_affine_branch_is_full(self):
        model = maps.build_infinite_mp(0.5)
        self.assertAlmostEqual(float(model.forward(2, 0.5)), 0.0)
        self.assertAlmostEqual(float(model.forward(2, 2.0 / 3.0)), 1.0)

    def test_parabolic_branch_reaches_one(self):
        for beta in (0.25, 0.5, 1.0, 2.0):
            model = maps.build_infinite_mp(beta)
            self.assertAlmostEqual(float(model.forward(1, 0.5)), 1.0, places=12)
            self.assertAlmostEqual(float(model.derivative(1, 0.0)), 1.0, places=12)

    def test_parabolic_inverse(self):
        model = maps.build_infinite_mp(0.5)
        y = np.linspace(0.0, 1.0, 101)
        x = model.inverse(1, y)
        np.testing.assert_allclose(model.forward(1, x), y, atol=1e-12)

    def test_rejects_nonpositive_beta(self):
        self.assertRaises(ConfigError, maps.build_infinite_mp, 0.0)


class TestPathological(unittest.TestCase):

    def setUp(self):
        self.model = maps.build_pathological(2)

    def test_branch_length_follows_label(self):
        # branch 2 carries label N + 1 = 3
        a, b = self.model.interval(2)
        self.assertAlmostEqual(float(b - a), 1.0 / (6.0 * math.log(6.0) ** 2))
        self.assertAlmostEqual(float(a), 0.5)

    def test_branches_are_packed(self):
        _, b = self.model.interval(2)
        a, _ = self.model.interval(3)
        self.assertAlmostEqual(float(a), float(b))
        self.assertLess(self.model.packed_length, 0.5)

    def test_condition5_fails(self):
        report = maps.validate(self.model)
        self.assertFalse(report.condition5)
        self.assertFalse(report.passed)

    def test_rejects_bad_N(self):
        self.assertRaises(ConfigError, maps.build_pathological, 0)


class TestLinear(unittest.TestCase):

    def test_default_placement(self):
        model = maps.build_linear([3.0, 1.5])
        self.assertEqual(model.branch_count, 2)
        a, b = model.interval(2)
        self.assertAlmostEqual(float(a), 1.0 / 3.0)
        self.assertAlmostEqual(float(b), 1.0)

    def test_overlapping_intervals_are_rejected(self):
        self.assertRaises(ConfigError, maps.build_linear,
                          [2.0, 2.0], [(0.0, 0.5), (0.25, 0.75)])

    def test_branch_must_be_full(self):
        self.assertRaises(ConfigError, maps.build_linear, [3.0], [(0.0, 0.5)])

    def test_slopes_must_expand(self):
        self.assertRaises(ConfigError, maps.build_linear, [0.5, 2.0])

    def test_validate(self):
        report = maps.validate(maps.build_linear([3.0, 1.5]))
        self.assertTrue(report.passed)
        self.assertEqual(report.expansion_iterate, 1)


class TestTruncation(unittest.TestCase):

    def test_truncate_keeps_branches(self):
        model = maps.build_gauss()
        truncated = maps.truncate(model, 5)
        self.assertEqual(truncated.branch_count, 5)
        self.assertEqual(truncated.interval(3), model.interval(3))
        self.assertEqual(len(list(truncated.branches())), 5)

    def test_truncate_needs_two_branches(self):
        self.assertRaises(ConfigError, maps.truncate, maps.build_gauss(), 1)

    def test_truncate_finite_model(self):
        model = maps.truncate(maps.build_linear([3.0, 1.5]), 10)
        self.assertEqual(model.branch_count, 2)

    def test_index_beyond_truncation(self):
        model = maps.truncate(maps.build_renyi(), 3)
        self.assertRaises(ValueError, model.branch, 4)

    def test_name(self):
        self.assertEqual(maps.truncate(maps.build_renyi(), 3).name, "renyi[N=3]")


class TestCylinders(unittest.TestCase):

    def test_first_level_of_gauss(self):
        words = list(maps.cylinders(maps.build_gauss(), 2, 1))
        self.assertEqual([w.word for w in words], [(1,), (2,)])
        np.testing.assert_allclose(words[0].interval, (0.5, 1.0))
        np.testing.assert_allclose(words[1].interval, (1.0 / 3.0, 0.5))
        self.assertAlmostEqual(words[0].deriv_inf, 1.0)
        self.assertAlmostEqual(words[0].deriv_sup, 4.0)

    def test_second_level_of_gauss(self):
        words = {w.word: w for w in maps.cylinders(maps.build_gauss(), 2, 2)}
        np.testing.assert_allclose(words[(1, 1)].interval, (0.5, 2.0 / 3.0))
        np.testing.assert_allclose(words[(1, 2)].interval, (2.0 / 3.0, 0.75))
        np.testing.assert_allclose(words[(2, 1)].interval, (1.0 / 3.0, 0.4))

    def test_count(self):
        words = list(maps.cylinders(maps.build_renyi(), 3, 3))
        self.assertEqual(len(words), 27)

    def test_children_nest_in_parents(self):
        model = maps.build_gauss()
        parents = list(maps.cylinders(model, 3, 2))
        children = list(maps.cylinders(model, 3, 3))
        for i, child in enumerate(children):
            parent = parents[i // 3]
            self.assertEqual(child.word[:2], parent.word)
            self.assertGreaterEqual(child.interval[0], parent.interval[0] - 1e-15)
            self.assertLessEqual(child.interval[1], parent.interval[1] + 1e-15)

    def test_linear_cylinders_have_no_distortion(self):
        for word in maps.cylinders(maps.build_linear([3.0, 1.5]), 2, 3):
            self.assertAlmostEqual(word.distortion, 1.0)

    def test_gauss_distortion_is_bounded(self):
        rho = maps.distortion_sequence(maps.build_gauss(), 4)
        self.assertEqual(len(rho), 4)
        self.assertAlmostEqual(rho[0], 2.0 * math.log(2.0))
        self.assertTrue(all(b <= a for a, b in zip(rho[:-1], rho[1:])))


class TestDescriptors(unittest.TestCase):

    def test_families(self):
        self.assertIsInstance(maps.from_descriptor({"family": "gauss"}), maps.GaussMap)
        model = maps.from_descriptor({"family": "infinite_mp", "params": {"beta": 0.5}})
        self.assertEqual(model.beta, 0.5)

    def test_truncation(self):
        model = maps.from_descriptor({"family": "renyi", "truncation": 3})
        self.assertEqual(model.branch_count, 3)

    def test_describe_rebuilds(self):
        model = maps.truncate(maps.build_infinite_mp(0.5), 7)
        self.assertEqual(maps.from_descriptor(model.describe()), model)

    def test_unknown_family(self):
        self.assertRaises(ConfigError, maps.from_descriptor, {"family": "tent"})

    def test_unknown_parameter(self):
        self.assertRaises(ConfigError, maps.from_descriptor,
                          {"family": "gauss", "params": {"beta": 1.0}})

    def test_unknown_field(self):
        self.assertRaises(ConfigError, maps.from_descriptor,
                          {"family": "gauss", "colour": "red"})

    def test_missing_parameter(self):
        self.assertRaises(ConfigError, maps.from_descriptor, {"family": "infinite_mp"})

    def test_shipped_descriptors_load(self):
        for name in ("gauss", "renyi", "infinite_mp", "pathological",
                     "linear_custom", "renyi_N3"):
            model = maps.load_map(os.path.join(DATA, "%s.map.json" % name))
            self.assertIn(model.family, maps.FAMILIES)

    def test_linear_descriptor(self):
        model = maps.load_map(os.path.join(DATA, "linear_custom.map.json"))
        self.assertEqual(model.slopes, (3.0, 1.5))


if __name__ == "__main__":
    unittest.main()
