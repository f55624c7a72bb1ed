"""Test cases for the command line layer: run configurations, artifacts
and the tool entry points."""

import json
import math
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

from thermokit import cli
from thermokit import config
from thermokit import entry
from thermokit import output
from thermokit import pressure as pr
from thermokit.errors import ConfigError, NonConvergence
from thermokit.tools import cf as cf_tool

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                    "thermokit", "data")

LINEAR = {"family": "linear_custom", "params": {"slopes": [3.0, 1.5]}}


class BaseTest(unittest.TestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def path(self, name):
        return os.path.join(self.work_dir, name)


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        c = cli.RunConfig(command="gurevich")
        self.assertEqual(c.caps, (10, 20, 40))
        self.assertEqual(c.format, "csv")

    def test_grids_are_parsed(self):
        c = cli.RunConfig(command="pressure-curve", map=LINEAR, t_grid="-1:4:11")
        self.assertEqual(c.t_grid, (-1.0, 4.0, 11))
        self.assertEqual(len(c.grid("t_grid")), 11)
        self.assertIsNone(c.grid("alpha_grid"))

    def test_invalid(self):
        bad = [
            {"command": "nosuch"},
            {"command": "gurevich", "format": "xml"},
            {"command": "pressure-curve"},
            {"command": "pressure-curve", "map": {"family": "tent"}},
            {"command": "pressure-curve", "map": LINEAR, "t_grid": "1:0:5"},
            {"command": "pressure-curve", "map": LINEAR, "t_grid": "0:1"},
            {"command": "spectrum", "map": LINEAR, "alpha_grid": "0:1:5"},
            {"command": "pressure-curve", "map": LINEAR, "truncations": "50,25"},
            {"command": "pressure-curve", "map": LINEAR, "depth_cap": 0},
            {"command": "pressure-curve", "map": LINEAR, "tol": 2.0},
            {"command": "validate-map", "map": LINEAR, "depth": 9},
            {"command": "gurevich", "caps": "0,5"},
            {"command": "cf"},
            {"command": "cf", "x": "golden", "kind": "forward"},
        ]
        for values in bad:
            self.assertRaises(ConfigError, cli.RunConfig.from_dict, values)

    def test_unknown_field(self):
        self.assertRaises(ConfigError, cli.RunConfig.from_dict,
                          {"command": "gurevich", "colour": "red"})

    def test_param_overrides(self):
        c = cli.RunConfig(command="pressure-curve", map=LINEAR, depth_cap=6,
                          truncations="10,20")
        self.assertEqual(c.param_overrides(),
                         {"pressure": {"depth_cap": 6, "truncations": [10, 20]}})
        self.assertEqual(cli.RunConfig(command="gurevich").param_overrides(), {})

    def test_descriptor_files(self):
        descriptor = cli.read_descriptor(os.path.join(DATA, "renyi.map.json"))
        self.assertEqual(descriptor["family"], "renyi")
        self.assertRaises(ConfigError, cli.read_descriptor, os.path.join(DATA, "missing.json"))


class TestRun(BaseTest):

    def test_gurevich(self):
        outfile = self.path("g.csv")
        status = cli.run({"command": "gurevich", "rule": "renewal", "caps": (5, 10),
                          "n_max": 40, "out": outfile})
        self.assertEqual(status, 0)
        with open(outfile) as inf:
            self.assertEqual(inf.readline(), "# thermokit gurevich schema 1\n")
        frame = output.read_csv(outfile)
        self.assertEqual(list(frame.columns), ["n", "estimate", "cap"])
        self.assertEqual(sorted(set(frame["cap"])), [5, 10])
        self.assertEqual(len(frame), 80)

    def test_configuration_errors(self):
        self.assertEqual(cli.run({"command": "gurevich", "colour": "red"}), 2)
        self.assertEqual(cli.run({"command": "spectrum", "map": {"family": "tent"}}), 2)
        self.assertEqual(cli.run({"command": "gurevich", "rule": "golden",
                                  "out": self.path("g.csv")}), 2)

    def test_cf(self):
        outfile = self.path("cf.csv")
        self.assertEqual(cli.run({"command": "cf", "x": "inv_pi", "n": 5, "out": outfile}), 0)
        frame = output.read_csv(outfile)
        self.assertEqual(list(frame["digit"]), [3, 7, 15, 1, 292])
        self.assertEqual((int(frame["p"].iloc[3]), int(frame["q"].iloc[3])), (113, 355))

    def test_cf_json(self):
        outfile = self.path("cf.json")
        status = cli.run({"command": "cf", "x": "0.5", "n": 5, "format": "json",
                          "kind": "backward", "out": outfile})
        self.assertEqual(status, 0)
        with open(outfile) as inf:
            doc = json.load(inf)
        self.assertEqual(doc["artifact"], "cf")
        self.assertEqual(doc["schema_version"], 1)
        self.assertTrue(doc["expansion"]["truncated"])

    def test_pressure_curve_is_reproducible(self):
        values = {"command": "pressure-curve", "map": LINEAR, "t_grid": "-1:4:21"}
        first, second = self.path("a.csv"), self.path("b.csv")
        self.assertEqual(cli.run(dict(values, out=first)), 0)
        self.assertEqual(cli.run(dict(values, out=second)), 0)
        with open(first, "rb") as a, open(second, "rb") as b:
            self.assertEqual(a.read(), b.read())
        frame = output.read_csv(first)
        self.assertEqual(len(frame), 21)

    def test_nonconvergence_writes_flagged_artifact(self):
        outfile = self.path("p.csv")
        with mock.patch.object(pr, "bowen_root", side_effect=NonConvergence("no sign change")):
            status = cli.run({"command": "pressure-curve", "map": LINEAR,
                              "t_grid": "-1:4:21", "out": outfile})
        self.assertEqual(status, NonConvergence.exit_code)
        frame = output.read_csv(outfile)
        self.assertEqual(list(frame["converged"]), [False])
        self.assertIn("no sign change", frame["error"].iloc[0])

    def test_nonconvergence_json(self):
        outfile = self.path("s.json")
        with mock.patch.object(pr, "bowen_root", side_effect=NonConvergence("no sign change")):
            status = cli.run({"command": "spectrum", "map": LINEAR, "format": "json",
                              "out": outfile})
        self.assertEqual(status, 3)
        with open(outfile) as inf:
            doc = json.load(inf)
        self.assertEqual(doc["artifact"], "spectrum")
        self.assertIs(doc["converged"], False)

    def test_unconverged_rows_are_flagged(self):
        outfile = self.path("gauss.csv")
        status = cli.run({"command": "pressure-curve", "map": {"family": "gauss", "params": {}},
                          "t_grid": "0.8:2:5", "depth_cap": 2, "tol": 1e-12, "out": outfile})
        self.assertEqual(status, 3)
        frame = output.read_csv(outfile)
        self.assertEqual(len(frame), 5)
        self.assertFalse(frame["converged"].any())

    def test_validate_map(self):
        outfile = self.path("v.json")
        descriptor = cli.read_descriptor(os.path.join(DATA, "linear_custom.map.json"))
        status = cli.run({"command": "validate-map", "map": descriptor, "depth": 2,
                          "format": "json", "out": outfile})
        self.assertEqual(status, 0)
        with open(outfile) as inf:
            doc = json.load(inf)
        self.assertEqual(doc["artifact"], "validate-map")


class TestOutput(unittest.TestCase):

    def test_nonfinite_values(self):
        nonfinite = {}
        plain = output.to_plain({"a": [1.0, math.inf], "b": np.nan}, nonfinite=nonfinite)
        self.assertEqual(plain, {"a": [1.0, None], "b": None})
        self.assertEqual(nonfinite, {"a[1]": "inf", "b": "nan"})

    def test_document(self):
        doc = output.document({"x": np.float64(-np.inf), "n": np.int64(3),
                               "ok": np.bool_(True)}, "report")
        self.assertEqual(doc["nonfinite"], {"x": "-inf"})
        self.assertEqual(doc["n"], 3)
        self.assertIs(doc["ok"], True)
        self.assertEqual(doc["schema_version"], output.SCHEMA_VERSION)

    def test_frames(self):
        frame = pd.DataFrame({"t": [0.0, 1.0], "P": [1.0, np.inf]})
        plain = output.to_plain(frame)
        self.assertEqual(plain["columns"], ["t", "P"])
        self.assertIsNone(plain["rows"][1]["P"])

    def test_header(self):
        self.assertEqual(output.header("spectrum"), "# thermokit spectrum schema 1\n")


class TestConfig(unittest.TestCase):

    def test_overrides_are_scoped(self):
        tol = config.get_params()["pressure"]["tol"]
        with config.overrides({"pressure": {"tol": 1e-3}}) as params:
            self.assertEqual(params["pressure"]["tol"], 1e-3)
            self.assertEqual(config.get_params()["pressure"]["tol"], 1e-3)
        self.assertEqual(config.get_params()["pressure"]["tol"], tol)

    def test_unknown_keys(self):
        with self.assertRaises(ConfigError):
            with config.overrides({"pressure": {"colour": 1}}):
                pass
        with self.assertRaises(ConfigError):
            with config.overrides({"pressure": 1}):
                pass

    def test_copies(self):
        params = config.get_params()
        params["pressure"]["tol"] = 0.5
        self.assertNotEqual(config.get_params()["pressure"]["tol"], 0.5)

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {"THERMOKIT_THREADS": "3"}):
            self.assertEqual(config.worker_count(), 3)
        for value in ("0", "many"):
            with mock.patch.dict(os.environ, {"THERMOKIT_THREADS": value}):
                self.assertRaises(ConfigError, config.worker_count)


class TestTools(BaseTest):

    def test_cf_tool(self):
        outfile = self.path("golden.csv")
        status = cf_tool.main(["cf", "--x", "golden", "--n", "6", "--out", outfile])
        self.assertEqual(status, 0)
        self.assertEqual(list(output.read_csv(outfile)["digit"]), [1] * 6)

    def test_commands(self):
        commands = entry.commands()
        for command in cli.COMMANDS:
            self.assertIn(command, commands)
        self.assertEqual(entry.pipelines(), ["report"])

    def test_unknown_command(self):
        self.assertEqual(entry.main(["thermokit", "nosuch"]), 2)
        self.assertEqual(entry.main(["thermokit", "pipeline", "nosuch"]), 2)


if __name__ == "__main__":
    unittest.main()
