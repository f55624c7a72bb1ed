"""Test cases for the report pipeline."""

import unittest
import os
import shutil
import subprocess
import sys

import pandas as pd

import cgatcore.pipeline as P


ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

DATA = os.path.join(ROOT, "thermokit", "data")


class BaseTest(unittest.TestCase):

    def setUp(self):
        self.work_dir = P.get_temp_dir(shared=True)

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def run_command(self, statement, **kwargs):
        print(statement)
        env = dict(os.environ)
        env["PYTHONPATH"] = os.pathsep.join(
            x for x in (ROOT, env.get("PYTHONPATH")) if x)
        proc = subprocess.Popen(statement,
                                shell=True,
                                stdout=subprocess.PIPE,
                                stderr=subprocess.PIPE,
                                cwd=self.work_dir,
                                env=env,
                                **kwargs)
        stdout, stderr = proc.communicate()
        stdout = stdout.decode("utf-8")
        stderr = stderr.decode("utf-8")
        self.assertEqual(proc.returncode, 0, msg="stderr = {}".format(stderr))
        return proc.returncode, stdout, stderr


class TestReportPipeline(BaseTest):

    maps = ["linear_custom"]

    def setUp(self):
        BaseTest.setUp(self)
        for name in self.maps:
            shutil.copy(os.path.join(DATA, "{}.map.json".format(name)), self.work_dir)

    def check_files(self, present=[], absent=[]):
        for fn in present:
            path = os.path.join(self.work_dir, fn)
            self.assertTrue(os.path.exists(path),
                            "file {} does not exist".format(path))

        for fn in absent:
            path = os.path.join(self.work_dir, fn)
            self.assertFalse(os.path.exists(path),
                             "file {} does exist but not expected".format(path))

    def test_full_produces_summary(self):

        self.run_command(
            "{} -m thermokit.entry pipeline report make full --local".format(sys.executable))

        self.check_files(
            present=["report.dir/linear_custom.json",
                     "report.dir/summary.tsv",
                     "pipeline.log"])

        summary = pd.read_csv(os.path.join(self.work_dir, "report.dir", "summary.tsv"),
                              sep="\t")
        self.assertEqual(list(summary["name"]), ["linear_custom"])
        self.assertEqual(summary["regime"].iloc[0], "gauss_like")
        self.assertAlmostEqual(summary["L_max"].iloc[0], 1.0, delta=1e-3)

    def test_nothing_to_do_without_descriptors(self):

        for name in self.maps:
            os.unlink(os.path.join(self.work_dir, "{}.map.json".format(name)))

        self.run_command(
            "{} -m thermokit.entry pipeline report make full --local".format(sys.executable))

        self.check_files(absent=["report.dir/linear_custom.json"])


if __name__ == "__main__":
    unittest.main()
