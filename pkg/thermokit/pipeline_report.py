"""
===============
Pipeline report
===============


Overview
==================

This pipeline runs the full thermokit battery on every map descriptor
in the data directory.  For each map it writes a JSON report with the
regime classification, the spectrum features and the family checks,
then merges the reports into one summary table.


Usage
=====

Run the pipeline from a working directory holding the map
descriptors::

    thermokit pipeline report make full


Configuration
-------------

The pipeline uses CGAT-core.  Copy ``pipeline.yml`` from the
``pipeline_report`` directory into the working directory to change the
options.


Input files
-----------

Map descriptors named ``<name>.map.json``, e.g.::

    {"family": "infinite_mp", "params": {"beta": 0.5}}

Example descriptors for every family ship in ``thermokit/data``.


Pipeline output
==================

* ``report.dir/<name>.json``: one report per map
* ``report.dir/summary.tsv``: one row per map with regime, dimension,
  alpha*, the spectrum maximum and the number of failed checks


Code
==================

"""
from ruffus import *

import sys
import os
import json

import pandas as pd

import cgatcore.pipeline as P
import cgatcore.experiment as E
import cgatcore.iotools as iotools

# Load options from the config file

PARAMS = P.get_parameters(
    ["%s/pipeline.yml" % os.path.splitext(__file__)[0],
     "../pipeline.yml",
     "pipeline.yml"])


try:
    PARAMS['data']
except KeyError:
    DATADIR = "."
else:
    if PARAMS['data'] == 0:
        DATADIR = "."
    elif PARAMS['data'] == 1:
        DATADIR = "data.dir"
    else:
        DATADIR = PARAMS['data']

MAPFILES = os.path.join(DATADIR, "*.map.json")


@follows(mkdir("report.dir"))
@transform(MAPFILES,
           formatter(r"(?P<track>[^/]+).map.json"),
           r"report.dir/{track[0]}.json")
def build_report(infile, outfile):
    """
    Run the report command on one map descriptor
    """

    python = sys.executable
    threads = PARAMS['report_threads']
    logfile = outfile + ".log"

    statement = """THERMOKIT_THREADS=%(threads)s
                   %(python)s -m thermokit.entry report
                   --map %(infile)s
                   --out %(outfile)s
                   --log %(logfile)s"""

    job_threads = threads

    P.run(statement)


@merge(build_report, "report.dir/summary.tsv")
def summarise_reports(infiles, outfile):
    """
    Merge the reports into one table
    """

    rows = []
    for infile in sorted(infiles):
        with iotools.open_file(infile) as inf:
            report = json.load(inf)
        features = report.get("features") or {}
        rows.append({
            "name": os.path.basename(infile)[:-len(".json")],
            "model": report["name"],
            "regime": report["regime"]["regime"],
            "t_star": report["regime"]["t_star"],
            "dim": report["regime"]["dim_estimate"],
            "alpha_star": features.get("alpha_star"),
            "alpha_max_at": features.get("alpha_max_at"),
            "L_max": features.get("L_max"),
            "asymptote": features.get("asymptote"),
            "inflections": len(features.get("inflections") or []),
            "failed_checks": sum(not c["passed"] for c in report["checks"]),
        })

    E.info("summarised %i reports" % len(rows))
    df = pd.DataFrame(rows)
    with iotools.open_file(outfile, "w") as outf:
        df.to_csv(outf, sep="\t", index=False, na_rep="NA")


@follows(summarise_reports)
def full():
    pass


def main(argv=None):
    if argv is None:
        argv = sys.argv
    # cgatcore's P.main parses sys.argv unless the pipeline is
    # initialised first, so hand it the argv we were given
    P.initialize(argv=argv, caller=__file__)
    P.main(argv)


if __name__ == "__main__":
    sys.exit(P.main(sys.argv))
