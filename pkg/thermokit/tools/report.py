'''
report.py - full battery for one map
====================================

:Tags: Python

Purpose
-------

Runs regime classification, the pressure curve, the Lyapunov spectrum
and its features for a map and writes a single JSON document with the
results and the family checks (value, target, tolerance, verdict).

Usage
-----

Example::

   thermokit report --map gauss.map.json --out gauss.report.json

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.set_defaults(format="json")

    args = E.start(parser, argv=argv)

    status = cli.execute("report", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
