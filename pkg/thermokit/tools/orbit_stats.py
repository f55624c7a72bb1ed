'''
orbit_stats.py - Birkhoff averages of log|T'|
=============================================

:Tags: Python

Purpose
-------

Draws ``--count`` uniform starting points with the given seed and
writes (1/n) log|(T^n)'(x0)| for each.  Orbits that leave the domain
numerically are flagged as escaped.

Usage
-----

Example::

   thermokit orbit-stats --map gauss.map.json --count 1000 --n 10000 --seed 1

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.add_argument("--count", dest="count", type=int,
                        help="number of starting points")

    parser.add_argument("--n", dest="n", type=int,
                        help="number of iterations")

    args = E.start(parser, argv=argv)

    status = cli.execute("orbit-stats", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
