'''
gurevich.py - Gurevich pressure of renewal type shifts
======================================================

:Tags: Python

Purpose
-------

Estimates the Gurevich pressure of the renewal, N-renewal or
infinite-renewal shift with a constant potential from cycle sums
through a base vertex.  The shift is cut to the vertices below each of
the given caps; the output lists the estimate for every cycle length
and cap.

Usage
-----

Example::

   thermokit gurevich --rule n_renewal --rule-N 2 --caps 10,20,40

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.add_argument("--rule", dest="rule", type=str,
                        choices=("renewal", "n_renewal", "infinite_renewal"),
                        help="transition rule")

    parser.add_argument("--rule-N", dest="rule_N", type=int,
                        help="block size parameter of n_renewal")

    parser.add_argument("--caps", dest="caps", type=str,
                        help="comma separated vertex caps")

    parser.add_argument("--base", dest="base", type=int,
                        help="base vertex of the cycle sums")

    parser.add_argument("--n-max", dest="n_max", type=int,
                        help="longest cycle length")

    parser.add_argument("--potential", dest="potential", type=float,
                        help="constant potential")

    args = E.start(parser, argv=argv)

    status = cli.execute("gurevich", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
