'''
cf.py - continued fraction digits
=================================

:Tags: Python

Purpose
-------

Prints the regular (Gauss) or backward (Renyi) continued fraction
digits of a number in (0, 1) and, for regular expansions, the
approximants p_k/q_k.  ``--x`` takes a decimal string or one of the
names golden, inv_pi, inv_e and sqrt2.

Usage
-----

Example::

   thermokit cf --x inv_pi --n 5

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.add_argument("--x", dest="x", type=str,
                        help="number to expand")

    parser.add_argument("--n", dest="n", type=int,
                        help="number of digits")

    parser.add_argument("--kind", dest="kind", choices=("regular", "backward"),
                        help="expansion type")

    parser.set_defaults(n=20)

    args = E.start(parser, argv=argv)

    status = cli.execute("cf", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
