'''
shift_check.py - symbolic coding of a parabolic map
===================================================

:Tags: Python

Purpose
-------

Compares the periodic points of an N-branch map with parabolic branch 1
with the closed paths of the (N-2)-renewal shift.  All periodic words
up to ``--depth`` are checked in both directions; the report lists any
mismatch.

Usage
-----

Example::

   thermokit shift-check --map renyi.map.json --branches 3 --depth 4

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.add_argument("--branches", dest="N", type=int,
                        help="number of branches of the truncation")

    parser.add_argument("--depth", dest="depth", type=int,
                        help="longest period checked")

    parser.set_defaults(format="json")

    args = E.start(parser, argv=argv)

    status = cli.execute("shift-check", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
