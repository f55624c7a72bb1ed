'''
validate_map.py - structural checks of a map descriptor
=======================================================

:Tags: Python

Purpose
-------

Checks that every branch is full and monotone, that the inverse
branches invert, that some iterate expands uniformly away from a
parabolic point, and fits the growth exponent of the branch slopes.
The distortion sequence over cylinders of increasing length is
reported as well.  Failures are written to the report, the tool itself
succeeds.

Usage
-----

Example::

   thermokit validate-map --map custom.map.json --format json

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    parser.add_argument("--depth", dest="depth", type=int,
                        help="longest cylinder words for the distortion sequence")

    parser.set_defaults(format="json")

    args = E.start(parser, argv=argv)

    status = cli.execute("validate-map", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
