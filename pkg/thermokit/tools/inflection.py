'''
inflection.py - inflection points of the Lyapunov spectrum
==========================================================

:Tags: Python

Purpose
-------

Locates the sign changes of the curvature residual of L(alpha) and
reports each inflection point together with the alpha* estimate.

Usage
-----

Example::

   thermokit inflection --map gauss.map.json

'''

import sys

import cgatcore.experiment as E

from thermokit import cli


def main(argv=None):
    if argv is None:
        argv = sys.argv

    parser = E.ArgumentParser(description=__doc__)
    cli.add_common_arguments(parser)

    args = E.start(parser, argv=argv)

    status = cli.execute("inflection", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
