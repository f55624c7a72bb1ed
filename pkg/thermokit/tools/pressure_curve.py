'''
pressure_curve.py - sample the pressure function of a map
=========================================================

:Tags: Python

Purpose
-------

Samples t -> P(-t log|T'|) on a grid of t values and writes one row per
grid point with the estimate, its bracket, the error estimate and the
word length reached.  Values below the critical exponent are written as
``inf``.

With ``--branches`` the N-truncation of the map is sampled instead; with
``--truncations`` the curves of all listed truncations are appended to
the full curve, distinguished by the ``N`` column (0 for the full map).

Usage
-----

Example::

   thermokit pressure-curve --map gauss.map.json --t-grid 0.6:3:25 --out gauss.pressure.csv

Command line options
--------------------

--map           JSON map descriptor
--t-grid        grid a:b:n, defaults to a geometric grid above t*
--branches      sample the N-truncation
--truncations   comma separated list of truncations to append
--method        cylinder or induced (parabolic maps)
--dump-scheme   also write the inducing scheme branches to this file

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
                        help="sample the truncation to this many branches")

    parser.add_argument("--dump-scheme", dest="dump_scheme", type=str,
                        help="write the inducing scheme of a parabolic map to this file")

    args = E.start(parser, argv=argv)

    status = cli.execute("pressure-curve", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
