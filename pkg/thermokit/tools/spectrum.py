'''
spectrum.py - Lyapunov spectrum of a map
========================================

:Tags: Python

Purpose
-------

Computes the pressure curve of a map and its Legendre transform
L(alpha) on a grid of Lyapunov exponents.  Each row carries t_alpha,
the curvature residual, the entropy alpha L(alpha) and the derivative
L'(alpha).  Flags mark alpha values where L is pinned to the dimension
(parabolic maps below alpha*) or absent (outside the domain or beyond
the sampled t range).

The JSON format adds the spectrum features: alpha*, alpha_min, the
maximum, the asymptote and the inflection points.

Usage
-----

Example::

   thermokit spectrum --map renyi.map.json --alpha-grid 0.01:40:80 --format json

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

    status = cli.execute("spectrum", args)

    E.stop()
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
