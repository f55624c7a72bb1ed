'''
thermokit.py - thermodynamic formalism for interval maps
========================================================

Pressure functions, Lyapunov spectra and symbolic models of interval
maps with countably many branches and possibly a parabolic fixed point.

For this message and a list of available commands type::

    thermokit --help

To run a command type::

    thermokit <command> [command options]

To get help for a command, type::

    thermokit <command> --help

The batch workflow over a directory of map descriptors runs as::

    thermokit pipeline report make full
'''

import glob
import importlib
import os
import sys

import thermokit.tools


def commands():
    path = os.path.dirname(thermokit.tools.__file__)
    names = [os.path.basename(x)[:-len(".py")] for x in glob.glob(os.path.join(path, "*.py"))]
    return sorted(x.replace("_", "-") for x in names if not x.startswith("_"))


def pipelines():
    path = os.path.dirname(os.path.dirname(thermokit.tools.__file__))
    return sorted(os.path.basename(x)[len("pipeline_"):-len(".py")]
                  for x in glob.glob(os.path.join(path, "pipeline_*.py")))


def main(argv=None):
    if argv is None:
        argv = sys.argv

    if len(argv) == 1 or argv[1] in ("--help", "-h"):
        print(globals()["__doc__"])
        print("The list of available commands is:\n")
        print("{}\n".format("  ".join(commands())))
        print("The list of available pipelines is:\n")
        print("{}\n".format("  ".join(pipelines())))
        return 0

    command = argv[1]
    if command == "pipeline":
        if len(argv) < 3 or argv[2] not in pipelines():
            print("please select a pipeline from: {}".format("  ".join(pipelines())))
            return 2
        module = importlib.import_module("thermokit.pipeline_{}".format(argv[2]))
        return module.main(argv[2:])

    if command not in commands():
        print("unknown command '{}', choose from: {}".format(command, "  ".join(commands())))
        return 2

    module = importlib.import_module("thermokit.tools.{}".format(command.replace("-", "_")))
    return module.main(argv[1:])


if __name__ == "__main__":
    sys.exit(main())
