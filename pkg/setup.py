import sys
import os
import setuptools
from setuptools import setup, find_packages

if int(setuptools.__version__.split(".")[0]) < 40:
    print("Version detected:", setuptools.__version__)
    raise ImportError(
        "thermokit requires setuptools 40 or higher")

########################################################################
########################################################################
# collect version
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "thermokit"))
import version

version = version.__version__

###############################################################
###############################################################
# Define dependencies
#
major, minor1, minor2, s, tmp = sys.version_info

if major < 3:
    raise SystemExit("""Requires Python 3 or later.""")

thermokit_packages = find_packages(exclude=["tests"])
thermokit_package_dirs = {'thermokit': 'thermokit'}

install_requires = [
    "cgatcore",
    "ruffus",
    "numpy",
    "scipy",
    "pandas",
    "statsmodels",
    "mpmath",
    "pyyaml",
]

##########################################################
##########################################################
# Classifiers
classifiers = """
Development Status :: 3 - Alpha
Intended Audience :: Science/Research
Intended Audience :: Developers
License :: OSI Approved
Programming Language :: Python
Topic :: Scientific/Engineering :: Mathematics
Operating System :: POSIX
Operating System :: Unix
Operating System :: MacOS
"""

setup(
    # package information
    name='thermokit',
    version=version,
    description='thermokit : thermodynamic formalism for interval maps',
    license="MIT",
    platforms=["any"],
    keywords="dynamical systems, thermodynamic formalism, multifractal analysis",
    long_description='thermokit : pressure functions, Lyapunov spectra and '
                     'countable Markov shifts for interval maps',
    classifiers=[_f for _f in classifiers.split("\n") if _f],
    url="",
    # package contents
    packages=thermokit_packages,
    package_dir=thermokit_package_dirs,
    package_data={
        "thermokit": ["defaults.yml", "data/*.json", "pipeline_report/*.yml"],
    },
    include_package_data=True,
    install_requires=install_requires,
    extras_require={"test": ["pytest", "pycodestyle"]},
    entry_points={
        "console_scripts": ["thermokit = thermokit.entry:main"]
    },
    # other options
    zip_safe=False,
    test_suite="tests",
)
