"""thermokit - numerical thermodynamic formalism for full-branch interval maps."""

from thermokit.version import __version__  # noqa: F401
