"""errors.py - exception hierarchy shared by the library and the tools.

Divergent pressures are not errors: they are carried as the
:data:`thermokit.pressure.DIVERGENT` sentinel.  Exceptions are reserved
for invalid input and exhausted budgets, and each maps onto one exit
code of the command line tools.
"""


class ThermokitError(Exception):
    """base class of all thermokit errors."""

    exit_code = 1


class ConfigError(ThermokitError, ValueError):
    """invalid parameters, descriptors or command line knobs."""

    exit_code = 2


class NonConvergence(ThermokitError):
    """a root or limit could not be bracketed within the enumerated budget."""

    exit_code = 3


class BudgetExceeded(ThermokitError):
    """an enumeration would exceed the configured word or branch budget."""

    exit_code = 4
