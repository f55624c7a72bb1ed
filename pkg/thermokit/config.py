"""config.py - numeric defaults and user overrides
=================================================

Defaults are read from ``defaults.yml`` next to this module.  A user
file overrides them key by key; it is looked up in this order:

* the file named by the ``THERMOKIT_CONFIG`` environment variable
* ``thermokit.yml`` in the current working directory

``THERMOKIT_THREADS`` caps the number of worker threads.
"""

import contextlib
import copy
import json
import logging
import os

import yaml

import cgatcore.iotools as iotools

from thermokit.errors import ConfigError

L = logging.getLogger(__name__)

DEFAULTS = os.path.join(os.path.dirname(__file__), "defaults.yml")

_PARAMS = None


def _merge(base, update, prefix=""):
    for key, value in update.items():
        if key not in base:
            raise ConfigError("unknown configuration key '%s%s'" % (prefix, key))
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(
                    "configuration section '%s%s' must be a mapping" % (prefix, key))
            _merge(base[key], value, prefix="%s%s." % (prefix, key))
        else:
            base[key] = value
    return base


def load(filename):
    with iotools.open_file(filename) as inf:
        data = yaml.safe_load(inf)
    return data or {}


def user_config_file():
    filename = os.environ.get("THERMOKIT_CONFIG")
    if filename:
        if not os.path.exists(filename):
            raise ConfigError("THERMOKIT_CONFIG points to missing file %s" % filename)
        return filename
    if os.path.exists("thermokit.yml"):
        return "thermokit.yml"
    return None


def get_params(reload=False):
    """return the merged configuration as a nested dictionary.

    The result is a deep copy; callers may modify it freely.
    """
    global _PARAMS
    if _PARAMS is None or reload:
        params = load(DEFAULTS)
        filename = user_config_file()
        if filename:
            L.debug("reading configuration overrides from %s", filename)
            _merge(params, load(filename))
        _PARAMS = params
    return copy.deepcopy(_PARAMS)


def fingerprint():
    """hashable digest of the current parameters.

    Results cached per model are keyed on it as well, so that values
    computed inside :func:`overrides` do not outlive the block.
    """
    get_params()
    return json.dumps(_PARAMS, sort_keys=True)


def update_params(params, overrides):
    """apply a nested dictionary of overrides to ``params``."""
    return _merge(params, overrides)


def worker_count():
    value = os.environ.get("THERMOKIT_THREADS")
    if not value:
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError("THERMOKIT_THREADS must be an integer, got '%s'" % value)
    if threads < 1:
        raise ConfigError("THERMOKIT_THREADS must be positive, got %i" % threads)
    return threads


@contextlib.contextmanager
def overrides(values):
    """apply ``values`` on top of the current parameters inside a block."""
    global _PARAMS
    saved = get_params()
    _PARAMS = _merge(copy.deepcopy(saved), values or {})
    try:
        yield get_params()
    finally:
        _PARAMS = saved
