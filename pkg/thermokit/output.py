"""output.py - CSV and JSON artifacts
===================================

CSV artifacts start with a comment line naming the artifact and its
schema version::

    # thermokit pressure-curve schema 1

followed by a pandas table; non-finite values are written as ``inf`` and
``nan``.  JSON artifacts are dumped with sorted keys and carry
``schema_version``.  JSON has no infinities, so non-finite numbers are
written as ``null`` and listed under ``nonfinite`` by their key path.
"""

import dataclasses
import json
import math
import sys

import numpy as np
import pandas as pd

import cgatcore.iotools as iotools

SCHEMA_VERSION = 1

# per-artifact CSV schema versions
SCHEMAS = {
    "pressure-curve": 1,
    "spectrum": 1,
    "inflection": 1,
    "gurevich": 1,
    "orbit-stats": 1,
    "cf": 1,
    "induced-scheme": 1,
    "summary": 1,
}


def header(artifact):
    return "# thermokit %s schema %i\n" % (artifact, SCHEMAS.get(artifact, SCHEMA_VERSION))


def _open(filename):
    if filename is None or filename == "-":
        return sys.stdout, False
    return iotools.open_file(filename, "w"), True


def write_csv(frame, filename, artifact):
    outf, close = _open(filename)
    try:
        outf.write(header(artifact))
        frame.to_csv(outf, index=False, na_rep="nan", float_format="%.12g")
    finally:
        if close:
            outf.close()


def read_csv(filename):
    """read a CSV artifact back, skipping the schema comment."""
    with iotools.open_file(filename) as inf:
        first = inf.readline()
        if not first.startswith("# thermokit"):
            raise ValueError("%s is not a thermokit artifact" % filename)
        return pd.read_csv(inf)


def to_plain(obj, path="", nonfinite=None):
    """JSON-ready copy of ``obj``; non-finite floats become ``None``."""
    if nonfinite is None:
        nonfinite = {}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.as_dict() if hasattr(obj, "as_dict") else dataclasses.asdict(obj)
    if isinstance(obj, pd.DataFrame):
        obj = {"columns": list(obj.columns), "rows": obj.to_dict(orient="records")}
    if isinstance(obj, dict):
        return {str(k): to_plain(v, "%s.%s" % (path, k) if path else str(k), nonfinite)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v, "%s[%i]" % (path, i), nonfinite) for i, v in enumerate(obj)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            nonfinite[path] = repr(value)
            return None
        return value
    return obj


def document(payload, artifact):
    nonfinite = {}
    doc = to_plain(payload, nonfinite=nonfinite)
    if not isinstance(doc, dict):
        doc = {"data": doc}
    doc["artifact"] = artifact
    doc["schema_version"] = SCHEMA_VERSION
    if nonfinite:
        doc["nonfinite"] = nonfinite
    return doc


def write_json(payload, filename, artifact):
    outf, close = _open(filename)
    try:
        json.dump(document(payload, artifact), outf, sort_keys=True, indent=2)
        outf.write("\n")
    finally:
        if close:
            outf.close()


def write_artifact(payload, filename, artifact, fmt="csv"):
    """write a DataFrame as CSV or JSON, or any other payload as JSON."""
    if fmt == "csv" and isinstance(payload, pd.DataFrame):
        write_csv(payload, filename, artifact)
    else:
        write_json(payload, filename, artifact)
