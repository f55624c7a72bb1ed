"""cli.py - run configurations shared by the command line tools
=============================================================

Every tool in :mod:`thermokit.tools` parses its options with
``cgatcore.experiment`` and hands them to :func:`execute`, which builds a
validated :class:`RunConfig` and calls :func:`run`.  :func:`run` computes
the requested artifact, writes it and returns the exit status:

== ==========================================================
0  success
2  configuration error (bad knobs, unknown map family, ...)
3  numeric non-convergence; artifacts are written with flags
4  word or branch budget exceeded
== ==========================================================
"""

import dataclasses
import json
import logging
from typing import Optional

import numpy as np
import pandas as pd

import cgatcore.iotools as iotools

from thermokit import induced, maps, orbits, output, report, symbolic
from thermokit import pressure as pr
from thermokit import spectrum as sp
from thermokit.config import overrides
from thermokit.errors import ConfigError, NonConvergence, ThermokitError

L = logging.getLogger(__name__)

COMMANDS = ("pressure-curve", "spectrum", "inflection", "validate-map", "gurevich",
            "shift-check", "orbit-stats", "cf", "report")

NEEDS_MAP = {"pressure-curve", "spectrum", "inflection", "validate-map", "shift-check",
             "orbit-stats", "report"}

# commands whose artifact is always JSON
JSON_ONLY = {"shift-check", "report"}


def parse_grid(text):
    """'a:b:n' -> (a, b, n)."""
    if isinstance(text, (tuple, list)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError("grid '%s' is not of the form a:b:n" % (text,))
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("grid '%s' is not of the form a:b:n" % (text,))
    if not a < b or n < 2:
        raise ConfigError("grid '%s' needs a < b and at least two points" % (text,))
    return a, b, n


def parse_list(text, cast=int):
    if isinstance(text, (tuple, list)):
        values = list(text)
    else:
        values = [x for x in str(text).split(",") if x.strip()]
    try:
        return tuple(cast(x) for x in values)
    except ValueError:
        raise ConfigError("could not parse list '%s'" % (text,))


@dataclasses.dataclass
class RunConfig:
    command: str
    map: Optional[dict] = None
    out: Optional[str] = None
    format: str = "csv"
    t_grid: Optional[tuple] = None
    alpha_grid: Optional[tuple] = None
    truncations: Optional[tuple] = None
    depth_cap: Optional[int] = None
    tol: Optional[float] = None
    seed: int = 0
    method: Optional[str] = None
    N: Optional[int] = None
    depth: int = 4
    count: int = 1000
    n: int = 10000
    x: Optional[str] = None
    kind: str = "regular"
    rule: str = "renewal"
    rule_N: Optional[int] = None
    caps: tuple = (10, 20, 40)
    base: int = 0
    n_max: Optional[int] = None
    potential: float = 0.0
    dump_scheme: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError("unknown command '%s', choose from %s" % (self.command, ", ".join(COMMANDS)))
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json, got '%s'" % self.format)
        if self.method not in (None, "cylinder", "induced"):
            raise ConfigError("method must be cylinder or induced, got '%s'" % self.method)
        if self.command in NEEDS_MAP and self.map is None:
            raise ConfigError("%s needs a map descriptor (--map)" % self.command)
        if self.map is not None:
            maps.from_descriptor(self.map)
        if self.t_grid is not None:
            self.t_grid = parse_grid(self.t_grid)
        if self.alpha_grid is not None:
            self.alpha_grid = parse_grid(self.alpha_grid)
            if self.alpha_grid[0] <= 0:
                raise ConfigError("alpha grid must be positive")
        if self.truncations is not None:
            self.truncations = parse_list(self.truncations)
            if any(N < 2 for N in self.truncations) or list(self.truncations) != sorted(set(self.truncations)):
                raise ConfigError("truncations must be increasing integers >= 2")
        if self.depth_cap is not None and not 1 <= self.depth_cap <= 40:
            raise ConfigError("depth cap must lie in 1..40, got %s" % self.depth_cap)
        if self.tol is not None and not 0 < self.tol < 1:
            raise ConfigError("tolerance must lie in (0, 1), got %s" % self.tol)
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.N is not None and self.N < 2:
            raise ConfigError("N must be at least 2, got %s" % self.N)
        if not 1 <= self.depth <= 8:
            raise ConfigError("depth must lie in 1..8, got %s" % self.depth)
        if self.count < 1 or self.n < 1:
            raise ConfigError("count and n must be positive")
        if self.kind not in ("regular", "backward"):
            raise ConfigError("kind must be regular or backward, got '%s'" % self.kind)
        self.caps = parse_list(self.caps)
        if not self.caps or any(c < 1 for c in self.caps):
            raise ConfigError("vertex caps must be positive integers")
        if self.command == "cf" and self.x is None:
            raise ConfigError("cf needs a value (--x)")

    @classmethod
    def from_dict(cls, values):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ConfigError("unknown configuration fields: %s" % ", ".join(sorted(unknown)))
        return cls(**values)

    def model(self):
        return maps.from_descriptor(self.map)

    def param_overrides(self):
        values = {}
        if self.depth_cap is not None:
            values["depth_cap"] = self.depth_cap
        if self.tol is not None:
            values["tol"] = self.tol
        if self.truncations is not None:
            values["truncations"] = list(self.truncations)
        return {"pressure": values} if values else {}

    def grid(self, which):
        value = getattr(self, which)
        if value is None:
            return None
        a, b, n = value
        return np.linspace(a, b, n)


def read_descriptor(filename):
    try:
        with iotools.open_file(filename) as inf:
            return json.load(inf)
    except OSError as msg:
        raise ConfigError("could not read map descriptor %s: %s" % (filename, msg))
    except ValueError as msg:
        raise ConfigError("could not parse map descriptor %s: %s" % (filename, msg))


def add_common_arguments(parser):
    parser.add_argument("--map", dest="map", type=str,
                        help="JSON map descriptor")
    parser.add_argument("--out", dest="out", type=str,
                        help="output file, stdout if not given")
    parser.add_argument("--format", dest="format", choices=("csv", "json"),
                        help="artifact format")
    parser.add_argument("--t-grid", dest="t_grid", type=str,
                        help="t grid as a:b:n")
    parser.add_argument("--alpha-grid", dest="alpha_grid", type=str,
                        help="alpha grid as a:b:n")
    parser.add_argument("--truncations", dest="truncations", type=str,
                        help="comma separated truncation schedule")
    parser.add_argument("--depth-cap", dest="depth_cap", type=int,
                        help="deepest word length")
    parser.add_argument("--tol", dest="tol", type=float,
                        help="extrapolation tolerance")
    parser.add_argument("--seed", dest="seed", type=int,
                        help="random seed")
    parser.add_argument("--method", dest="method", choices=("cylinder", "induced"),
                        help="pressure route for parabolic maps")
    return parser


def config_from_args(command, args):
    names = {f.name for f in dataclasses.fields(RunConfig)} - {"command", "map"}
    values = {k: v for k, v in vars(args).items() if k in names and v is not None}
    if getattr(args, "map", None):
        values["map"] = read_descriptor(args.map)
    return RunConfig(command=command, **values)


def execute(command, args):
    """build the configuration of a tool and run it."""
    try:
        config = config_from_args(command, args)
    except ConfigError as msg:
        L.error("ConfigError: %s", msg)
        return msg.exit_code
    return run(config)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def _status(converged):
    return 0 if converged else NonConvergence.exit_code


def _pressure_curve(config):
    model = config.model()
    t_grid = config.grid("t_grid")
    if t_grid is None:
        t_grid = pr.default_t_grid(model)
    if config.N is not None:
        curve = pr.pressure_curve(model, t_grid, N=config.N)
        frame = curve.to_frame()
    else:
        curve = pr.pressure_curve(model, t_grid, method=config.method)
        frame = curve.to_frame()
        if config.truncations:
            frames = [frame] + [pr.pressure_curve(model, t_grid, N=N).to_frame()
                                for N in config.truncations]
            frame = pd.concat(frames, ignore_index=True)
    if config.format == "json":
        output.write_json({"meta": curve.meta, "curve": frame}, config.out, "pressure-curve")
    else:
        output.write_csv(frame, config.out, "pressure-curve")
    if config.dump_scheme:
        output.write_csv(induced.dump_scheme(induced.get_scheme(model)),
                         config.dump_scheme, "induced-scheme")
    return _status(curve.meta["converged"])


def _spectrum_parts(config):
    model = config.model()
    t_grid = config.grid("t_grid")
    if t_grid is None:
        t_grid = pr.default_t_grid(model)
    curve = pr.pressure_curve(model, t_grid, method=config.method)
    alpha_grid = config.grid("alpha_grid")
    if alpha_grid is None:
        alpha_grid = sp.default_alpha_grid(sp.alpha_min(model))
    spectrum = sp.legendre_spectrum(curve, alpha_grid)
    return model, curve, spectrum, sp.features(curve, spectrum, model)


def _spectrum(config):
    _, curve, spectrum, features = _spectrum_parts(config)
    frame = spectrum.to_frame()
    if config.format == "json":
        output.write_json({"features": features, "spectrum": frame,
                           "meta": spectrum.meta}, config.out, "spectrum")
    else:
        output.write_csv(frame, config.out, "spectrum")
    return _status(curve.meta["converged"])


def _inflection(config):
    _, curve, spectrum, features = _spectrum_parts(config)
    frame = pd.DataFrame({
        "alpha": features.inflections,
        "alpha_star": features.alpha_star,
        "above_alpha_star": [a > features.alpha_star for a in features.inflections],
        "complete": features.inflections_complete,
    }, columns=["alpha", "alpha_star", "above_alpha_star", "complete"])
    if config.format == "json":
        output.write_json({"features": features, "inflections": frame}, config.out, "inflection")
    else:
        output.write_csv(frame, config.out, "inflection")
    return _status(curve.meta["converged"])


def _validate_map(config):
    result = maps.validate(config.model(), depth=config.depth)
    if config.format == "csv":
        d = result.as_dict()
        d["distortion"] = ";".join("%.6g" % x for x in d["distortion"])
        output.write_csv(pd.DataFrame([d]), config.out, "validate-map")
    else:
        output.write_json(result, config.out, "validate-map")
    return 0


def _gurevich(config):
    rule = symbolic.build_rule(config.rule, config.rule_N)
    phi = symbolic.CyclePotential.constant(config.potential)
    frames = [symbolic.gurevich_pressure(rule, phi, config.base, config.n_max, cap).to_frame()
              for cap in sorted(config.caps)]
    frame = pd.concat(frames, ignore_index=True)
    if config.format == "json":
        _, monotone = symbolic.gurevich_by_cap(rule, config.caps, phi, config.base, config.n_max)
        output.write_json({"rule": rule.describe(), "estimates": frame,
                           "monotone_in_cap": monotone}, config.out, "gurevich")
    else:
        output.write_csv(frame, config.out, "gurevich")
    return 0


def _shift_check(config):
    model = config.model()
    N = config.N or model.branch_count or 2
    result = symbolic.itinerary_conjugacy_check(model, N, config.depth)
    output.write_json(result, config.out, "shift-check")
    return 0


def _orbit_stats(config):
    samples = orbits.sample_lyapunov(config.model(), config.count, config.n, config.seed)
    frame = orbits.samples_frame(samples)
    if config.format == "json":
        output.write_json({"samples": frame, "median": float(frame["lambda_hat"].median())},
                          config.out, "orbit-stats")
    else:
        output.write_csv(frame, config.out, "orbit-stats")
    return 0


def _cf(config):
    expansion = orbits.cf_expand(config.x, config.n, config.kind)
    frame = pd.DataFrame({"k": np.arange(1, len(expansion) + 1), "digit": expansion.digits})
    if config.kind == "regular" and len(expansion):
        pairs = orbits.approximants(expansion.digits)
        frame["p"] = [str(p) for p, _ in pairs]
        frame["q"] = [str(q) for _, q in pairs]
    if config.format == "json":
        output.write_json({"expansion": expansion, "table": frame}, config.out, "cf")
    else:
        output.write_csv(frame, config.out, "cf")
    return 0


def _report(config):
    model = config.model()
    result = report.build_report(model, t_grid=config.grid("t_grid"),
                                 alpha_grid=config.grid("alpha_grid"), method=config.method)
    output.write_json(result, config.out, "report")
    return 0


def write_failure(config, error):
    """artifact of a run stopped by non-convergence, flagged converged=False."""
    if config.format == "json" or config.command in JSON_ONLY:
        output.write_json({"command": config.command, "converged": False,
                           "error": str(error), "map": config.map}, config.out, config.command)
    else:
        frame = pd.DataFrame({"command": [config.command], "converged": [False],
                              "error": [str(error)]})
        output.write_csv(frame, config.out, config.command)


HANDLERS = {
    "pressure-curve": _pressure_curve,
    "spectrum": _spectrum,
    "inflection": _inflection,
    "validate-map": _validate_map,
    "gurevich": _gurevich,
    "shift-check": _shift_check,
    "orbit-stats": _orbit_stats,
    "cf": _cf,
    "report": _report,
}


def run(config):
    """write the artifacts of ``config``; returns the exit status."""
    if isinstance(config, dict):
        try:
            config = RunConfig.from_dict(config)
        except ConfigError as msg:
            L.error("ConfigError: %s", msg)
            return msg.exit_code
    try:
        with overrides(config.param_overrides()):
            status = HANDLERS[config.command](config)
    except NonConvergence as msg:
        L.error("NonConvergence: %s", msg)
        write_failure(config, msg)
        return msg.exit_code
    except ThermokitError as msg:
        L.error("%s: %s", type(msg).__name__, msg)
        return msg.exit_code
    if status:
        L.warning("%s finished with non-converged values (exit %i)", config.command, status)
    return status
