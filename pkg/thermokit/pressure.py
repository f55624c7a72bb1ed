"""pressure.py - topological pressure of the geometric potential
===============================================================

Computes P(t) = P(-t log|T'|) from cylinder sums.

* :func:`pressure_cylinder` sums one word length of a truncation
* :func:`pressure_truncated` extrapolates over word length
* :func:`pressure` evaluates the full model: tail-closed truncations for
  expanding maps, the inducing scheme between t* and the dimension for
  parabolic maps, 0 beyond the dimension and :data:`DIVERGENT` below t*
* :func:`classify_regime` locates t*, the Bowen root and the corner of
  the pressure at the root

Divergence is carried by the :data:`DIVERGENT` sentinel, never by
floating point overflow.
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
import scipy.interpolate
import scipy.optimize
import statsmodels.api as sm
from scipy.special import logsumexp

from thermokit import maps
from thermokit.config import fingerprint, get_params, worker_count
from thermokit.errors import ConfigError, NonConvergence

L = logging.getLogger(__name__)

DIVERGENT = math.inf

# t closer than this to t* counts as t* for degenerate models
DEGENERATE_SLACK = 1e-6


def is_divergent(value):
    return value == DIVERGENT


class Bracket(NamedTuple):
    lower: float
    upper: float
    central: float


class PressureEstimate(NamedTuple):
    value: float
    lower: float
    upper: float
    error: float
    depth: int
    converged: bool
    method: str

    @classmethod
    def divergent(cls, method="divergent"):
        return cls(DIVERGENT, DIVERGENT, DIVERGENT, 0.0, 0, True, method)

    @classmethod
    def exact(cls, value, method):
        return cls(value, value, value, 0.0, 0, True, method)


# ----------------------------------------------------------------------
# cylinder sums
# ----------------------------------------------------------------------
def _level_bracket(level):
    d = level.depth
    return Bracket(lower=float(logsumexp(level.lower)) / d,
                   upper=float(logsumexp(level.upper)) / d,
                   central=float(logsumexp(level.length)) / d)


def pressure_cylinder(model, t, N, depth, budget=None):
    """bracket of P_N(t) from all words of one length.

    ``lower`` and ``upper`` use the sup and inf of |(T^depth)'| on each
    cylinder, ``central`` the cylinder lengths.
    """
    if depth < 1:
        raise ConfigError("depth must be at least 1, got %s" % depth)
    level = None
    for level in maps.word_levels(model, N, depth, t=t, budget=budget):
        pass
    return _level_bracket(level)


def depth_limit(width, depth_cap, budget):
    if width <= 1:
        return depth_cap
    return max(1, min(depth_cap, int(math.floor(math.log(budget) / math.log(width) + 1e-9))))


def _accelerate(increments):
    """Aitken limit of geometrically converging increments and its error."""
    e = increments
    if len(e) < 2:
        return e[-1], math.inf
    d1 = e[-1] - e[-2]
    if d1 == 0.0:
        return e[-1], 0.0
    if len(e) >= 3:
        d0 = e[-2] - e[-3]
        ratio = d1 / d0 if d0 != 0.0 else 0.0
        if 0.0 < abs(ratio) < 0.9:
            tail = d1 * ratio / (1.0 - ratio)
            return e[-1] + tail, abs(tail) + abs(d1) * abs(ratio) ** 2
    return e[-1], abs(d1)


def _extrapolate(levels, tol, method):
    """Richardson over word length on e_d = log Z_d - log Z_{d-1}.

    Z_d sums cylinder lengths to the power t; the increments converge
    geometrically and are accelerated once three are available.
    """
    previous_sum = 0.0
    increments = []
    value, error = math.nan, math.inf
    bracket = None
    converged = False
    depth = 0
    for level in levels:
        depth = level.depth
        total = float(logsumexp(level.length))
        increments.append(total - previous_sum)
        previous_sum = total
        bracket = _level_bracket(level)
        value, error = _accelerate(increments)
        if error < tol:
            converged = True
            break
    return PressureEstimate(value, bracket.lower, bracket.upper, error, depth, converged, method)


def pressure_truncated(model, t, N, tol=None, depth_cap=None, budget=None):
    """P_N(t) for the N-truncation, extrapolated over word length."""
    params = get_params()
    tol = params["pressure"]["tol"] if tol is None else tol
    depth_cap = params["pressure"]["depth_cap"] if depth_cap is None else depth_cap
    budget = params["budget"]["words"] if budget is None else budget

    K = maps.symbol_count(model, N)
    depth = depth_limit(K, depth_cap, budget)
    estimate = _extrapolate(maps.word_levels(model, K, depth, t=t, budget=budget),
                            tol, "cylinder")
    if model.parabolic is not None and estimate.value < 0.0:
        # the parabolic fixed point carries a zero-pressure measure
        estimate = estimate._replace(value=0.0)
    if not estimate.converged:
        L.debug("P_%i(%g) for %s not converged at depth %i (increment %.2g)",
                K, t, model.name, estimate.depth, estimate.error)
    return estimate


def pressure_closed(model, t, params=None):
    """full-model pressure from a truncation closed by an aggregated tail symbol."""
    if params is None:
        params = get_params()
    K = params["pressure"]["closure_branches"]
    budget = params["budget"]["words"]
    depth = depth_limit(K + 1, params["pressure"]["depth_cap"], budget)
    estimate = _extrapolate(
        maps.word_levels(model, K, depth, t=t, tail=True, budget=budget),
        params["pressure"]["tol"], "closure")
    if model.parabolic is not None and estimate.value < 0.0:
        estimate = estimate._replace(value=0.0)
    if not estimate.converged:
        L.debug("closed pressure at t=%g for %s not converged at depth %i (increment %.2g)",
                t, model.name, estimate.depth, estimate.error)
    return estimate


def monotone_within_errors(values, errors, slack=1e-6):
    """whether values indexed by increasing N increase within their error bars.

    Pairs with a non-finite value or error carry no information and are
    skipped.
    """
    ok = True
    pairs = list(zip(values, errors))
    for (v0, e0), (v1, e1) in zip(pairs[:-1], pairs[1:]):
        if not np.all(np.isfinite([v0, v1, e0, e1])):
            continue
        ok &= bool(v1 >= v0 - e0 - e1 - slack)
    return bool(ok)


def _free_exponent_limit(N, values, limit, slope, delta):
    """limit of P - c N^-d with the exponent fitted as well, nan if the fit fails."""
    def tail_model(n, p, c, d):
        return p - c * n ** -d

    try:
        fitted, _ = scipy.optimize.curve_fit(tail_model, N, values, p0=(limit, -slope, delta),
                                             maxfev=4000)
    except (RuntimeError, ValueError):
        return math.nan
    if not np.all(np.isfinite(fitted)) or fitted[2] <= 0.0:
        return math.nan
    return float(fitted[0])


def pressure_extrapolated(model, t, truncations=None, params=None):
    """limit of P_N(t) under the tail model P_N = P - c N^-(gamma t - 1).

    The error combines the standard error of the fitted limit, the
    largest depth-extrapolation error of the truncations and the gap to
    the limit of a fit with a free tail exponent.  Near t* the fixed
    exponent is only asymptotic, so the lower end of the bracket is
    extended down to the largest truncation: P >= P_N for every N.
    """
    if params is None:
        params = get_params()
    if truncations is None:
        truncations = params["pressure"]["truncations"]
    if model.is_finite:
        return pressure_truncated(model, t, model.branch_count)
    if model.growth is None:
        raise ConfigError("%s declares no growth exponent to extrapolate with" % model.name)
    delta = model.growth.gamma * t - 1.0
    if delta <= 0:
        return PressureEstimate.divergent("extrapolated")
    if len(truncations) < 3:
        raise ConfigError("extrapolation needs at least three truncations")

    estimates = [pressure_truncated(model, t, N) for N in truncations]
    values = np.array([e.value for e in estimates])
    errors = np.array([e.error for e in estimates])
    if not monotone_within_errors(values, errors):
        L.warning("truncated pressures of %s at t=%g decrease in N: %s", model.name, t, values)

    N = np.asarray(truncations, dtype=float)
    fit = sm.OLS(values, sm.add_constant(N ** -delta)).fit()
    limit, slope = float(fit.params[0]), float(fit.params[1])
    free = _free_exponent_limit(N, values, limit, slope, delta)
    spread = abs(free - limit) if np.isfinite(free) else abs(slope) * N[-1] ** -delta
    known = np.isfinite(errors)
    error = float(fit.bse[0]) + (float(errors[known].max()) if known.any() else 0.0) + spread

    floor = float(np.max(values[known] - errors[known])) if known.any() else float(values[-1])
    lower = min(limit - error, floor)
    upper = limit + error
    if model.parabolic is not None:
        limit, lower = max(limit, 0.0), max(lower, 0.0)
    error = max(error, limit - lower)
    return PressureEstimate(limit, lower, upper, error,
                            max(e.depth for e in estimates), all(e.converged for e in estimates),
                            "extrapolated")


# ----------------------------------------------------------------------
# critical exponent, Bowen root and regimes
# ----------------------------------------------------------------------
def tail_ratio(model, t):
    """log2 of the dyadic condensation ratio 2 a_2n / a_n far in the tail.

    a_n = sup|T'|^-t on branch n; the 1-cylinder series converges iff the
    ratio is below 1, i.e. the returned value is negative.
    """
    return 1.0 - t * maps.tail_exponent(model)


def critical_t(model):
    """t* below which the pressure is infinite; 0 for finitely many branches."""
    return _critical_t(model, fingerprint())


@lru_cache(maxsize=None)
def _critical_t(model, key):
    if model.is_finite:
        return 0.0
    hi = 8.0
    if tail_ratio(model, hi) >= 0:
        raise NonConvergence("branch tail of %s does not converge for t <= %g" % (model.name, hi))
    return scipy.optimize.brentq(lambda t: tail_ratio(model, t), 0.0, hi, xtol=1e-9)


def _finite(f):
    # brentq needs finite values; divergent pressures count as large positive
    return lambda x: min(f(x), 1e300)


def _root_decreasing(f, lo, hi, tol):
    """root of a decreasing function, treating +inf as positive."""
    while f(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e3:
            raise NonConvergence("no sign change of the pressure below t=%g" % hi)
    return scipy.optimize.brentq(_finite(f), lo, hi, xtol=tol)


def _truncation_root(model):
    K = model.branch_count
    if model.parabolic is None:
        return _root_decreasing(lambda t: pressure_truncated(model, t, K).value, 0.0, 1.0, 1e-10)
    # past its root the truncated pressure is clamped to exactly 0; the
    # root is where it first drops to the extrapolation tolerance
    level = get_params()["pressure"]["tol"]
    return _root_decreasing(lambda t: pressure_truncated(model, t, K).value - level,
                            0.0, 1.0, 1e-10)


def bowen_root(model):
    """smallest root of P(t) = 0."""
    return _bowen_root(model, fingerprint())


@lru_cache(maxsize=None)
def _bowen_root(model, key):
    if model.non_condition5:
        return critical_t(model)
    if model.is_finite:
        return _truncation_root(model)
    if model.parabolic is not None:
        from thermokit import induced
        return induced.bowen_root(induced.get_scheme(model))
    params = get_params()
    lo = critical_t(model) + 2.0 * params["pressure"]["critical_band"]
    return _root_decreasing(lambda t: pressure_closed(model, t, params).value,
                            lo, 1.0, 1e-8)


def pressure_estimate(model, t, method=None, params=None):
    """P(t) for the full model with its error metadata."""
    if params is None:
        params = get_params()
    if model.is_finite:
        return pressure_truncated(model, t, model.branch_count)

    t_star = critical_t(model)
    if model.non_condition5:
        if t < t_star - DEGENERATE_SLACK:
            return PressureEstimate.divergent()
        return PressureEstimate.exact(0.0, "degenerate")

    band = params["pressure"]["critical_band"]
    if t < t_star:
        return PressureEstimate.divergent()
    if t < t_star + band:
        L.warning("t=%g lies within %g of t*=%g for %s, reported as divergent",
                  t, band, t_star, model.name)
        return PressureEstimate.divergent("ambiguous")

    if model.parabolic is None:
        if method == "induced":
            raise ConfigError("the induced route needs a parabolic map, %s has none" % model.name)
        return pressure_closed(model, t, params)

    dim = bowen_root(model)
    if t >= dim:
        return PressureEstimate.exact(0.0, "zero")
    if method == "cylinder":
        return pressure_closed(model, t, params)
    from thermokit import induced
    return induced.induced_estimate(induced.get_scheme(model), t, params["induced"]["tol"])


def pressure(model, t, method=None):
    """P(-t log|T'|), :data:`DIVERGENT` below the critical exponent."""
    return pressure_estimate(model, t, method).value


def default_method(model):
    if model.parabolic is not None and not model.is_finite and not model.non_condition5:
        return "induced"
    return "cylinder"


@dataclasses.dataclass
class RegimeReport:
    t_star: float
    dim_estimate: float
    regime: str
    differentiable_at_dim: bool
    confidence: float
    left_derivative: Optional[float] = None

    def as_dict(self):
        return dataclasses.asdict(self)


def left_slope(model):
    """left derivative of P at the Bowen root, ``None`` when not defined."""
    if model.non_condition5:
        return None
    dim = bowen_root(model)
    if model.parabolic is not None and not model.is_finite:
        from thermokit import induced
        return induced.return_time_slope(induced.get_scheme(model), dim)
    h = get_params()["pressure"]["derivative_step"]
    return (pressure(model, dim + h) - pressure(model, dim - h)) / (2.0 * h)


def classify_regime(model):
    params = get_params()["pressure"]
    t_star = critical_t(model)
    if model.non_condition5:
        return RegimeReport(t_star, t_star, "degenerate", False, 1.0)

    dim = bowen_root(model)
    slope = left_slope(model)
    if model.parabolic is None or model.is_finite:
        return RegimeReport(t_star, dim, "gauss_like", True, 1.0, slope)

    gap = abs(slope)
    threshold = params["gap_threshold"]
    confidence = min(1.0, abs(gap - threshold) / threshold)
    if gap > threshold:
        return RegimeReport(t_star, dim, "infinite_mp_like", False, confidence, slope)
    return RegimeReport(t_star, dim, "renyi_like", True, confidence, slope)


# ----------------------------------------------------------------------
# curves
# ----------------------------------------------------------------------
@dataclasses.dataclass
class PressureCurve:
    t_grid: np.ndarray
    values: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    errors: np.ndarray
    depths: np.ndarray
    meta: dict
    converged: Optional[np.ndarray] = None

    def __post_init__(self):
        for key in ("t_grid", "values", "lower", "upper", "errors", "depths"):
            setattr(self, key, np.asarray(getattr(self, key), dtype=float))
        if self.converged is None:
            self.converged = np.ones(self.t_grid.size, dtype=bool)
        self.converged = np.asarray(self.converged, dtype=bool)
        self._interpolant = None

    @property
    def finite(self):
        return np.isfinite(self.values)

    @property
    def dim(self):
        return self.meta.get("dim")

    @property
    def parabolic(self):
        return bool(self.meta.get("parabolic"))

    def finite_region(self):
        t = self.t_grid[self.finite]
        if t.size == 0:
            raise ValueError("pressure curve has no finite values")
        return float(t[0]), float(t[-1])

    def interpolant(self):
        if self._interpolant is None:
            self._interpolant = CurveInterpolant(self)
        return self._interpolant

    def to_frame(self):
        return pd.DataFrame({
            "t": self.t_grid,
            "P": self.values,
            "lower": self.lower,
            "upper": self.upper,
            "error": self.errors,
            "N": self.meta.get("N") or 0,
            "depth": self.depths.astype(int),
            "converged": self.converged,
        })

    def violations(self):
        """list of (kind, t) where the curve breaks monotonicity or convexity."""
        found = []
        mask = self.finite
        t, v = self.t_grid[mask], self.values[mask]
        width = np.abs(self.upper[mask] - self.lower[mask])
        width = np.where(np.isfinite(width), width, 0.0)
        err = np.where(np.isfinite(self.errors[mask]), self.errors[mask], 0.0)
        slack = 2.0 * np.maximum(width, err) + 1e-9
        for i in range(1, t.size):
            if v[i] > v[i - 1] + slack[i]:
                found.append(("increasing", float(t[i])))
        for i in range(1, t.size - 1):
            h0, h1 = t[i] - t[i - 1], t[i + 1] - t[i]
            chord = (h1 * v[i - 1] + h0 * v[i + 1]) / (h0 + h1)
            if v[i] > chord + slack[i]:
                found.append(("concave", float(t[i])))
        return found


class CurveInterpolant:
    """smooth interpolant of the finite part of a pressure curve.

    For parabolic curves the spline ends at the Bowen root with the
    stored left slope and is identically 0 beyond it.
    """

    def __init__(self, curve):
        mask = curve.finite
        t = curve.t_grid[mask]
        v = curve.values[mask]
        self.dim = curve.dim
        self.flat = curve.parabolic and self.dim is not None
        bc = "not-a-knot"
        if self.flat:
            keep = t < self.dim - 1e-6
            t = np.append(t[keep], self.dim)
            v = np.append(v[keep], 0.0)
            slope = curve.meta.get("left_slope")
            if slope is not None:
                bc = ("not-a-knot", (1, slope))
        if t.size < 4:
            raise ValueError("need at least four finite pressure values to interpolate")
        self.t = t
        self.spline = scipy.interpolate.CubicSpline(t, v, bc_type=bc)
        self.lo, self.hi = float(t[0]), float(t[-1])

    def __call__(self, t, nu=0):
        t = np.asarray(t, dtype=float)
        out = self.spline(np.clip(t, self.lo, self.hi), nu)
        if self.flat:
            out = np.where(t > self.dim, 0.0, out)
        return out


def pressure_curve(model, t_grid, method=None, N=None, params=None):
    """sample P over ``t_grid``; with ``N`` the N-truncation is sampled."""
    if params is None:
        params = get_params()
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    meta = {"model": model.describe(), "N": N, "parabolic": model.parabolic is not None}

    if N is not None:
        target = maps.truncate(model, N)
        meta.update(method="cylinder", t_star=0.0, dim=None)
        if meta["parabolic"]:
            # truncated parabolic pressure is clamped to 0 past its own root
            meta["dim"] = bowen_root(target)

        def evaluate(t):
            return pressure_truncated(target, t, target.branch_count)
    else:
        method = method or default_method(model)
        t_star = critical_t(model)
        dim = bowen_root(model)
        meta.update(method=method, t_star=t_star, dim=dim,
                    parabolic=model.parabolic is not None and not model.non_condition5)
        if meta["parabolic"] and not model.is_finite:
            meta["left_slope"] = left_slope(model)
            if method == "induced":
                from thermokit import induced
                induced.get_scheme(model)

        def evaluate(t):
            return pressure_estimate(model, t, method, params)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        estimates = list(pool.map(evaluate, t_grid))

    meta["depth"] = max(e.depth for e in estimates)
    meta["converged"] = all(e.converged for e in estimates)
    if not meta["converged"]:
        L.warning("%i of %i pressure values of %s did not reach the tolerance",
                  sum(not e.converged for e in estimates), len(estimates), model.name)
    return PressureCurve(
        t_grid=t_grid,
        values=[e.value for e in estimates],
        lower=[e.lower for e in estimates],
        upper=[e.upper for e in estimates],
        errors=[e.error for e in estimates],
        depths=[e.depth for e in estimates],
        meta=meta,
        converged=[e.converged for e in estimates])


def _exponent_span(model):
    """log sup|T'| - log inf|T'| over the branches of a finite model."""
    n = np.arange(1, model.branch_count + 1)
    inf, sup = model.deriv_bounds(n)
    return float(np.log(np.max(sup)) - np.log(np.min(inf)))


def default_t_grid(model, points=None, t_max=None):
    """geometric offsets above t* plus a linear stretch beyond the root.

    For finitely many branches -P' only reaches the ends of the exponent
    range as t -> +-infinity; a linear core on [-2, t_max] is extended by
    geometric stretches out to |t| ~ 40 / (spread of log|T'|).
    """
    params = get_params()["spectrum"]
    points = points or params["t_points"]
    t_max = t_max or params["t_max"]
    t_star = critical_t(model)
    if model.is_finite:
        core = np.linspace(-2.0, t_max, points)
        span = _exponent_span(model)
        t_far = min(max(t_max, 40.0 / span), 500.0) if span > 0 else t_max
        if t_far <= t_max:
            return core
        grid = [core, -np.geomspace(2.0, t_far, points)]
        if model.parabolic is None:
            grid.append(np.geomspace(t_max, t_far, points))
        return np.unique(np.round(np.concatenate(grid), 12))
    band = get_params()["pressure"]["critical_band"]
    near = t_star + np.geomspace(1.6 * band, 0.5, points // 2, endpoint=False)
    far = np.linspace(t_star + 0.5, t_max, points - near.size)
    grid = np.concatenate([near, far])
    if model.parabolic is not None and not model.non_condition5:
        dim = bowen_root(model)
        approach = dim - np.geomspace(0.2, 5e-5, 8)
        grid = np.concatenate([grid, approach[approach > t_star + 2 * band]])
    return np.unique(np.round(grid, 12))


class DerivativeEstimate(NamedTuple):
    value: float
    error: float
    one_sided: bool


def pressure_derivative_estimate(curve, t, step=None):
    """dP/dt on a sampled curve with an error bar.

    Central differences of the interpolant with a step of half the local
    grid spacing; the error is the change on halving the step plus the
    sampled pressure error over the step.  Within one grid step of either
    end of the finite region (or of the Bowen root of a parabolic map) a
    one-sided secant of the sampled values is used and a warning is
    logged.  Its error adds the change of the secant over the adjacent
    grid interval, which bounds the first-order bias of the secant.
    """
    mask = curve.finite
    grid = curve.t_grid[mask]
    values = curve.values[mask]
    errors = np.where(np.isfinite(curve.errors[mask]), curve.errors[mask], 0.0)
    if grid.size < 2:
        raise ValueError("pressure curve has fewer than two finite values")
    if curve.parabolic and curve.dim is not None and t > curve.dim:
        return DerivativeEstimate(0.0, 0.0, False)
    i = int(np.clip(np.searchsorted(grid, t), 1, grid.size - 1))
    spacing = grid[i] - grid[i - 1]
    near_edge = (t - grid[0] < spacing or grid[-1] - t < spacing or
                 (curve.parabolic and curve.dim is not None and curve.dim - t < spacing))
    if near_edge or grid.size < 4:
        L.warning("one-sided pressure derivative at t=%g", t)

        def secant(j):
            return (values[j] - values[j - 1]) / (grid[j] - grid[j - 1])

        slope = secant(i)
        error = (errors[i] + errors[i - 1]) / spacing
        if grid.size > 2:
            neighbour = i + 1 if i + 1 < grid.size else i - 1
            error += abs(slope - secant(neighbour))
        else:
            error += abs(slope)
        return DerivativeEstimate(float(slope), float(error), True)
    h = step or 0.5 * spacing
    f = curve.interpolant()
    wide = float((f(t + h) - f(t - h)) / (2.0 * h))
    narrow = float((f(t + 0.5 * h) - f(t - 0.5 * h)) / h)
    error = abs(wide - narrow) + float(np.interp(t, grid, errors)) / h
    return DerivativeEstimate(narrow, error, False)


def pressure_derivative(curve, t, step=None):
    """dP/dt on a sampled curve; see :func:`pressure_derivative_estimate`."""
    return pressure_derivative_estimate(curve, t, step).value
