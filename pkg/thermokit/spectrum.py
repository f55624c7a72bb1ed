"""spectrum.py - Lyapunov spectra from pressure curves
=====================================================

L(alpha) = inf_t (P(t) + t alpha) / alpha.  The infimum is attained at
t_alpha with P'(t_alpha) = -alpha, found on the smooth interpolant of the
sampled pressure: a monotone table of -P' gives a starting point that is
polished by Newton steps.  For parabolic maps with alpha below the left
slope alpha* at the Bowen root the infimum sits at the root itself and L
is pinned to the dimension.

Inflections of L are the sign changes of the curvature residual

    R(alpha) = P(t_alpha) + alpha^2 t'_alpha / 2,

which has the sign of L''(alpha).
"""

import dataclasses
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
import scipy.optimize

from thermokit import maps
from thermokit import pressure as pr
from thermokit.config import get_params, worker_count
from thermokit.errors import BudgetExceeded

L = logging.getLogger(__name__)

# flags
PINNED = "pinned"
ABSENT = "absent"


class LegendreSolver:
    """solves P'(t) = -alpha on the interpolant of a pressure curve."""

    def __init__(self, curve, refine=24):
        self.curve = curve
        self.f = curve.interpolant()
        knots = self.f.t
        pieces = [np.linspace(a, b, refine, endpoint=False) for a, b in zip(knots[:-1], knots[1:])]
        self.t = np.concatenate(pieces + [knots[-1:]])
        # -P' is nonincreasing for a convex pressure
        slope = np.maximum.accumulate(self.f(self.t, 1))
        self.minus = -slope
        self.dim = curve.dim
        self.pinned_below = None
        if curve.parabolic and self.dim is not None:
            self.pinned_below = max(-float(curve.meta.get("left_slope") or 0.0), 0.0)

    def solve(self, alpha):
        """(t_alpha, P(t_alpha), flag) with flag None, PINNED or ABSENT."""
        if self.pinned_below is not None and alpha <= self.pinned_below:
            return self.dim, 0.0, PINNED
        if alpha > self.minus[0] or alpha < self.minus[-1]:
            return math.nan, math.nan, ABSENT
        t = float(np.interp(-alpha, -self.minus, self.t))
        lo, hi = self.f.lo, self.f.hi
        for _ in range(8):
            curvature = float(self.f(t, 2))
            if curvature <= 0:
                break
            step = (float(self.f(t, 1)) + alpha) / curvature
            candidate = t - step
            if not lo <= candidate <= hi:
                break
            t = candidate
            if abs(step) < 1e-14:
                break
        return t, float(self.f(t)), None

    def residual(self, alpha):
        """R(alpha) with t'_alpha = -1 / P''(t_alpha)."""
        t, p, flag = self.solve(alpha)
        if flag is not None:
            return math.nan
        curvature = float(self.f(t, 2))
        if curvature <= 0:
            return math.nan
        return p - 0.5 * alpha ** 2 / curvature

    def value(self, alpha):
        t, p, flag = self.solve(alpha)
        if flag == ABSENT:
            return math.nan
        if flag == PINNED:
            return self.dim
        return (p + t * alpha) / alpha


@dataclasses.dataclass
class SpectrumCurve:
    alpha_grid: np.ndarray
    L: np.ndarray
    L_error: np.ndarray
    t_alpha: np.ndarray
    curvature_residual: np.ndarray
    flags: list
    source: pr.PressureCurve = dataclasses.field(repr=False)
    meta: dict = dataclasses.field(default_factory=dict)

    @property
    def valid(self):
        return np.array([f != ABSENT for f in self.flags])

    @property
    def free(self):
        """points where the infimum is attained inside the curve."""
        return np.array([f is None for f in self.flags])

    @property
    def entropy(self):
        """h(mu_alpha) = alpha L(alpha)."""
        return self.alpha_grid * self.L

    @property
    def derivative(self):
        """L'(alpha) = (t_alpha - L(alpha)) / alpha."""
        return (self.t_alpha - self.L) / self.alpha_grid

    def solver(self):
        return LegendreSolver(self.source)

    def to_frame(self):
        return pd.DataFrame({
            "alpha": self.alpha_grid,
            "L": self.L,
            "L_error": self.L_error,
            "t_alpha": self.t_alpha,
            "residual": self.curvature_residual,
            "entropy": self.entropy,
            "dL": self.derivative,
            "flags": [f or "" for f in self.flags],
        })


def default_alpha_grid(alpha_min=0.0, params=None):
    if params is None:
        params = get_params()["spectrum"]
    lo = max(alpha_min, params["alpha_min"])
    return np.geomspace(lo, params["alpha_max"], params["alpha_points"])


def legendre_spectrum(curve, alpha_grid):
    """sample L over ``alpha_grid`` from a pressure curve."""
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    if np.any(alpha_grid <= 0):
        raise ValueError("alpha grid must be positive")
    solver = LegendreSolver(curve)
    n = alpha_grid.size
    t_alpha = np.full(n, np.nan)
    values = np.full(n, np.nan)
    p_alpha = np.full(n, np.nan)
    flags = []
    for i, alpha in enumerate(alpha_grid):
        t, p, flag = solver.solve(alpha)
        flags.append(flag)
        if flag == ABSENT:
            continue
        t_alpha[i] = t
        p_alpha[i] = p
        values[i] = curve.dim if flag == PINNED else (p + t * alpha) / alpha

    # the infimum over the sampled nodes bounds L from above
    mask = curve.finite
    nodes_t, nodes_p = curve.t_grid[mask], curve.values[mask]
    scan = np.min((nodes_p[None, :] + nodes_t[None, :] * alpha_grid[:, None]) / alpha_grid[:, None], axis=1)
    over = values > scan + 1e-9
    if np.any(over):
        L.warning("Legendre scan undercuts %i spectrum values; using the scan", int(np.sum(over)))
        values = np.where(over, scan, values)

    errors = np.interp(np.nan_to_num(t_alpha), nodes_t,
                       np.where(np.isfinite(curve.errors[mask]), curve.errors[mask], 0.0))
    errors = np.where(np.isnan(values), np.nan, errors / alpha_grid)

    residual = np.full(n, np.nan)
    free = np.array([f is None for f in flags])
    if free.sum() >= 3:
        slope = np.gradient(t_alpha[free], alpha_grid[free])
        residual[free] = p_alpha[free] + 0.5 * alpha_grid[free] ** 2 * slope

    return SpectrumCurve(
        alpha_grid=alpha_grid, L=values, L_error=errors, t_alpha=t_alpha,
        curvature_residual=residual, flags=flags, source=curve,
        meta={"dim": curve.dim, "dim_J_prime": curve.dim, "method": curve.meta.get("method")})


def second_difference_signs(spectrum):
    """sign of the numerical L'' over the free part of the spectrum."""
    signs = np.zeros(spectrum.alpha_grid.size)
    free = spectrum.free
    if free.sum() >= 3:
        a = spectrum.alpha_grid[free]
        second = np.gradient(np.gradient(spectrum.L[free], a), a)
        signs[free] = np.sign(second)
    return signs


class AlphaStar(NamedTuple):
    value: float
    slow: bool


def estimate_alpha_star(curve, dim=None):
    dim = curve.dim if dim is None else dim
    slope = curve.meta.get("left_slope")
    if slope is not None:
        # + 0.0 turns a -0.0 slope into 0.0
        return AlphaStar(max(-float(slope), 0.0) + 0.0, False)
    if not curve.parabolic:
        return AlphaStar(-pr.pressure_derivative(curve, dim), False)

    # one-sided secants P(dim - h) / h, extrapolated in 1/log(1/h)
    f = curve.interpolant()
    h = np.geomspace(0.1, 1e-4, 7)
    h = h[dim - h > f.lo]
    if h.size < 3:
        return AlphaStar(math.nan, True)
    secant = f(dim - h) / h
    u = 1.0 / np.log(1.0 / h)
    estimates = []
    for k in range(2, h.size):
        coeffs = np.polyfit(u[k - 2:k + 1], secant[k - 2:k + 1], 1)
        estimates.append(coeffs[-1])
    value = max(float(estimates[-1]), 0.0) + 0.0
    slow = len(estimates) > 1 and abs(estimates[-1] - estimates[-2]) > 0.05
    if slow:
        L.warning("alpha* extrapolation converges slowly (%.3f vs %.3f)", estimates[-1], estimates[-2])
    return AlphaStar(value, slow)


def alpha_star(curve, dim=None):
    """left limit of -P'(t) at the Bowen root."""
    return estimate_alpha_star(curve, dim).value


def periodic_exponents(model, period_cap=None, N=None):
    """Lyapunov exponents of all periodic words up to ``period_cap``."""
    params = get_params()["spectrum"]
    period_cap = period_cap or params["period_cap"]
    K = maps.symbol_count(model, N or params["period_branches"])
    budget = get_params()["budget"]["words"]
    if sum(K ** k for k in range(1, period_cap + 1)) > budget:
        raise BudgetExceeded("periodic words up to length %i exceed the budget" % period_cap)
    exponents = []
    for k in range(1, period_cap + 1):
        words = np.array(list(itertools.product(range(1, K + 1), repeat=k)))
        y = np.full(words.shape[0], 0.5)
        for _ in range(200):
            previous = y
            for pos in reversed(range(k)):
                y = model.inverse(words[:, pos], y)
            if np.max(np.abs(y - previous)) < 1e-15:
                break
        log_derivative = np.zeros(words.shape[0])
        for pos in reversed(range(k)):
            log_derivative += np.log(model.inverse_derivative(words[:, pos], y))
            y = model.inverse(words[:, pos], y)
        exponents.append(-log_derivative / k)
    return np.concatenate(exponents)


def alpha_min(model, period_cap=None):
    """smallest periodic Lyapunov exponent; 0 for parabolic maps."""
    if model.parabolic is not None:
        return 0.0
    return float(np.min(periodic_exponents(model, period_cap)))


def alpha_max(model, period_cap=None):
    """largest periodic Lyapunov exponent of a finite-branch map."""
    if not model.is_finite:
        return math.inf
    return float(np.max(periodic_exponents(model, period_cap, N=model.branch_count)))


@dataclasses.dataclass
class SpectrumFeatures:
    alpha_star: float
    alpha_star_slow: bool
    alpha_min: float
    alpha_max_at: float
    L_max: float
    maximum_interior: bool
    asymptote: float
    asymptote_error: float
    inflections: list
    inflections_complete: bool

    def as_dict(self):
        return dataclasses.asdict(self)


def _asymptote(alpha, values):
    """A of the exact fit A + c/alpha + d log(alpha)/alpha at three points."""
    design = np.column_stack([np.ones(3), 1.0 / alpha, np.log(alpha) / alpha])
    three = float(np.linalg.solve(design, values)[0])
    two = float(np.linalg.solve(design[1:, :2], values[1:])[0])
    return three, abs(three - two)


def _refine_sign_change(solver, a, b):
    try:
        return scipy.optimize.brentq(solver.residual, a, b, xtol=1e-10 * b)
    except (ValueError, RuntimeError):
        # residual not finite or without a sign change between a and b
        return 0.5 * (a + b)


def features(curve, spectrum, model):
    params = get_params()["spectrum"]
    star = estimate_alpha_star(curve)
    a_min = alpha_min(model)
    solver = spectrum.solver()

    valid = spectrum.valid & np.isfinite(spectrum.L)
    alpha, values = spectrum.alpha_grid[valid], spectrum.L[valid]
    if alpha.size < 3:
        raise ValueError("spectrum has fewer than three valid points")
    flags = [f for f, v in zip(spectrum.flags, valid) if v]

    i = int(np.argmax(values))
    interior = 0 < i < alpha.size - 1 and flags[i] is None and flags[i - 1] is None
    if interior:
        result = scipy.optimize.minimize_scalar(
            lambda a: -solver.value(a), bracket=(alpha[i - 1], alpha[i], alpha[i + 1]),
            method="golden", tol=1e-10)
        at, top = float(result.x), float(-result.fun)
    else:
        last_pinned = [k for k, f in enumerate(flags) if f == PINNED]
        k = last_pinned[-1] if last_pinned else i
        at, top = float(alpha[k]), float(values[k])

    asymptote, asymptote_error = _asymptote(alpha[-3:], values[-3:])

    residual = spectrum.curvature_residual
    free = spectrum.free & np.isfinite(residual)
    index = np.flatnonzero(free)
    inflections = []
    complete = index.size >= 3 and bool(np.all(np.diff(index) == 1))
    tol = params["residual_tol"]
    significant = [k for k in index if abs(residual[k]) > tol]
    for k0, k1 in zip(significant[:-1], significant[1:]):
        if np.sign(residual[k0]) != np.sign(residual[k1]):
            inflections.append(_refine_sign_change(
                solver, spectrum.alpha_grid[k0], spectrum.alpha_grid[k1]))

    return SpectrumFeatures(
        alpha_star=star.value, alpha_star_slow=star.slow, alpha_min=a_min,
        alpha_max_at=at, L_max=top, maximum_interior=bool(interior),
        asymptote=asymptote, asymptote_error=asymptote_error,
        inflections=[float(a) for a in inflections], inflections_complete=complete)


def maximum_t_identity(spectrum, at):
    """|t_alpha - L(alpha)| at ``at``; vanishes at an interior maximum."""
    solver = spectrum.solver()
    t, _, flag = solver.solve(at)
    if flag == ABSENT:
        return math.nan
    return abs(t - solver.value(at))


class TruncatedSpectra(NamedTuple):
    N: list
    values: list
    errors: list
    monotone: bool
    full: Optional[float]
    gap: Optional[float]
    below_full: bool


def _spectrum_at(curve, alpha):
    spectrum = legendre_spectrum(curve, [alpha])
    return float(spectrum.L[0]), float(spectrum.L_error[0])


def truncated_spectra(model, alpha, N_list, t_grid=None, full_curve=None):
    """L_N(alpha) for each truncation and the gap to the full spectrum."""
    N_list = sorted(int(N) for N in N_list)
    if t_grid is None:
        t_grid = np.linspace(-1.0, get_params()["spectrum"]["t_max"], 41)

    def evaluate(N):
        return _spectrum_at(pr.pressure_curve(model, t_grid, N=N), alpha)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(evaluate, N_list))
    values = [v for v, _ in results]
    errors = [e for _, e in results]

    monotone = pr.monotone_within_errors(values, np.nan_to_num(errors, nan=0.0, posinf=0.0))
    if not monotone:
        L.warning("truncated spectra of %s at alpha=%g are not monotone in N: %s",
                  model.name, alpha, values)

    full = gap = None
    below_full = True
    if not model.non_condition5:
        if full_curve is None:
            full_curve = pr.pressure_curve(model, pr.default_t_grid(model))
        full, full_error = _spectrum_at(full_curve, alpha)
        if np.isfinite(full):
            finite = [v for v in values if np.isfinite(v)]
            if finite:
                gap = full - finite[-1]
                slack = (full_error if np.isfinite(full_error) else 0.0) + max(
                    (e for e in errors if np.isfinite(e)), default=0.0) + 1e-6
                below_full = all(v <= full + slack for v in finite)
        else:
            full = None
    return TruncatedSpectra(N_list, values, errors, bool(monotone), full, gap, below_full)


def spectrum_for_model(model, alpha_grid=None, t_grid=None, method=None):
    """pressure curve, spectrum and features with default grids."""
    curve = pr.pressure_curve(model, pr.default_t_grid(model) if t_grid is None else t_grid,
                              method=method)
    if alpha_grid is None:
        alpha_grid = default_alpha_grid(alpha_min(model))
    spectrum = legendre_spectrum(curve, alpha_grid)
    return curve, spectrum, features(curve, spectrum, model)
