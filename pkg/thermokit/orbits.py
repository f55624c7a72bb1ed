"""orbits.py - continued fractions and Birkhoff averages
=====================================================

Regular continued fractions are the Gauss map orbit of x, backward
continued fractions the Renyi map orbit.  Orbits are followed in
mpmath arithmetic at a configurable number of mantissa bits; double
precision loses a Gauss orbit after a few dozen steps.

Birkhoff averages of log|T'| are sampled in double precision, which is
enough for the statistics of typical orbits.
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import mpmath
import numpy as np
import pandas as pd

from thermokit.config import get_params, worker_count

L = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-14

CONSTANTS = {
    "golden": lambda: (mpmath.sqrt(5) - 1) / 2,
    "inv_pi": lambda: 1 / mpmath.pi,
    "inv_e": lambda: 1 / mpmath.e,
    "sqrt2": lambda: mpmath.sqrt(2) - 1,
}


def _precision(precision):
    return precision or get_params()["orbits"]["precision"]


def to_mpf(x):
    """x at the current working precision.

    Accepts the names in CONSTANTS, zero-argument callables, decimal
    strings and numbers.
    """
    if isinstance(x, str) and x in CONSTANTS:
        return CONSTANTS[x]()
    if callable(x):
        return mpmath.mpf(x())
    return mpmath.mpf(x)


@dataclasses.dataclass
class CFExpansion:
    kind: str
    digits: tuple
    origin: float
    truncated: bool = False
    reason: str = ""

    def __len__(self):
        return len(self.digits)

    def as_dict(self):
        return dataclasses.asdict(self)


def _expand(x, n, kind, precision):
    """digits plus the orbit x_0, x_1, ... as mpf values."""
    digits = []
    orbit = [x]
    reason = ""
    budget = (precision - 16) * math.log(2.0)
    log_derivative = 0.0
    for _ in range(n):
        if kind == "regular":
            if x <= ENDPOINT_TOL:
                reason = "endpoint"
                break
            inverse = 1 / x
            digit = int(mpmath.floor(inverse))
            x = inverse - digit
            log_derivative += -2.0 * float(mpmath.log(orbit[-1]))
        else:
            if x <= ENDPOINT_TOL or 1 - x <= ENDPOINT_TOL:
                reason = "endpoint"
                break
            inverse = 1 / (1 - x)
            branch = int(mpmath.floor(inverse))
            digit = branch + 1
            x = inverse - branch
            log_derivative += -2.0 * float(mpmath.log(1 - orbit[-1]))
        if log_derivative > budget:
            reason = "precision"
            break
        digits.append(digit)
        orbit.append(x)
    return digits, orbit, reason


def cf_expand(x, n, kind="regular", precision=None):
    """first ``n`` regular (Gauss) or backward (Renyi) digits of x."""
    if kind not in ("regular", "backward"):
        raise ValueError("unknown continued fraction kind '%s'" % kind)
    precision = _precision(precision)
    with mpmath.workprec(precision):
        value = to_mpf(x)
        if not 0 < value < 1:
            raise ValueError("continued fractions are taken for x in (0, 1), got %s" % value)
        digits, _, reason = _expand(value, n, kind, precision)
        origin = float(value)
    if reason:
        L.info("%s expansion of %.17g truncated after %i digits (%s)",
               kind, origin, len(digits), reason)
    return CFExpansion(kind, tuple(digits), origin, bool(reason), reason)


def approximants(digits):
    """(p_n, q_n) for the regular expansion [0; a_1, a_2, ...]."""
    result = []
    p0, q0 = 1, 0
    p1, q1 = 0, 1
    for a in digits:
        a = int(a)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        result.append((p1, q1))
    return result


def evaluate(digits):
    """value of the finite regular expansion as an exact fraction (p, q)."""
    pairs = approximants(digits)
    return pairs[-1] if pairs else (0, 1)


class ApproximantLyapunov(NamedTuple):
    approximant: float
    derivative: float
    rational: bool


def lyapunov_via_approximants(x, n, precision=None):
    """the two finite-n Lyapunov estimates of the Gauss map at x.

    ``approximant`` is -(1/n) log|x - p_n/q_n|, ``derivative`` is
    (1/n) log|(G^n)'(x)|.
    """
    precision = _precision(precision)
    with mpmath.workprec(precision):
        value = to_mpf(x)
        digits, orbit, reason = _expand(value, n, "regular", precision)
        if len(digits) < n:
            L.warning("expansion of %s stops after %i digits (%s)",
                      mpmath.nstr(value, 17), len(digits), reason or "rational")
            return ApproximantLyapunov(math.nan, math.nan, True)
        p, q = evaluate(digits)
        gap = abs(value - mpmath.mpf(p) / q)
        approximant = -float(mpmath.log(gap)) / n
        derivative = -2.0 * float(mpmath.fsum(mpmath.log(y) for y in orbit[:n])) / n
    return ApproximantLyapunov(approximant, derivative, False)


def random_points(count, seed, precision=None):
    """``count`` uniform points of (0, 1) carrying ``precision`` random bits."""
    precision = _precision(precision)
    rng = np.random.default_rng(seed)
    nbytes = (precision + 7) // 8
    points = []
    with mpmath.workprec(precision + 8):
        for _ in range(count):
            mantissa = int.from_bytes(rng.bytes(nbytes), "big") | 1
            points.append(mpmath.mpf(mantissa) / mpmath.mpf(2) ** (8 * nbytes))
    return points


# ----------------------------------------------------------------------
# Birkhoff sums
# ----------------------------------------------------------------------
class BirkhoffSample(NamedTuple):
    x0: float
    n: int
    lambda_hat: float
    escaped: bool


def _birkhoff(model, x0, n):
    x = np.array(x0, dtype=float)
    total = np.zeros(x.shape)
    alive = np.ones(x.shape, dtype=bool)
    for _ in range(n):
        with np.errstate(all="ignore"):
            y, d = model.map(np.where(alive, x, 0.5))
        step_ok = np.isfinite(y) & np.isfinite(d) & (d > 0)
        alive &= step_ok
        total = np.where(alive, total + np.log(np.where(alive, d, 1.0)), total)
        x = np.where(alive, y, x)
    return total / n, ~alive


def sample_lyapunov(model, count, n, seed, chunk=250):
    """Birkhoff averages (1/n) log|(T^n)'(x0)| at seeded uniform x0."""
    if n < 1 or count < 1:
        raise ValueError("count and n must be positive")
    rng = np.random.default_rng(seed)
    x0 = rng.random(count)
    chunks = [x0[i:i + chunk] for i in range(0, count, chunk)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda c: _birkhoff(model, c, n), chunks))
    lambda_hat = np.concatenate([r[0] for r in results])
    escaped = np.concatenate([r[1] for r in results])
    if escaped.any():
        L.warning("%i of %i orbits of %s left the domain", int(escaped.sum()), count, model.name)
    return [BirkhoffSample(float(x), int(n), float("nan") if e else float(v), bool(e))
            for x, v, e in zip(x0, lambda_hat, escaped)]


def samples_frame(samples):
    return pd.DataFrame(samples, columns=BirkhoffSample._fields)


def gauss_density(x):
    """invariant density of the Gauss map."""
    return 1.0 / (math.log(2.0) * (1.0 + np.asarray(x, dtype=float)))


def gauss_measure(a, b):
    """Gauss measure of [a, b]."""
    return math.log((1.0 + b) / (1.0 + a)) / math.log(2.0)


def gauss_lyapunov():
    """Lyapunov exponent of Lebesgue-typical points, pi^2 / (6 log 2)."""
    return math.pi ** 2 / (6.0 * math.log(2.0))
