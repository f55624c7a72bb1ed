"""induced.py - first-return scheme over the non-parabolic branches
==================================================================

The base is the union of the branches n >= 2, the interval [b_1, 1)
with b_1 the right end of the parabolic branch.  A point of branch n
whose image lies in the escape set E_{j-1} = [c_j, c_{j-1}) returns to
the base after exactly j steps, where c_0 = 1 and c_{k+1} = psi_1(c_k)
iterates the parabolic inverse branch.  The induced branch

    I_{n,j} = psi_n(E_{j-1})

is mapped onto the base by F = T^j.  Sums over the doubly indexed
branches give the two-variable pressure P(t, q) of -t log|F'| - q j, and
P(-t log|T'|) is the root q of P(t, q) = 0.

Sums beyond the cut-offs are closed analytically: the branch tail with
the map's own tail sums, the return-time tail with the fitted power law
|E_{j-1}| ~ C j^-rho through incomplete gamma functions.
"""

import dataclasses
import logging
import math
from functools import lru_cache

import mpmath
import numpy as np
import pandas as pd
import scipy.optimize
import statsmodels.api as sm
from scipy.special import logsumexp

from thermokit import maps
from thermokit.config import fingerprint, get_params
from thermokit.errors import BudgetExceeded, ConfigError, NonConvergence
from thermokit.pressure import DIVERGENT, Bracket, PressureEstimate

L = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class InducedBranch:
    n: int
    j: int
    interval: tuple
    deriv_inf: float
    deriv_sup: float


def escape_points(model, J):
    """c_0 = 1, c_k = psi_1^k(1) for k = 0..J."""
    c = np.empty(J + 1)
    c[0] = 1.0
    for k in range(J):
        c[k + 1] = float(model.inverse(1, c[k]))
    return c


def return_time_tail(s, q, J):
    """log of sum_{j>J} j^-s e^-qj, +inf when divergent.

    q = 0 is a Hurwitz zeta value; otherwise the sum is replaced by the
    midpoint integral q^(s-1) Gamma(1-s, q(J+1/2)).
    """
    if q < 0 or (q == 0 and s <= 1.0):
        return math.inf
    if q == 0:
        value = mpmath.zeta(s, J + 1)
    else:
        q = mpmath.mpf(q)
        value = q ** (s - 1) * mpmath.gammainc(1 - s, q * (J + 0.5))
    if value <= 0:
        return -math.inf
    return float(mpmath.log(value))


@dataclasses.dataclass(eq=False)
class InducedScheme:
    """enumerated induced branches 2 <= n <= n_max, 1 <= j <= j_max."""

    model: maps.MapModel
    n: np.ndarray
    j: np.ndarray
    c: np.ndarray
    base: tuple
    log_length: np.ndarray
    log_deriv_inf: np.ndarray
    log_deriv_sup: np.ndarray
    rho: float
    log_c: float
    rho_stderr: float

    @property
    def n_max(self):
        return int(self.n[-1])

    @property
    def j_max(self):
        return int(self.j[-1])

    @property
    def base_length(self):
        return self.base[1] - self.base[0]

    @property
    def escape_lengths(self):
        """|E_{j-1}| for j = 1..j_max."""
        return self.c[:-1] - self.c[1:]

    @property
    def has_branch_tail(self):
        return not self.model.is_finite

    @property
    def tail_exponent(self):
        return maps.tail_exponent(self.model) if self.has_branch_tail else math.inf

    def interval(self, n, j):
        a = float(self.model.inverse(n, self.c[j]))
        b = float(self.model.inverse(n, self.c[j - 1]))
        return (min(a, b), max(a, b))

    def branch(self, n, j):
        i, k = n - 2, j - 1
        return InducedBranch(
            n=n, j=j, interval=self.interval(n, j),
            deriv_inf=float(np.exp(self.log_deriv_inf[i, k])),
            deriv_sup=float(np.exp(self.log_deriv_sup[i, k])))

    def branches(self):
        for n in self.n:
            for j in self.j:
                yield self.branch(int(n), int(j))

    def comparison_bounds(self):
        """min and max of |I_{n,j}| / (|I_n| j^-rho) over the enumeration."""
        a, b = self.model.interval(self.n)
        log_branch = np.log(np.abs(b - a))
        log_ratio = (self.log_length + math.log(self.base_length)
                     - log_branch[:, None] + self.rho * np.log(self.j)[None, :])
        return float(np.exp(log_ratio.min())), float(np.exp(log_ratio.max()))

    # ------------------------------------------------------------------
    # sums
    # ------------------------------------------------------------------
    @lru_cache(maxsize=256)
    def _column_sums(self, t):
        """per return time j: log sums over n of the three weights."""
        columns = []
        for weights in (np.minimum(-t * self.log_deriv_sup, -t * self.log_deriv_inf),
                        np.maximum(-t * self.log_deriv_sup, -t * self.log_deriv_inf),
                        t * self.log_length):
            columns.append(logsumexp(weights, axis=0))
        if self.has_branch_tail:
            mid = 0.5 * (self.c[:-1] + self.c[1:])
            log_w, _ = self.model.tail_sums(self.n_max, mid, t)
            tail = t * (np.log(self.escape_lengths) - math.log(self.base_length)) + log_w
            columns = [np.logaddexp(col, tail) for col in columns]
        return tuple(columns)

    @lru_cache(maxsize=256)
    def _tail_prefactor(self, t):
        """log of C^t A(t) / |base|^t, A(t) = sum_n |psi_n'(0)|^t."""
        log_a = logsumexp(t * np.log(self.model.inverse_derivative(self.n, 0.0)))
        if self.has_branch_tail:
            log_w, _ = self.model.tail_sums(self.n_max, np.zeros(1), t)
            log_a = np.logaddexp(log_a, log_w[0])
        return float(t * self.log_c + log_a - t * math.log(self.base_length))

    def log_sums(self, t, q):
        """Bracket of log sum_{n,j} w_{n,j} e^-qj, DIVERGENT when infinite."""
        if not finiteness_check(self, t, q):
            return Bracket(DIVERGENT, DIVERGENT, DIVERGENT)
        jq = q * self.j
        tail = self._tail_prefactor(t) + return_time_tail(self.rho * t, q, self.j_max)
        values = [float(np.logaddexp(logsumexp(col - jq), tail))
                  for col in self._column_sums(t)]
        return Bracket(*values)


def build_induced(model, N_max=None, J_max=None, budget=None):
    """first-return scheme of a model with a parabolic point in branch 1."""
    params = get_params()
    N_max = params["induced"]["n_max"] if N_max is None else N_max
    J_max = params["induced"]["j_max"] if J_max is None else J_max
    budget = params["budget"]["words"] if budget is None else budget
    parabolic = model.parabolic
    if parabolic is None or parabolic.branch != 1:
        raise ConfigError("%s has no parabolic fixed point in branch 1" % model.name)
    if model.is_finite:
        N_max = min(N_max, model.branch_count)
    if N_max < 2 or J_max < 4:
        raise ConfigError("inducing needs N_max >= 2 and J_max >= 4")
    if (N_max - 1) * J_max > budget:
        raise BudgetExceeded("%i induced branches exceed the word budget %i"
                             % ((N_max - 1) * J_max, budget))

    n = np.arange(2, N_max + 1)
    j = np.arange(1, J_max + 1)
    c = escape_points(model, J_max)
    base = (c[1], 1.0)
    lower, upper = c[1:], c[:-1]
    escape = upper - lower

    nn = n[:, None]
    log_length = (np.log(model.mean_ratio(nn, lower[None, :], upper[None, :]))
                  + np.log(escape)[None, :] - math.log(base[1] - base[0]))

    # |(psi_1^(j-1))'| at the two ends of the base, by the chain rule
    log_g = np.log(model.inverse_derivative(1, c[:-1]))
    log_top = np.concatenate([[0.0], np.cumsum(log_g[:-1])])
    log_bottom = np.concatenate([[0.0], np.cumsum(log_g[1:])])
    at_top = np.log(model.inverse_derivative(nn, upper[None, :])) + log_top[None, :]
    at_bottom = np.log(model.inverse_derivative(nn, lower[None, :])) + log_bottom[None, :]
    log_deriv_inf = -np.maximum(at_top, at_bottom)
    log_deriv_sup = -np.minimum(at_top, at_bottom)

    # escape exponent from the upper half of the return times
    upper_half = j >= max(2, J_max // 2)
    fit = sm.OLS(np.log(escape[upper_half]),
                 sm.add_constant(np.log(j[upper_half].astype(float)))).fit()
    log_c, slope = fit.params
    scheme = InducedScheme(
        model=model, n=n, j=j, c=c, base=base,
        log_length=log_length,
        log_deriv_inf=log_deriv_inf,
        log_deriv_sup=log_deriv_sup,
        rho=float(-slope), log_c=float(log_c), rho_stderr=float(fit.bse[1]))
    L.debug("induced scheme for %s: %i x %i branches, rho=%.4f",
            model.name, n.size, j.size, scheme.rho)
    return scheme


def get_scheme(model):
    """scheme with the configured cut-offs, shared between calls."""
    return _cached_scheme(model, fingerprint())


@lru_cache(maxsize=None)
def _cached_scheme(model, key):
    return build_induced(model)


def finiteness_check(scheme, t, q):
    """whether the induced sum with weights |F'|^-t e^-qj is finite.

    The branch tail behaves like sum n^-(gamma t) and the return-time
    tail like sum j^-(rho t) e^-qj.
    """
    if scheme.has_branch_tail and t * scheme.tail_exponent <= 1.0:
        return False
    if q < 0:
        return False
    if q == 0 and scheme.rho * t <= 1.0:
        return False
    return True


def two_var_pressure(scheme, t, q):
    """Bracket of P(t, q) from the 1-cylinders of the induced full shift."""
    return scheme.log_sums(t, q)


def _root_in_q(f, tol):
    """q with f(q) = 0 for f decreasing in q; 0 when f(0) <= 0."""
    if f(0.0) <= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e4:
            raise NonConvergence(
                "induced pressure root not bracketed below q=%g; "
                "increase the inducing cut-offs n_max and j_max" % hi)
    return scipy.optimize.brentq(lambda q: min(f(q), 1e300), lo, hi, xtol=tol)


def induced_estimate(scheme, t, tol=1e-10):
    """P(-t log|T'|) as the root in q, with the roots of the bracket sums."""
    central = _root_in_q(lambda q: scheme.log_sums(t, q).central, tol)
    lower = _root_in_q(lambda q: scheme.log_sums(t, q).lower, tol)
    upper = _root_in_q(lambda q: scheme.log_sums(t, q).upper, tol)
    error = max(central - lower, upper - central, tol)
    return PressureEstimate(central, lower, upper, error, 1, True, "induced")


def pressure_via_inducing(model, t, tol=None):
    if tol is None:
        tol = get_params()["induced"]["tol"]
    return induced_estimate(get_scheme(model), t, tol).value


def bowen_root(scheme, tol=1e-10):
    """t with P(t, 0) = 0 on the central sums."""
    def f(t):
        return scheme.log_sums(t, 0.0).central

    t_lo = 1.0 / min(scheme.tail_exponent, scheme.rho) + 1e-3
    t_hi = 1.0
    if f(t_lo) <= 0:
        raise NonConvergence("induced sums of %s are below 1 at t=%g" % (scheme.model.name, t_lo))
    while f(t_hi) > 0:
        t_lo, t_hi = t_hi, 2.0 * t_hi
        if t_hi > 1e3:
            raise NonConvergence("no Bowen root for %s below t=%g" % (scheme.model.name, t_hi))
    return scipy.optimize.brentq(lambda t: min(f(t), 1e300), t_lo, t_hi, xtol=tol)


def return_time_slope(scheme, t):
    """left derivative of P(-t log|T'|) at a root t of P(t, 0) = 0.

    Implicit differentiation gives minus the mean induced Lyapunov
    exponent over the mean return time of the equilibrium weights.  An
    infinite mean return time gives slope 0.
    """
    margin = get_params()["induced"]["return_margin"]
    if scheme.rho * t <= 2.0 + margin:
        return 0.0
    log_total = scheme.log_sums(t, 0.0).central
    weights = np.exp(t * scheme.log_length - log_total)
    exponent = -scheme.log_length
    lyapunov = float(np.sum(weights * exponent))
    mean_time = float(np.sum(weights * scheme.j[None, :]))

    if scheme.has_branch_tail:
        _, _, central = scheme._column_sums(t)
        explicit = logsumexp(t * scheme.log_length, axis=0)
        tail_mass = np.exp(central - log_total) - np.exp(explicit - log_total)
        lyapunov += float(np.sum(tail_mass * exponent[-1, :]))
        mean_time += float(np.sum(tail_mass * scheme.j))

    prefactor = scheme._tail_prefactor(t) - log_total
    s = scheme.rho * t
    J = scheme.j_max
    mass = math.exp(prefactor + return_time_tail(s, 0.0, J))
    first_moment = math.exp(prefactor + float(mpmath.log(mpmath.zeta(s - 1.0, J + 1))))
    column = weights[:, -1] / max(weights[:, -1].sum(), 1e-300)
    lyapunov += mass * float(np.sum(column * exponent[:, -1]))
    mean_time += first_moment
    return -lyapunov / mean_time


def dump_scheme(scheme):
    """table of every enumerated induced branch."""
    n = np.repeat(scheme.n, scheme.j.size)
    j = np.tile(scheme.j, scheme.n.size)
    ends = np.stack([scheme.model.inverse(n, scheme.c[j]), scheme.model.inverse(n, scheme.c[j - 1])])
    return pd.DataFrame({
        "n": n,
        "j": j,
        "a": ends.min(axis=0),
        "b": ends.max(axis=0),
        "deriv_inf": np.exp(scheme.log_deriv_inf.ravel()),
        "deriv_sup": np.exp(scheme.log_deriv_sup.ravel()),
    })


def full_branch_error(scheme, n_values=(2, 3, 5), j_values=(1, 2, 3, 5, 8)):
    """largest distance of F at the ends of I_{n,j} from the ends of the base."""
    model = scheme.model
    worst = 0.0
    for n in n_values:
        for j in j_values:
            if n > scheme.n_max or j > scheme.j_max:
                continue
            a, b = scheme.interval(n, j)
            ends = []
            for x in (a, b):
                # F = T_1^(j-1) T_n on I_{n,j}
                x = float(model.forward(n, x))
                for _ in range(j - 1):
                    x = float(model.forward(1, x))
                ends.append(x)
            lo, hi = min(ends), max(ends)
            worst = max(worst, abs(lo - scheme.base[0]), abs(hi - scheme.base[1]))
    return worst
