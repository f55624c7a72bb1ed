"""maps.py - full-branch interval maps and their cylinders
==========================================================

A :class:`MapModel` describes a full-branch interval map with countably
(or finitely) many branches and at most one parabolic fixed point.  The
supported families are

* ``gauss``       the Gauss map x -> 1/x - n
* ``renyi``       the Renyi map x -> 1/(1-x) - n, parabolic at 0
* ``infinite_mp`` affine branches of slope n(n+1) beside a parabolic
                  branch x + 2^beta x^(1+beta) on [0, 1/2)
* ``pathological`` the parabolic branch followed by affine branches of
                  slope 2n(log 2n)^2, packed from 1/2
* ``linear_custom`` finitely many full affine branches

All evaluators are vectorised over numpy arrays of branch indices and
points.  Models are immutable and hashable; truncations are new models.

Every branch of every family has a monotone inverse-branch derivative,
so infima and suprema of |T'| over a cylinder are read off its end
points.
"""

import dataclasses
import itertools
import json
import logging
import math
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
import scipy.integrate
import scipy.special
import statsmodels.api as sm

import cgatcore.iotools as iotools

from thermokit.config import get_params
from thermokit.errors import BudgetExceeded, ConfigError

L = logging.getLogger(__name__)

FAMILIES = ("gauss", "renyi", "infinite_mp", "pathological", "linear_custom")


class Parabolic(NamedTuple):
    point: float
    branch: int
    beta: float


class Growth(NamedTuple):
    C: float
    gamma: float


@dataclasses.dataclass(frozen=True)
class Branch:
    """one full branch of a model."""

    index: int
    interval: tuple
    deriv_bounds: tuple
    model: "MapModel" = dataclasses.field(repr=False, compare=False)

    def forward(self, x):
        return self.model.forward(self.index, x)

    def derivative(self, x):
        return self.model.derivative(self.index, x)

    def inverse(self, y):
        return self.model.inverse(self.index, y)


@dataclasses.dataclass(frozen=True)
class CylinderWord:
    word: tuple
    interval: tuple
    deriv_inf: float
    deriv_sup: float

    @property
    def distortion(self):
        return self.deriv_sup / self.deriv_inf


def _as_index(n):
    return np.asarray(n, dtype=np.int64)


def _as_float(x):
    return np.asarray(x, dtype=float)


@dataclasses.dataclass(frozen=True)
class MapModel:
    """base class of all map families.

    Subclasses implement the per-branch kernels; ``truncation`` limits
    the model to branches ``1..truncation``.
    """

    truncation: Optional[int] = None

    family = None
    natural_count = None

    # ------------------------------------------------------------------
    # metadata
    # ------------------------------------------------------------------
    @property
    def params(self):
        return {}

    @property
    def parabolic(self):
        return None

    @property
    def dim_repeller(self):
        return None

    @property
    def growth(self):
        return None

    @property
    def non_condition5(self):
        return False

    @property
    def branch_count(self):
        """number of branches, ``None`` for infinitely many."""
        if self.truncation is None:
            return self.natural_count
        if self.natural_count is None:
            return self.truncation
        return min(self.truncation, self.natural_count)

    @property
    def is_finite(self):
        return self.branch_count is not None

    @property
    def name(self):
        label = self.family
        if self.params:
            label += "(%s)" % ", ".join(
                "%s=%s" % (k, v) for k, v in sorted(self.params.items()))
        if self.truncation is not None:
            label += "[N=%i]" % self.truncation
        return label

    def describe(self):
        """JSON-ready descriptor that rebuilds this model."""
        d = {"family": self.family, "params": dict(self.params)}
        if self.truncation is not None:
            d["truncation"] = self.truncation
        return d

    # ------------------------------------------------------------------
    # per-branch kernels, vectorised over n and x/y
    # ------------------------------------------------------------------
    def interval(self, n):
        raise NotImplementedError

    def forward(self, n, x):
        raise NotImplementedError

    def derivative(self, n, x):
        raise NotImplementedError

    def inverse(self, n, y):
        raise NotImplementedError

    def inverse_derivative(self, n, y):
        """|psi_n'(y)| for the inverse branch psi_n."""
        return 1.0 / self.derivative(n, self.inverse(n, y))

    def deriv_bounds(self, n):
        """(inf, sup) of |T'| on branch n."""
        lo = 1.0 / self.inverse_derivative(n, 0.0)
        hi = 1.0 / self.inverse_derivative(n, 1.0)
        return np.minimum(lo, hi), np.maximum(lo, hi)

    def mean_ratio(self, n, a, b):
        """(psi_n(b) - psi_n(a)) / (b - a), evaluated stably."""
        raise NotImplementedError

    def branch_of(self, x):
        """branch index containing x, 0 outside every branch."""
        raise NotImplementedError

    def log_slope_sup(self, log_n):
        """log sup|T'| on branch n given log n, usable for huge n."""
        raise NotImplementedError

    def tail_sums(self, N, z, t):
        """log of sum_{n>N} |psi_n'(z)|^t and the mean image position.

        Returns ``(log_weight, position)`` arrays shaped like ``z``.
        """
        z = _as_float(z)
        return np.full(z.shape, -np.inf), np.zeros(z.shape)

    # ------------------------------------------------------------------
    # derived
    # ------------------------------------------------------------------
    def check_index(self, n):
        n = _as_index(n)
        if np.any(n < 1):
            raise ValueError("branch indices start at 1")
        if self.is_finite and np.any(n > self.branch_count):
            raise ValueError("%s has only %i branches" % (self.name, self.branch_count))
        return n

    def branch(self, n):
        self.check_index(n)
        a, b = self.interval(n)
        lo, hi = self.deriv_bounds(n)
        return Branch(index=int(n), interval=(float(a), float(b)),
                      deriv_bounds=(float(lo), float(hi)), model=self)

    def branches(self):
        """lazy enumeration of branches."""
        budget = get_params()["budget"]["branches"]
        for n in itertools.count(1):
            if self.is_finite and n > self.branch_count:
                return
            if n > budget:
                raise BudgetExceeded(
                    "branch enumeration of %s exceeds %i branches" % (self.name, budget))
            yield self.branch(n)

    def map(self, x):
        """apply T; points outside every branch map to nan."""
        x = _as_float(x)
        n = self.branch_of(x)
        if self.is_finite:
            n = np.where(n > self.branch_count, 0, n)
        inside = n > 0
        safe = np.where(inside, n, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = self.forward(safe, x)
            d = self.derivative(safe, x)
        return np.where(inside, y, np.nan), np.where(inside, d, np.nan)


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------
@dataclasses.dataclass(frozen=True)
class GaussMap(MapModel):

    family = "gauss"

    @property
    def dim_repeller(self):
        return 1.0

    @property
    def growth(self):
        return Growth(4.0, 2.0)

    def interval(self, n):
        n = _as_float(n)
        return 1.0 / (n + 1.0), 1.0 / n

    def forward(self, n, x):
        return 1.0 / _as_float(x) - n

    def derivative(self, n, x):
        return 1.0 / _as_float(x) ** 2

    def inverse(self, n, y):
        return 1.0 / (_as_float(n) + y)

    def inverse_derivative(self, n, y):
        return 1.0 / (_as_float(n) + y) ** 2

    def deriv_bounds(self, n):
        n = _as_float(n)
        return n ** 2, (n + 1.0) ** 2

    def mean_ratio(self, n, a, b):
        n = _as_float(n)
        return 1.0 / ((n + a) * (n + b))

    def branch_of(self, x):
        x = _as_float(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            n = np.floor(1.0 / x)
        return np.where((x > 0) & (x <= 1) & np.isfinite(n), n, 0).astype(np.int64)

    def log_slope_sup(self, log_n):
        return 2.0 * np.logaddexp(log_n, 0.0)

    def tail_sums(self, N, z, t):
        z = _as_float(z)
        if 2.0 * t <= 1.0:
            return np.full(z.shape, np.inf), np.zeros(z.shape)
        w = scipy.special.zeta(2.0 * t, N + 1.0 + z)
        ratio = scipy.special.zeta(2.0 * t + 1.0, N + 1.0 + z) / w
        return np.log(w), ratio


@dataclasses.dataclass(frozen=True)
class RenyiMap(GaussMap):

    family = "renyi"

    @property
    def parabolic(self):
        return Parabolic(0.0, 1, 1.0)

    def interval(self, n):
        n = _as_float(n)
        return 1.0 - 1.0 / n, 1.0 - 1.0 / (n + 1.0)

    def forward(self, n, x):
        return 1.0 / (1.0 - _as_float(x)) - n

    def derivative(self, n, x):
        return 1.0 / (1.0 - _as_float(x)) ** 2

    def inverse(self, n, y):
        return 1.0 - 1.0 / (_as_float(n) + y)

    def branch_of(self, x):
        x = _as_float(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            n = np.floor(1.0 / (1.0 - x))
        return np.where((x >= 0) & (x < 1) & np.isfinite(n), n, 0).astype(np.int64)

    def tail_sums(self, N, z, t):
        logw, ratio = GaussMap.tail_sums(self, N, z, t)
        return logw, 1.0 - ratio


class _ParabolicBranchMixin:
    """branch 1 is x + 2^beta x^(1+beta) on [0, 1/2)."""

    @property
    def coefficient(self):
        return 2.0 ** self.beta

    @property
    def parabolic(self):
        return Parabolic(0.0, 1, self.beta)

    def _parabolic_forward(self, x):
        x = np.maximum(_as_float(x), 0.0)
        return x + self.coefficient * x ** (1.0 + self.beta)

    def _parabolic_derivative(self, x):
        x = np.maximum(_as_float(x), 0.0)
        return 1.0 + self.coefficient * (1.0 + self.beta) * x ** self.beta

    def _parabolic_inverse(self, y, iterations=80):
        # Newton from the right converges monotonically on the convex branch
        y = np.clip(_as_float(y), 0.0, 1.0)
        x = np.minimum(y, 0.5)
        for _ in range(iterations):
            step = (self._parabolic_forward(x) - y) / self._parabolic_derivative(x)
            x = np.maximum(x - step, 0.0)
            if np.all(np.abs(step) <= 4e-16 * np.maximum(x, 1e-300)):
                break
        return x

    def _parabolic_ratio(self, a, b):
        a = _as_float(a)
        b = _as_float(b)
        width = b - a
        wide = np.abs(width) > 1e-7
        with np.errstate(divide="ignore", invalid="ignore"):
            secant = (self._parabolic_inverse(b) - self._parabolic_inverse(a)) / width
        tangent = 1.0 / self._parabolic_derivative(self._parabolic_inverse(0.5 * (a + b)))
        return np.where(wide, secant, tangent)


@dataclasses.dataclass(frozen=True)
class InfiniteMPMap(_ParabolicBranchMixin, MapModel):

    beta: float = 0.5

    family = "infinite_mp"

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError("infinite_mp requires beta > 0, got %s" % self.beta)

    @property
    def params(self):
        return {"beta": self.beta}

    @property
    def dim_repeller(self):
        return 1.0

    @property
    def growth(self):
        return Growth(3.0 + self.beta, 2.0)

    def interval(self, n):
        n = _as_float(n)
        return (np.where(n == 1, 0.0, (n - 1.0) / n),
                np.where(n == 1, 0.5, n / (n + 1.0)))

    def _slope(self, n):
        n = _as_float(n)
        return n * (n + 1.0)

    def forward(self, n, x):
        n = _as_float(n)
        return np.where(n == 1, self._parabolic_forward(x),
                        self._slope(n) * x - (n ** 2 - 1.0))

    def derivative(self, n, x):
        n = _as_float(n)
        return np.where(n == 1, self._parabolic_derivative(x),
                        self._slope(n) + 0.0 * _as_float(x))

    def inverse(self, n, y):
        n = _as_float(n)
        y = _as_float(y)
        return np.where(n == 1, self._parabolic_inverse(y + 0.0 * n),
                        (y + n ** 2 - 1.0) / self._slope(n))

    def inverse_derivative(self, n, y):
        n = _as_float(n)
        y = _as_float(y)
        parabolic = 1.0 / self._parabolic_derivative(self._parabolic_inverse(y + 0.0 * n))
        return np.where(n == 1, parabolic, 1.0 / self._slope(n) + 0.0 * y)

    def deriv_bounds(self, n):
        n = _as_float(n)
        s = self._slope(n)
        return (np.where(n == 1, 1.0, s),
                np.where(n == 1, 2.0 + self.beta, s))

    def mean_ratio(self, n, a, b):
        n = _as_float(n)
        return np.where(n == 1, self._parabolic_ratio(a + 0.0 * n, b + 0.0 * n),
                        1.0 / self._slope(n))

    def branch_of(self, x):
        x = _as_float(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            n = np.floor(1.0 / (1.0 - x))
        n = np.where(x < 0.5, 1, n)
        return np.where((x >= 0) & (x < 1) & np.isfinite(n), n, 0).astype(np.int64)

    def log_slope_sup(self, log_n):
        return log_n + np.logaddexp(log_n, 0.0)

    def tail_sums(self, N, z, t):
        # n(n+1) = (n+1/2)^2 - 1/4, expanded to second order
        z = _as_float(z)
        if 2.0 * t <= 1.0:
            return np.full(z.shape, np.inf), np.zeros(z.shape)
        a = max(N, 1) + 1.5
        w = scipy.special.zeta(2.0 * t, a) + 0.25 * t * scipy.special.zeta(2.0 * t + 2.0, a)
        position = 1.0 - scipy.special.zeta(2.0 * t + 1.0, a) / scipy.special.zeta(2.0 * t, a)
        return np.full(z.shape, np.log(w)), np.full(z.shape, position)


def pathological_slope(label):
    label = _as_float(label)
    return 2.0 * label * np.log(2.0 * label) ** 2


def pathological_tail_length(first_label):
    """sum over labels n >= first_label of 1/x(n), by the midpoint integral."""
    return 0.5 / math.log(2.0 * first_label - 1.0)


@dataclasses.dataclass(frozen=True)
class PathologicalMap(_ParabolicBranchMixin, MapModel):
    """parabolic branch plus affine branches with labels N+1, N+2, ...

    Branch k >= 2 carries label N + k - 1 and slope 2n(log 2n)^2.  The
    slopes grow faster than any fixed polynomial with a fixed constant.
    """

    N: int = 2
    beta: float = 1.0

    family = "pathological"

    # branches with precomputed offsets
    offset_cap = 200000

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("pathological requires a positive integer N, got %s" % self.N)
        if not self.beta > 0:
            raise ConfigError("pathological requires beta > 0, got %s" % self.beta)
        total = self.packed_length
        if total >= 0.5:
            raise ConfigError(
                "pathological N=%i packs branches of total length %.4f beyond [1/2, 1]"
                % (self.N, total))

    @property
    def params(self):
        return {"N": self.N, "beta": self.beta}

    @property
    def non_condition5(self):
        return True

    def label(self, n):
        return _as_float(n) + self.N - 1.0

    @cached_property
    def _offsets(self):
        labels = self.N + 1.0 + np.arange(self.offset_cap)
        lengths = 1.0 / pathological_slope(labels)
        return 0.5 + np.concatenate([[0.0], np.cumsum(lengths)])

    @property
    def packed_length(self):
        labels = self.N + 1.0 + np.arange(self.offset_cap)
        explicit = np.sum(1.0 / pathological_slope(labels))
        return explicit + pathological_tail_length(self.N + 1.0 + self.offset_cap)

    def _left(self, n):
        n = _as_index(n)
        if np.any(n - 2 > self.offset_cap):
            raise BudgetExceeded("pathological branch beyond %i" % self.offset_cap)
        return self._offsets[np.clip(n - 2, 0, self.offset_cap)]

    def _slope(self, n):
        return pathological_slope(np.maximum(self.label(n), self.N + 1.0))

    def interval(self, n):
        n = _as_index(n)
        a = self._left(n)
        return (np.where(n == 1, 0.0, a),
                np.where(n == 1, 0.5, a + 1.0 / self._slope(n)))

    def forward(self, n, x):
        n = _as_index(n)
        return np.where(n == 1, self._parabolic_forward(x),
                        self._slope(n) * (_as_float(x) - self._left(n)))

    def derivative(self, n, x):
        n = _as_index(n)
        return np.where(n == 1, self._parabolic_derivative(x),
                        self._slope(n) + 0.0 * _as_float(x))

    def inverse(self, n, y):
        n = _as_index(n)
        y = _as_float(y)
        return np.where(n == 1, self._parabolic_inverse(y + 0.0 * n),
                        self._left(n) + y / self._slope(n))

    def inverse_derivative(self, n, y):
        n = _as_index(n)
        y = _as_float(y)
        parabolic = 1.0 / self._parabolic_derivative(self._parabolic_inverse(y + 0.0 * n))
        return np.where(n == 1, parabolic, 1.0 / self._slope(n) + 0.0 * y)

    def deriv_bounds(self, n):
        n = _as_index(n)
        s = self._slope(n)
        return (np.where(n == 1, 1.0, s),
                np.where(n == 1, 2.0 + self.beta, s))

    def mean_ratio(self, n, a, b):
        n = _as_index(n)
        return np.where(n == 1, self._parabolic_ratio(a + 0.0 * n, b + 0.0 * n),
                        1.0 / self._slope(n))

    def branch_of(self, x):
        x = _as_float(x)
        k = np.searchsorted(self._offsets, x, side="right") + 1
        k = np.minimum(k, self.offset_cap + 1)
        a = self._offsets[k - 2]
        inside = x < a + 1.0 / self._slope(k)
        n = np.where(x < 0.5, 1, np.where(inside, k, 0))
        return np.where((x >= 0) & (x < 1), n, 0).astype(np.int64)

    def log_slope_sup(self, log_n):
        # labels and indices coincide asymptotically
        return math.log(2.0) + log_n + 2.0 * np.log(math.log(2.0) + log_n)

    def tail_sums(self, N, z, t):
        z = _as_float(z)
        if t <= 1.0:
            return np.full(z.shape, np.inf), np.zeros(z.shape)
        first = self.label(N + 1)
        # substitute v = log 2u in the integral of x(u)^-t
        value, _ = scipy.integrate.quad(
            lambda v: 0.5 * math.exp((1.0 - t) * v) * v ** (-2.0 * t),
            math.log(2.0 * first - 1.0), np.inf)
        position = float(self._left(min(N + 1, self.offset_cap + 1)))
        return np.full(z.shape, math.log(value)), np.full(z.shape, position)


@dataclasses.dataclass(frozen=True)
class LinearMap(MapModel):
    """finitely many full affine branches x -> s (x - a) on [a, a + 1/s)."""

    slopes: tuple = ()
    lefts: Optional[tuple] = None

    family = "linear_custom"

    def __post_init__(self):
        slopes = tuple(float(s) for s in self.slopes)
        if len(slopes) < 1:
            raise ConfigError("linear_custom needs at least one branch")
        if any(s <= 1.0 for s in slopes):
            raise ConfigError("linear_custom slopes must exceed 1, got %s" % (slopes,))
        if self.lefts is None:
            lefts = tuple(np.concatenate([[0.0], np.cumsum(1.0 / np.array(slopes))[:-1]]))
        else:
            lefts = tuple(float(a) for a in self.lefts)
            if len(lefts) != len(slopes):
                raise ConfigError("linear_custom needs one interval per slope")
        rights = [a + 1.0 / s for a, s in zip(lefts, slopes)]
        order = np.argsort(lefts)
        for i, j in zip(order[:-1], order[1:]):
            if rights[i] > lefts[j] + 1e-12:
                raise ConfigError("linear_custom branch intervals overlap")
        if min(lefts) < -1e-12 or max(rights) > 1.0 + 1e-9:
            raise ConfigError("linear_custom branch intervals leave [0, 1]")
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "lefts", lefts)

    @property
    def natural_count(self):
        return len(self.slopes)

    @property
    def params(self):
        return {"slopes": list(self.slopes)}

    @property
    def growth(self):
        return Growth(max(max(self.slopes), 1.0 / min(self.slopes)), 0.0)

    def _slope(self, n):
        return np.asarray(self.slopes)[_as_index(n) - 1]

    def _left(self, n):
        return np.asarray(self.lefts)[_as_index(n) - 1]

    def interval(self, n):
        a = self._left(n)
        return a, a + 1.0 / self._slope(n)

    def forward(self, n, x):
        return self._slope(n) * (_as_float(x) - self._left(n))

    def derivative(self, n, x):
        return self._slope(n) + 0.0 * _as_float(x)

    def inverse(self, n, y):
        return self._left(n) + _as_float(y) / self._slope(n)

    def inverse_derivative(self, n, y):
        return 1.0 / self._slope(n) + 0.0 * _as_float(y)

    def deriv_bounds(self, n):
        s = self._slope(n)
        return s, s

    def mean_ratio(self, n, a, b):
        return 1.0 / self._slope(n) + 0.0 * _as_float(a)

    def branch_of(self, x):
        x = _as_float(x)
        lefts = np.asarray(self.lefts)
        rights = lefts + 1.0 / np.asarray(self.slopes)
        inside = (x[..., None] >= lefts) & (x[..., None] < rights)
        return np.where(inside.any(axis=-1), inside.argmax(axis=-1) + 1, 0).astype(np.int64)


# ----------------------------------------------------------------------
# builders
# ----------------------------------------------------------------------
def build_gauss():
    return GaussMap()


def build_renyi():
    return RenyiMap()


def build_infinite_mp(beta):
    return InfiniteMPMap(beta=float(beta))


def build_pathological(N, beta=1.0):
    return PathologicalMap(N=int(N), beta=float(beta))


def build_linear(slopes, intervals=None):
    """full affine map from slopes and optional (a, b) branch intervals."""
    slopes = [float(s) for s in slopes]
    lefts = None
    if intervals is not None:
        lefts = []
        for (a, b), s in zip(intervals, slopes):
            if abs((b - a) * s - 1.0) > 1e-9:
                raise ConfigError(
                    "interval (%s, %s) with slope %s is not a full branch" % (a, b, s))
            lefts.append(float(a))
    return LinearMap(slopes=tuple(slopes), lefts=None if lefts is None else tuple(lefts))


def truncate(model, N):
    """the same map restricted to branches 1..N."""
    if int(N) != N or N < 2:
        raise ConfigError("truncation requires an integer N >= 2, got %s" % N)
    N = int(N)
    if model.natural_count is not None:
        N = min(N, model.natural_count)
    return dataclasses.replace(model, truncation=N)


def from_descriptor(descriptor):
    """build a model from a ``{"family": ..., "params": {...}}`` mapping."""
    if not isinstance(descriptor, dict):
        raise ConfigError("map descriptor must be a JSON object")
    unknown = set(descriptor) - {"family", "params", "truncation", "name"}
    if unknown:
        raise ConfigError("unknown map descriptor fields: %s" % ", ".join(sorted(unknown)))
    family = descriptor.get("family")
    params = dict(descriptor.get("params") or {})

    def take(*allowed):
        extra = set(params) - set(allowed)
        if extra:
            raise ConfigError("unknown %s parameters: %s" % (family, ", ".join(sorted(extra))))

    if family == "gauss":
        take()
        model = build_gauss()
    elif family == "renyi":
        take()
        model = build_renyi()
    elif family == "infinite_mp":
        take("beta")
        if "beta" not in params:
            raise ConfigError("infinite_mp requires parameter beta")
        model = build_infinite_mp(params["beta"])
    elif family == "pathological":
        take("N", "beta")
        if "N" not in params:
            raise ConfigError("pathological requires parameter N")
        model = build_pathological(params["N"], params.get("beta", 1.0))
    elif family == "linear_custom":
        take("slopes", "branches")
        if "branches" in params:
            branches = params["branches"]
            slopes = [b["slope"] for b in branches]
            intervals = [tuple(b["interval"]) for b in branches]
            model = build_linear(slopes, intervals)
        elif "slopes" in params:
            model = build_linear(params["slopes"])
        else:
            raise ConfigError("linear_custom requires 'branches' or 'slopes'")
    else:
        raise ConfigError("unknown map family '%s', choose from %s" % (family, ", ".join(FAMILIES)))

    if descriptor.get("truncation") is not None:
        model = truncate(model, descriptor["truncation"])
    return model


def load_map(filename):
    with iotools.open_file(filename) as inf:
        try:
            descriptor = json.load(inf)
        except ValueError as msg:
            raise ConfigError("could not parse map descriptor %s: %s" % (filename, msg))
    return from_descriptor(descriptor)


# ----------------------------------------------------------------------
# cylinders
# ----------------------------------------------------------------------
class WordLevel(NamedTuple):
    """all words of one length, in lexicographic order.

    ``lo`` and ``hi`` are t log|psi_w'| at y = 0 and y = 1, ``length``
    is t log|I_w|.  ``a``/``b`` bound the cylinder, ``pos0``/``pos1``
    are psi_w(0) and psi_w(1).
    """

    depth: int
    lo: np.ndarray
    hi: np.ndarray
    length: np.ndarray
    a: np.ndarray
    b: np.ndarray
    pos0: np.ndarray
    pos1: np.ndarray

    @property
    def lower(self):
        return np.minimum(self.lo, self.hi)

    @property
    def upper(self):
        return np.maximum(self.lo, self.hi)


def symbol_count(model, N):
    if model.is_finite:
        return min(N, model.branch_count)
    return N


def word_levels(model, N, depth, t=1.0, tail=False, budget=None):
    """yield a :class:`WordLevel` for every depth 1..depth.

    With ``tail`` an aggregated symbol standing for all branches beyond
    N is appended after the explicit ones; its weight comes from
    :meth:`MapModel.tail_sums`.
    """
    if budget is None:
        budget = get_params()["budget"]["words"]
    K = symbol_count(model, N)
    tail = tail and not model.is_finite
    symbols = np.arange(1, K + 1)
    width = K + 1 if tail else K

    lo = np.zeros(1)
    hi = np.zeros(1)
    length = np.zeros(1)
    a = np.zeros(1)
    b = np.ones(1)
    pos0 = np.zeros(1)
    pos1 = np.ones(1)

    for d in range(1, depth + 1):
        if width ** d > budget:
            raise BudgetExceeded(
                "%i^%i words of %s exceed the word budget %i" % (width, d, model.name, budget))
        n = symbols[:, None]
        with np.errstate(divide="ignore"):
            new_lo = lo + t * np.log(model.inverse_derivative(n, pos0))
            new_hi = hi + t * np.log(model.inverse_derivative(n, pos1))
            new_length = length + t * np.log(model.mean_ratio(n, a, b))
        ia = model.inverse(n, a)
        ib = model.inverse(n, b)
        new_a = np.minimum(ia, ib)
        new_b = np.maximum(ia, ib)
        new_pos0 = model.inverse(n, pos0)
        new_pos1 = model.inverse(n, pos1)

        blocks = [new_lo, new_hi, new_length, new_a, new_b, new_pos0, new_pos1]
        if tail:
            w0, p0 = model.tail_sums(K, pos0, t)
            w1, p1 = model.tail_sums(K, pos1, t)
            wm, pm = model.tail_sums(K, 0.5 * (a + b), t)
            # the aggregated image of J has weight |J|^t times the tail sum
            extra = [lo + w0, hi + w1, length + wm, pm, pm, p0, p1]
            blocks = [np.vstack([blk, ext[None, :]]) for blk, ext in zip(blocks, extra)]

        lo, hi, length, a, b, pos0, pos1 = [np.broadcast_to(blk, (width, lo.size)).ravel() for blk in blocks]
        yield WordLevel(d, lo, hi, length, a, b, pos0, pos1)


def cylinders(model, N, depth):
    """stream all depth-length cylinder words of the N-truncation."""
    level = None
    for level in word_levels(model, N, depth, t=1.0):
        pass
    K = symbol_count(model, N)
    for i, word in enumerate(itertools.product(range(1, K + 1), repeat=depth)):
        yield CylinderWord(
            word=word,
            interval=(float(level.a[i]), float(level.b[i])),
            deriv_inf=float(np.exp(-level.upper[i])),
            deriv_sup=float(np.exp(-level.lower[i])))


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------
def tail_exponent(model, tail_log2=None):
    """asymptotic growth exponent of sup|T'| on branch n.

    Dyadic local exponents log2(s_2n / s_n) at n = 2^k for k at one,
    two and three thirds of ``tail_log2`` (``pressure.tail_log2`` by
    default), extrapolated to k -> infinity by a polynomial in 1/k.
    """
    if model.is_finite:
        return 0.0
    if tail_log2 is None:
        tail_log2 = get_params()["pressure"]["tail_log2"]
    if tail_log2 < 3:
        raise ConfigError("tail_log2 must be at least 3, got %s" % tail_log2)
    ks = float(tail_log2) * np.array([1.0, 2.0, 3.0]) / 3.0
    log2 = math.log(2.0)
    local = np.array([(model.log_slope_sup((k + 1) * log2) - model.log_slope_sup(k * log2)) / log2
                      for k in ks])
    coeffs = np.polyfit(1.0 / ks, local, len(ks) - 1)
    return float(coeffs[-1])


@dataclasses.dataclass
class ValidationReport:
    family: str
    surjective: bool
    inverse_error: float
    inverse_ok: bool
    expansion: bool
    expansion_iterate: Optional[int]
    parabolic: Optional[bool]
    growth_exponent: float
    growth_constant: float
    tail_exponent: float
    condition5: bool
    distortion: list
    tempered: bool

    @property
    def passed(self):
        return (self.surjective and self.inverse_ok and self.expansion and
                self.parabolic is not False and self.condition5 and self.tempered)

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["passed"] = self.passed
        return d


def _check_surjective(model, n):
    a, b = model.interval(n)
    a = np.broadcast_to(a, n.shape)
    b = np.broadcast_to(b, n.shape)
    fa = model.forward(n, a)
    fb = model.forward(n, b)
    ends_ok = np.all(np.abs(np.minimum(fa, fb)) < 1e-9) and np.all(np.abs(np.maximum(fa, fb) - 1.0) < 1e-9)
    s = np.linspace(0.0, 1.0, 11)
    x = a[:, None] + s[None, :] * (b - a)[:, None]
    fx = model.forward(n[:, None], x)
    steps = np.diff(fx, axis=1)
    monotone = np.all(steps > 0, axis=1) | np.all(steps < 0, axis=1)
    return bool(ends_ok and np.all(monotone))


def _check_inverse(model, n, samples):
    y = np.linspace(0.0, 1.0, samples)
    x = model.inverse(n[:, None], y[None, :])
    return float(np.max(np.abs(model.forward(n[:, None], x) - y[None, :])))


def _expansion_iterate(model, samples, max_iterate):
    x = np.linspace(0.0, 1.0, samples)
    parabolic = model.parabolic
    if parabolic is not None:
        x = x[x != parabolic.point]
    log_derivative = np.zeros(x.shape)
    valid = np.ones(x.shape, dtype=bool)
    orbit = x.copy()
    for m in range(1, max_iterate + 1):
        with np.errstate(all="ignore"):
            orbit, d = model.map(np.where(valid, orbit, 0.5))
        valid &= np.isfinite(orbit) & np.isfinite(d)
        log_derivative = np.where(valid, log_derivative + np.log(np.where(valid, d, 1.0)), 0.0)
        if valid.any() and np.all(log_derivative[valid] > 0.0):
            return m
    return None


def _growth_fit(model, params):
    count = model.branch_count
    hi = params["growth_to"] if count is None else min(count, params["growth_to"])
    lo = params["growth_from"] if count is None or count >= params["growth_from"] * 4 else 1
    n = np.unique(np.geomspace(lo, hi, 40).astype(np.int64))
    if n.size < 3:
        return float("nan"), float("nan")
    _, sup = model.deriv_bounds(n)
    fit = sm.OLS(np.log(sup), sm.add_constant(np.log(n.astype(float)))).fit()
    log_c, gamma = fit.params
    return float(gamma), float(math.exp(log_c))


def distortion_sequence(model, depth, N=8):
    """max over words of (1/d) log(deriv_sup / deriv_inf) for d = 1..depth."""
    rho = []
    for level in word_levels(model, symbol_count(model, N), depth, t=1.0):
        rho.append(float(np.max(level.upper - level.lower)) / level.depth)
    return rho


def validate(model, depth=4, params=None):
    """check the structural conditions of a model; failures are reported."""
    if params is None:
        params = get_params()["validate"]
    count = model.branch_count
    n = np.arange(1, (200 if count is None else min(count, 200)) + 1)

    surjective = _check_surjective(model, n)
    inverse_error = _check_inverse(model, n, params["samples"])
    m = _expansion_iterate(model, params["samples"], params["max_iterate"])

    parabolic = None
    if model.parabolic is not None:
        p, k, _ = model.parabolic
        fp = float(model.forward(k, p))
        dp = float(model.derivative(k, p))
        parabolic = abs(fp - p) <= 1e-12 and abs(dp - 1.0) <= 1e-12

    gamma_hat, c_hat = _growth_fit(model, params)
    far = tail_exponent(model)
    declared = model.growth
    if declared is None or model.non_condition5:
        condition5 = False
    elif model.is_finite:
        condition5 = True
    else:
        inf, sup = model.deriv_bounds(n)
        nn = n.astype(float) ** declared.gamma
        within = np.all(sup <= declared.C * nn) and np.all(inf >= nn / declared.C)
        condition5 = bool(within and abs(gamma_hat - declared.gamma) <= 0.1 and
                          abs(far - declared.gamma) <= 0.1)

    rho = distortion_sequence(model, depth)
    tempered = all(b <= a + 1e-12 for a, b in zip(rho[:-1], rho[1:]))

    report = ValidationReport(
        family=model.family,
        surjective=surjective,
        inverse_error=inverse_error,
        inverse_ok=inverse_error <= 1e-10,
        expansion=m is not None,
        expansion_iterate=m,
        parabolic=parabolic,
        growth_exponent=gamma_hat,
        growth_constant=c_hat,
        tail_exponent=far,
        condition5=condition5,
        distortion=rho,
        tempered=tempered)
    if not report.passed:
        L.warning("%s fails validation: %s", model.name, report.as_dict())
    return report
