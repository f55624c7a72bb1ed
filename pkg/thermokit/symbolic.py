"""symbolic.py - renewal type countable Markov shifts
====================================================

Three transition rules on the vertex set {0, 1, 2, ...}:

renewal
    0 -> every vertex, n -> n-1.
n_renewal(N)
    vertices 0..N form a full block (each goes everywhere), N+1 fans
    into the block, every vertex m >= N+2 counts down to m-1.
    n_renewal(0) is the renewal shift.
infinite_renewal
    even vertices go everywhere, 2n-1 -> 2n-2 for n >= 1 and 1 goes to
    every even vertex.

Rules are evaluated on finite vertex caps.  Gurevich pressure is read
from weighted cycle sums through a base vertex, restricted to the
strongly connected block of the base under the cap.
"""

import dataclasses
import itertools
import logging
import math
from typing import Callable, Optional

import numpy as np
import pandas as pd
import scipy.sparse
import scipy.sparse.csgraph

from thermokit import maps
from thermokit.config import get_params
from thermokit.errors import ConfigError

L = logging.getLogger(__name__)

KINDS = ("renewal", "n_renewal", "infinite_renewal", "custom")


@dataclasses.dataclass(frozen=True)
class TransitionRule:
    kind: str
    N: Optional[int] = None
    edges: Optional[frozenset] = None

    def allowed(self, i, j):
        """vectorised edge predicate."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        valid = (i >= 0) & (j >= 0)
        if self.kind == "renewal":
            ok = (i == 0) | (j == i - 1)
        elif self.kind == "n_renewal":
            N = self.N
            ok = ((i <= N) |
                  ((i == N + 1) & (j <= N)) |
                  ((i >= N + 2) & (j == i - 1)))
        elif self.kind == "infinite_renewal":
            odd = i % 2 == 1
            ok = (~odd |
                  (odd & (j == i - 1)) |
                  ((i == 1) & (j % 2 == 0)))
        else:
            pairs = np.stack(np.broadcast_arrays(i, j), axis=-1)
            ok = np.array([tuple(p) in self.edges for p in pairs.reshape(-1, 2)],
                          dtype=bool).reshape(pairs.shape[:-1])
        return valid & ok

    def matrix(self, cap):
        """0/1 adjacency matrix on the vertices below ``cap``."""
        v = np.arange(cap)
        return self.allowed(v[:, None], v[None, :]).astype(float)

    def describe(self):
        d = {"kind": self.kind}
        if self.N is not None:
            d["N"] = self.N
        if self.edges is not None:
            d["edges"] = sorted(list(e) for e in self.edges)
        return d


def build_rule(kind, N=None, edges=None):
    if kind not in KINDS:
        raise ConfigError("unknown transition rule '%s', choose from %s" % (kind, ", ".join(KINDS)))
    if kind == "n_renewal":
        if N is None or int(N) != N or N < 0:
            raise ConfigError("n_renewal requires an integer N >= 0, got %s" % N)
        N = int(N)
    elif N is not None:
        raise ConfigError("%s takes no N" % kind)
    if kind == "custom":
        if not edges:
            raise ConfigError("custom rule requires a list of edges")
        edges = frozenset((int(i), int(j)) for i, j in edges)
    elif edges is not None:
        raise ConfigError("%s takes no edge list" % kind)
    return TransitionRule(kind, N, edges)


@dataclasses.dataclass(frozen=True)
class CyclePotential:
    """a locally constant potential: one weight per vertex."""

    weight: Callable
    description: str = ""

    def __call__(self, vertices):
        values = np.asarray(self.weight(np.asarray(vertices)), dtype=float)
        values = np.broadcast_to(values, np.shape(vertices))
        if not np.all(np.isfinite(values)):
            raise ConfigError("potential %s is not finite on every vertex" % self.description)
        return values

    @classmethod
    def constant(cls, c):
        return cls(lambda v: np.full(np.shape(v), float(c)), "constant(%g)" % c)

    @classmethod
    def from_values(cls, values, default=0.0):
        table = dict(enumerate(values)) if not isinstance(values, dict) else dict(values)

        def weight(v):
            return np.array([table.get(int(x), default) for x in np.ravel(v)]).reshape(np.shape(v))

        return cls(weight, "table")


# ----------------------------------------------------------------------
# graph structure
# ----------------------------------------------------------------------
def base_component(rule, base, vertex_cap):
    """sorted vertices of the strongly connected block containing ``base``."""
    if not 0 <= base < vertex_cap:
        raise ConfigError("base vertex %i outside the cap %i" % (base, vertex_cap))
    A = scipy.sparse.csr_matrix(rule.matrix(vertex_cap))
    _, labels = scipy.sparse.csgraph.connected_components(A, directed=True, connection="strong")
    block = np.flatnonzero(labels == labels[base])
    if block.size == 1 and A[base, base] == 0:
        raise ConfigError("vertex %i lies on no cycle below the cap %i" % (base, vertex_cap))
    return block


def period(rule, vertex_cap, base=0):
    """period of the block of ``base``: gcd of level differences along edges."""
    block = base_component(rule, base, vertex_cap)
    A = scipy.sparse.csr_matrix(rule.matrix(vertex_cap)[np.ix_(block, block)])
    start = int(np.searchsorted(block, base))
    levels = scipy.sparse.csgraph.shortest_path(A, directed=True, unweighted=True, indices=start)
    rows, cols = A.nonzero()
    differences = (levels[rows] + 1 - levels[cols]).astype(np.int64)
    return int(np.gcd.reduce(np.abs(differences)))


def check_mixing(rule, vertex_cap, base=0):
    """True iff the capped block of ``base`` is primitive."""
    try:
        return period(rule, vertex_cap, base) == 1
    except ConfigError as msg:
        L.warning("mixing check: %s", msg)
        return False


def capped_spectral_radius(rule, vertex_cap, phi=None, base=0):
    """spectral radius of the weighted adjacency matrix on the base block."""
    block = base_component(rule, base, vertex_cap)
    W = rule.matrix(vertex_cap)[np.ix_(block, block)]
    if phi is not None:
        W = W * np.exp(phi(block))[:, None]
    return float(np.max(np.abs(np.linalg.eigvals(W))))


# ----------------------------------------------------------------------
# Gurevich pressure
# ----------------------------------------------------------------------
@dataclasses.dataclass
class GurevichResult:
    n: np.ndarray
    estimates: np.ndarray
    averages: np.ndarray
    cap: int
    base: int
    block_size: int

    @property
    def value(self):
        return float(self.estimates[-1])

    def to_frame(self):
        return pd.DataFrame({"n": self.n, "estimate": self.estimates, "cap": self.cap})


def gurevich_pressure(rule, phi=None, base=0, n_max=None, vertex_cap=None):
    """cycle-sum estimates of the Gurevich pressure through ``base``.

    log Z_n is the log of the weighted sum over closed walks of length n
    through the base, accumulated by renormalised vector-matrix products.
    ``averages`` holds (1/n) log Z_n; ``estimates`` the ratio form
    (log Z_n - log Z_m) / (n - m) over the previous nonzero cycle sum,
    which settles at the geometric rate of the spectral gap.
    """
    params = get_params()["symbolic"]
    n_max = n_max or params["n_max"]
    vertex_cap = vertex_cap or params["vertex_cap"]
    phi = phi or CyclePotential.constant(0.0)

    block = base_component(rule, base, vertex_cap)
    W = scipy.sparse.csr_matrix(rule.matrix(vertex_cap)[np.ix_(block, block)]
                                * np.exp(phi(block))[:, None])
    start = int(np.searchsorted(block, base))

    v = np.zeros(block.size)
    v[start] = 1.0
    log_scale = 0.0
    log_z = np.full(n_max, -np.inf)
    for n in range(1, n_max + 1):
        v = W.T @ v
        total = v.sum()
        v /= total
        log_scale += math.log(total)
        if v[start] > 0:
            log_z[n - 1] = math.log(v[start]) + log_scale

    n = np.arange(1, n_max + 1)
    averages = log_z / n
    estimates = np.full(n_max, np.nan)
    last = None
    for k in range(n_max):
        if not np.isfinite(log_z[k]):
            continue
        if last is not None:
            estimates[k] = (log_z[k] - log_z[last]) / (k - last)
        last = k
    # carry the last estimate over lengths without cycles
    estimates = pd.Series(estimates).ffill().to_numpy()
    if not np.isfinite(estimates[-1]):
        estimates[-1] = averages[np.isfinite(averages)][-1]
    return GurevichResult(n, estimates, averages, vertex_cap, base, block.size)


def gurevich_by_cap(rule, caps, phi=None, base=0, n_max=None):
    """estimates for increasing caps; flags a decrease."""
    rows = []
    for cap in sorted(caps):
        result = gurevich_pressure(rule, phi, base, n_max, cap)
        rows.append({"cap": cap, "estimate": result.value})
    frame = pd.DataFrame(rows)
    monotone = bool(np.all(np.diff(frame["estimate"]) >= -1e-9))
    if not monotone:
        L.warning("Gurevich estimates of %s decrease with the vertex cap", rule.kind)
    return frame, monotone


# ----------------------------------------------------------------------
# conjugacy with parabolic interval maps
# ----------------------------------------------------------------------
def coding_rule(N):
    """target shift of an N-branch map with parabolic branch 1."""
    return build_rule("n_renewal", N - 2)


def encode(word, N):
    """recode a cyclic branch word into vertices of n_renewal(N-2).

    Hyperbolic branch b becomes block vertex b-2; a parabolic symbol
    with r symbols left in its cyclic run of 1s becomes N-2+r.
    """
    k = len(word)
    if all(b == 1 for b in word):
        return None
    out = []
    for i, b in enumerate(word):
        if b != 1:
            out.append(b - 2)
            continue
        r = 0
        while word[(i + r) % k] == 1:
            r += 1
        out.append(N - 2 + r)
    return tuple(out)


def decode(cycle, N):
    return tuple(v + 2 if v <= N - 2 else 1 for v in cycle)


def _admissible_cycle(rule, cycle):
    src = np.asarray(cycle)
    dst = np.roll(src, -1)
    return bool(np.all(rule.allowed(src, dst)))


def _closed_walks(rule, length, cap):
    """all closed walks of ``length`` vertices below ``cap``, lexicographic."""
    A = rule.matrix(cap).astype(bool)
    successors = [np.flatnonzero(A[i]) for i in range(cap)]

    def extend(path):
        if len(path) == length:
            if A[path[-1], path[0]]:
                yield tuple(path)
            return
        for j in successors[path[-1]]:
            yield from extend(path + [int(j)])

    for v in range(cap):
        yield from extend([v])


def _periodic_point(model, word):
    y = np.array(0.5)
    for _ in range(400):
        previous = y
        for b in reversed(word):
            y = model.inverse(b, y)
        if abs(float(y - previous)) < 1e-15:
            break
    return float(y)


@dataclasses.dataclass
class ConjugacyReport:
    model: dict
    N: int
    depth: int
    rule: dict
    words_checked: int
    cycles_checked: int
    excluded: int
    mismatches: list

    @property
    def passed(self):
        return not self.mismatches

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["passed"] = self.passed
        return d


def itinerary_conjugacy_check(model, N, depth):
    """compare periodic itineraries of the N-truncation with n_renewal(N-2)."""
    parabolic = model.parabolic
    if parabolic is None or parabolic.branch != 1:
        raise ConfigError("conjugacy check needs a map whose branch 1 is parabolic")
    if N < 2:
        raise ConfigError("conjugacy check needs N >= 2, got %s" % N)
    target = maps.truncate(model, N)
    rule = coding_rule(N)
    mismatches = []
    words = excluded = 0

    for k in range(1, depth + 1):
        for word in itertools.product(range(1, N + 1), repeat=k):
            cycle = encode(word, N)
            if cycle is None:
                # the parabolic fixed point and its preimages are not coded
                excluded += 1
                continue
            words += 1
            orbit = [_periodic_point(target, word[i:] + word[:i]) for i in range(k)]
            itinerary = tuple(int(b) for b in target.branch_of(np.array(orbit)))
            if itinerary != word:
                mismatches.append({"side": "interval", "word": list(word),
                                   "itinerary": list(itinerary)})
            elif not _admissible_cycle(rule, cycle):
                mismatches.append({"side": "interval", "word": list(word), "cycle": list(cycle)})

    cycles = 0
    cap = N - 1 + depth
    for k in range(1, depth + 1):
        for cycle in _closed_walks(rule, k, cap):
            cycles += 1
            word = decode(cycle, N)
            if encode(word, N) != cycle:
                mismatches.append({"side": "shift", "cycle": list(cycle), "word": list(word)})
                continue
            x = _periodic_point(target, word)
            if not 0.0 < x < 1.0 or int(target.branch_of(np.array(x))) != word[0]:
                mismatches.append({"side": "shift", "cycle": list(cycle), "point": x})

    if cycles != words:
        mismatches.append({"side": "count", "words": words, "cycles": cycles})
    if mismatches:
        L.warning("%i coding mismatches for %s at depth %i", len(mismatches), target.name, depth)
    return ConjugacyReport(target.describe(), N, depth, rule.describe(), words, cycles,
                           excluded, mismatches)
