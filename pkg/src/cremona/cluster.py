"""Weighted clusters of infinitely near points and their log discrepancies."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from ._kernels import max_weight_ideal
from .errors import InputError

TERMINAL = "Terminal"
CANONICAL = "Canonical"
NON_CANONICAL = "NonCanonical"
_CLASS_ORDER = {NON_CANONICAL: 0, CANONICAL: 1, TERMINAL: 2}


@dataclass(frozen=True)
class ClusterPoint:
    """A point of a cluster: a proper point (level 0) or one infinitely near
    to ``parent``.  ``proximate_to`` always contains the parent; a satellite
    point is proximate to one more strict ancestor."""

    id: str
    mult: int
    parent: str | None = None
    proximate_to: frozenset = frozenset()
    on_c0: bool | None = None

    def __post_init__(self):
        prox = frozenset(self.proximate_to)
        if self.parent is not None and self.parent not in prox:
            prox = prox | {self.parent}
        object.__setattr__(self, "proximate_to", prox)

    @property
    def is_root(self) -> bool:
        return self.parent is None

    @property
    def is_satellite(self) -> bool:
        return len(self.proximate_to) == 2


def point(id, mult, parent=None, satellite_of=None, on_c0=None) -> ClusterPoint:
    prox = set()
    if parent is not None:
        prox.add(parent)
    if satellite_of is not None:
        prox.add(satellite_of)
    return ClusterPoint(id, mult, parent, frozenset(prox), on_c0)


@dataclass(frozen=True)
class WeightedCluster:
    points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def ids(self):
        return [p.id for p in self.points]

    def get(self, pid) -> ClusterPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def __contains__(self, pid):
        return any(p.id == pid for p in self.points)

    def roots(self):
        return [p for p in self.points if p.parent is None]

    def children(self, pid):
        return [p for p in self.points if p.parent == pid]

    def proximate_points(self, pid):
        return [p for p in self.points if pid in p.proximate_to]

    def excess(self, pid) -> int:
        """Intersection of the strict transform with E_pid outside the cluster."""
        return self.get(pid).mult - sum(q.mult for q in self.proximate_points(pid))

    def root_of(self, pid) -> str:
        p = self.get(pid)
        while p.parent is not None:
            p = self.get(p.parent)
        return p.id

    def subtree(self, pid) -> list:
        keep = {pid}
        for p in self.points:
            if p.parent in keep:
                keep.add(p.id)
        return [p for p in self.points if p.id in keep]

    def mults(self):
        return sorted((p.mult for p in self.points), reverse=True)

    def max_mult(self) -> int:
        return max((p.mult for p in self.points), default=1)

    def delta(self) -> int:
        return sum(p.mult * (p.mult - 1) // 2 for p in self.points)

    def replace_points(self, points: Iterable[ClusterPoint]) -> "WeightedCluster":
        return WeightedCluster(tuple(points))

    def without_root(self, pid, children_on_c0=False) -> "WeightedCluster":
        """Remove the level-0 point ``pid``; its exceptional divisor stops being
        exceptional, so its children become level-0 and forget it."""
        out = []
        for p in self.points:
            if p.id == pid:
                continue
            if p.parent == pid:
                out.append(ClusterPoint(p.id, p.mult, None, frozenset(), children_on_c0))
            elif pid in p.proximate_to:
                out.append(replace(p, proximate_to=p.proximate_to - {pid}))
            else:
                out.append(p)
        return WeightedCluster(tuple(out))


@dataclass(frozen=True)
class PlanePair:
    degree: int
    cluster: WeightedCluster = field(default_factory=WeightedCluster)

    def max_mult(self) -> int:
        return self.cluster.max_mult()


@dataclass
class Violation:
    id: str | None
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, pid, kind, message):
        self.violations.append(Violation(pid, kind, message))

    def messages(self):
        return [str(v) for v in self.violations]


def validate_cluster(cluster: WeightedCluster, context: str = "plane") -> ValidationReport:
    """Report every violated structural invariant; never raises."""
    report = ValidationReport()
    seen = {}
    for idx, p in enumerate(cluster.points):
        if p.id in seen:
            report.add(p.id, "duplicate", f"id {p.id!r} used twice")
        seen[p.id] = idx
        if not isinstance(p.mult, int) or p.mult < 1:
            report.add(p.id, "mult", f"multiplicity {p.mult} at {p.id} must be >= 1")
        if p.parent is None:
            if p.proximate_to:
                report.add(p.id, "proximity", f"level-0 point {p.id} cannot be proximate to anything")
        else:
            if p.parent not in seen or seen[p.parent] >= idx:
                report.add(p.id, "forest", f"parent {p.parent} of {p.id} must precede it")
            if len(p.proximate_to) > 2:
                report.add(p.id, "proximity", f"{p.id} proximate to {len(p.proximate_to)} points (max 2)")
            extra = p.proximate_to - {p.parent}
            for q in extra:
                if q not in seen or not _is_strict_ancestor(cluster, q, p.parent):
                    report.add(p.id, "satellite", f"{p.id}: {q} is not a strict ancestor of {p.parent}")
        if p.on_c0 is not None:
            if context != "ruled":
                report.add(p.id, "flag", f"on_c0 flag on {p.id} is only meaningful on a ruled surface")
            elif p.parent is not None and p.on_c0:
                report.add(p.id, "flag", f"on_c0 flag on {p.id} allowed on level-0 points only")
    if report.ok:
        for p in cluster.points:
            load = sum(q.mult for q in cluster.proximate_points(p.id))
            if p.mult < load:
                report.add(p.id, "proximity", f"proximity: {p.mult} < {load} at {p.id}")
    return report


def _is_strict_ancestor(cluster, anc, pid):
    try:
        p = cluster.get(pid)
    except KeyError:
        return False
    while p.parent is not None:
        if p.parent == anc:
            return True
        p = cluster.get(p.parent)
    return False


def validate_plane_pair(pair: PlanePair) -> ValidationReport:
    report = validate_cluster(pair.cluster, "plane")
    d = pair.degree
    if not isinstance(d, int) or d < 1:
        report.add(None, "degree", f"degree {d} must be a positive integer")
        return report
    if d == 1 and len(pair.cluster):
        report.add(None, "degree", "a line carries no singular points")
    for p in pair.cluster:
        if d >= 2 and p.mult > d - 1:
            report.add(p.id, "mult", f"multiplicity {p.mult} at {p.id} exceeds degree - 1 = {d - 1}")
    # Bezout with lines through two proper points or along a free first-order direction
    roots = pair.cluster.roots()
    for i, p in enumerate(roots):
        for q in roots[i + 1:]:
            if p.mult + q.mult > d:
                report.add(q.id, "bezout", f"line through {p.id},{q.id}: {p.mult}+{q.mult} > {d}")
        for q in pair.cluster.children(p.id):
            if p.mult + q.mult > d:
                report.add(q.id, "bezout", f"line through {p.id} towards {q.id}: {p.mult}+{q.mult} > {d}")
    if report.ok:
        # a curve of degree k passes through any closed set of k(k+3)/2 cluster points
        index = {p.id: i for i, p in enumerate(pair.cluster.points)}
        parents = [-1 if p.parent is None else index[p.parent] for p in pair.cluster.points]
        weights = [p.mult for p in pair.cluster.points]
        for k in (2, 3):
            if k >= d:
                break
            total, chosen = max_weight_ideal(parents, weights, k * (k + 3) // 2)
            if total is not None and total > k * d:
                ids = ",".join(pair.cluster.points[i].id for i in chosen)
                report.add(None, "bezout", f"degree-{k} curve through {ids}: {total} > {k * d}")
                break
    if report.ok and combinatorial_genus(pair) < 0:
        report.add(None, "genus", f"combinatorial genus {combinatorial_genus(pair)} < 0")
    return report


# -- genus -------------------------------------------------------------------

def arithmetic_genus_ruled(a, alpha, beta) -> int:
    """p_a of the class alpha*C0 + beta*f on F_a."""
    self_int = -a * alpha * alpha + 2 * alpha * beta
    k_dot = alpha * (a - 2) - 2 * beta
    return (self_int + k_dot) // 2 + 1


def combinatorial_genus(pair) -> int:
    if isinstance(pair, PlanePair):
        d = pair.degree
        return (d - 1) * (d - 2) // 2 - pair.cluster.delta()
    return arithmetic_genus_ruled(pair.a, pair.alpha, pair.beta) - pair.cluster.delta()


# -- discrepancies -----------------------------------------------------------

@dataclass(frozen=True)
class DiscrepancyReport:
    coefficient: Fraction
    entries: dict
    minimum: Fraction
    witness: str
    saturation: dict = field(default_factory=dict)
    stable: bool = True

    def classification(self) -> str:
        if self.minimum > 0:
            return TERMINAL
        if self.minimum == 0:
            return CANONICAL
        return NON_CANONICAL


def _as_coefficient(c) -> Fraction:
    c = Fraction(c)
    if not (0 < c <= 1):
        raise InputError(
            f"coefficient {c} outside (0, 1]: saturation needs every extra blowup "
            "to add 1 - c >= 0 to the discrepancy"
        )
    return c


def discrepancy_entries(cluster: WeightedCluster, c: Fraction) -> dict:
    """a_i = 1 + sum(a_j for j in proximate_to(i)) - c*m_i, in forest order."""
    a = {}
    for p in cluster.points:
        a[p.id] = 1 + sum((a[j] for j in p.proximate_to), Fraction(0)) - c * p.mult
    return a


def exceptional_adjacency(cluster: WeightedCluster) -> set:
    """Pairs of exceptional divisors that meet on the resolution of the cluster."""
    adj = set()
    for p in cluster.points:
        if len(p.proximate_to) == 2:
            adj.discard(frozenset(p.proximate_to))
        for q in p.proximate_to:
            adj.add(frozenset((p.id, q)))
    return adj


def log_discrepancies(pair, coefficient, along_c0: bool = False) -> DiscrepancyReport:
    """Discrepancies of the cluster divisors of ``(S, c*C)`` and the minimum over
    all exceptional divisors.

    Beyond the cluster itself the minimum sees one more blowup at every
    intersection of two exceptional divisors (1 + a_i + a_j), at every free
    point where the strict transform meets E_i (1 + a_i - c) and at a general
    point of the curve (1 - c).  When every value is >= -1 nothing further can
    go lower.  Otherwise some E_u has a_u < -1 and the chain of blowups along
    E_u decreases without bound; it is followed to a depth cap and the report
    is marked unstable.

    ``along_c0`` restricts everything to valuations centred on C0 (subtrees of
    level-0 points flagged ``on_c0``).
    """
    c = _as_coefficient(coefficient)
    cluster = pair.cluster if hasattr(pair, "cluster") else pair
    entries = discrepancy_entries(cluster, c)
    if along_c0:
        keep = set()
        for r in cluster.roots():
            if r.on_c0:
                keep.update(q.id for q in cluster.subtree(r.id))
    else:
        keep = set(entries)

    values = {pid: entries[pid] for pid in cluster.ids if pid in keep}
    sat = {}
    for pair_ids in sorted(exceptional_adjacency(cluster), key=lambda s: sorted(s)):
        i, j = sorted(pair_ids, key=cluster.ids.index)
        if i in keep and j in keep:
            sat[f"sat({i},{j})"] = 1 + entries[i] + entries[j]
    for pid in cluster.ids:
        if pid in keep and cluster.excess(pid) > 0:
            sat[f"sat({pid},C)"] = 1 + entries[pid] - c
    if not along_c0:
        sat["sat(C)"] = 1 - c

    candidates = list(values.items()) + list(sat.items())
    stable = True
    worst = min(candidates, key=lambda kv: kv[1]) if candidates else None
    lows = [(pid, v) for pid, v in candidates if v < -1]
    if lows:
        stable = False
        pid, v = min(lows, key=lambda kv: kv[1])
        depth = 2 * len(cluster) + 3
        chain_value = depth * (1 + v)
        sat[f"sat({pid},chain{depth})"] = chain_value
        candidates.append((f"sat({pid},chain{depth})", chain_value))
        worst = min(candidates, key=lambda kv: kv[1])
    if worst is None:
        # nothing centred on C0: vacuously terminal there
        return DiscrepancyReport(c, entries, Fraction(1), "none", sat, True)
    return DiscrepancyReport(c, entries, worst[1], worst[0], sat, stable)


def classify_singularities(pair, coefficient, along_c0: bool = False):
    """Return (classification, witness) for the pair (S, c*C)."""
    rep = log_discrepancies(pair, coefficient, along_c0=along_c0)
    return rep.classification(), rep.witness


def class_rank(label: str) -> int:
    return _CLASS_ORDER[label]


# -- certificates ------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    kind: str
    holds: bool
    data: dict


def noether_fano_certificate(n, d_high=None, d_low=None, max_mult=None) -> Certificate:
    """Multiplicity form: with max_mult*(n+1) <= d_high the pair
    (P^n, (n+1)/d_high X) is canonical, so X is not Cremona equivalent to any
    birational embedding of lower degree d_low.

    Plane form: ``noether_fano_certificate(pair)`` checks canonicity of
    (P^2, 3/d C) directly, which certifies that C is not Cremona equivalent to
    a curve of smaller degree.
    """
    if isinstance(n, PlanePair):
        pair = n
        d = pair.degree
        if d < 3:
            raise InputError("plane certificate needs degree >= 3 (coefficient 3/d <= 1)")
        c = Fraction(3, d)
        rep = log_discrepancies(pair, c)
        cls = rep.classification()
        return Certificate(
            "NoetherFano",
            cls != NON_CANONICAL,
            {"n": 2, "degree": d, "coefficient": c, "classification": cls,
             "minimum": rep.minimum, "witness": rep.witness,
             "claim": f"not Cremona equivalent to any curve of degree < {d}"},
        )
    if n < 2:
        raise InputError("ambient dimension must be >= 2")
    if d_low is None or d_high is None or max_mult is None:
        raise InputError("need d_high, d_low and max_mult")
    if d_low < 1 or d_high <= d_low:
        raise InputError(f"need d_high > d_low >= 1, got {d_high} and {d_low}")
    lhs = max_mult * (n + 1)
    return Certificate(
        "NoetherFano",
        lhs <= d_high,
        {"n": n, "d_high": d_high, "d_low": d_low, "max_mult": max_mult,
         "inequality": f"{max_mult}*{n + 1} = {lhs} <= {d_high}",
         "bound": Fraction(d_high, n + 1)},
    )


def jung_test(pair: PlanePair) -> Certificate:
    m = pair.cluster.mults() + [1, 1, 1]
    m1, m2, m3 = m[:3]
    total = m1 + m2 + m3
    return Certificate(
        "Jung",
        total <= pair.degree,
        {"degree": pair.degree, "m1": m1, "m2": m2, "m3": m3,
         "inequality": f"{m1}+{m2}+{m3} = {total} <= {pair.degree}"},
    )


def subcritical(pair: PlanePair) -> bool:
    """m1 < d/3 with m1 read as 1 for a smooth curve."""
    return 3 * pair.max_mult() < pair.degree


__all__ = [
    "ClusterPoint", "WeightedCluster", "PlanePair", "ValidationReport", "Violation",
    "DiscrepancyReport", "Certificate", "point", "validate_cluster",
    "validate_plane_pair", "combinatorial_genus", "arithmetic_genus_ruled",
    "log_discrepancies", "classify_singularities", "noether_fano_certificate",
    "jung_test", "subcritical", "TERMINAL", "CANONICAL", "NON_CANONICAL",
    "class_rank",
]
