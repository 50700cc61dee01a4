"""Cremona equivalence of rational plane curves to a line.

Two independent certificates:

* the emptiness of |2K + C| on the resolution (unloading plus quadratic
  reductions, both h^0-preserving), and
* a log MMP for (S, C/2) run on the intersection lattice, contracting only
  (-1)-classes certified as curves (exceptional ends, lines, conics,
  Noether-reducible classes through free points) with C.E <= 1.

A positive answer from either side is sound; the two must never disagree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import lattice
from ._kernels import minus_one_profiles
from .cluster import ClusterPoint, PlanePair, WeightedCluster, combinatorial_genus, validate_plane_pair
from .errors import InputError, InvariantViolation

EMPTY = "Empty"
NON_EMPTY = "NonEmpty"
UNKNOWN = "Unknown"

EQUIVALENT = "EquivalentToLine"
NOT_EQUIVALENT = "NotEquivalent"
UNDETERMINED = "Undetermined"

CLUSTER_END = "ClusterEnd"
LINE = "Line"
CONIC = "Conic"
SEARCH = "SearchFound"
_KIND_ORDER = {CLUSTER_END: 0, LINE: 1, CONIC: 2, SEARCH: 3}

END_PLANE = "plane"
END_FIBRE = "fibre"
END_SECTION = "section"
END_DOUBLE_SECTION = "double_section_F1"
STALLED = "Stalled"

GENERAL_POSITION = "free points in general position"


@dataclass(frozen=True)
class BlowupModel:
    surface: lattice.BlowupSurface
    curve_class: tuple
    cluster: WeightedCluster
    degree: int
    aux: tuple = ()

    def label_index(self, label):
        return self.surface.basis_labels.index(label)


def _check_rational(pair):
    rep = validate_plane_pair(pair)
    if not rep.ok:
        raise InputError("invalid pair: " + "; ".join(rep.messages()))
    g = combinatorial_genus(pair)
    if g != 0:
        raise InputError(f"curve has genus {g}; the line criterion applies to rational curves")


def resolve_to_lattice(pair: PlanePair) -> BlowupModel:
    _check_rational(pair)
    s = lattice.plane()
    for p in pair.cluster:
        s = lattice.blow_up(s, p.id, check=False)
    C = (pair.degree,) + tuple(-p.mult for p in pair.cluster)
    return BlowupModel(s, C, pair.cluster, pair.degree)


# -- |2K + C| -------------------------------------------------------------------

def unloading(delta: int, mus: dict, cluster: WeightedCluster):
    """Unload the class delta*e0 - sum mu_i e_i along the cluster proximities.

    While a point p with mu_p >= 0 has mu_p < sum of mu_q over q proximate to
    p, the strict transform of E_p is a fixed component; remove it.
    Returns ``(delta, mus, steps)``.
    """
    mus = dict(mus)
    steps = []
    guard = 10_000
    changed = True
    while changed:
        changed = False
        for p in cluster.points:
            if p.id not in mus or mus[p.id] < 0:
                continue
            prox = [q.id for q in cluster.proximate_points(p.id) if q.id in mus]
            if mus[p.id] < sum(mus[q] for q in prox):
                mus[p.id] += 1
                for q in prox:
                    mus[q] -= 1
                steps.append(p.id)
                changed = True
                guard -= 1
                if guard < 0:
                    raise InvariantViolation("unloading does not terminate")
                break
    return delta, mus, steps


@dataclass
class KMResult:
    status: str
    delta: int
    mus: dict
    witness: dict | None = None
    steps: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)


def _expected_dimension(delta, mus):
    return (delta + 1) * (delta + 2) // 2 - sum(m * (m + 1) // 2 for m in mus.values() if m > 0)


def exceptional_decomposition(mus: dict, cluster: WeightedCluster):
    """Coefficients a_p >= 0 with -sum mu_p e_p = sum a_p (strict transform of
    E_p), or None.  Exact: the strict transforms form a basis of the classes
    with zero e0-degree and are the only curves there."""
    a = {}
    for p in cluster.points:
        a[p.id] = -mus.get(p.id, 0) + sum(a[q] for q in p.proximate_to)
    if any(v < 0 for v in a.values()):
        return None
    return {k: v for k, v in a.items() if v}


def _km_checks(delta, mus, cluster):
    if delta < 0:
        return EMPTY, {"e0_degree": delta}
    for p in cluster.roots():
        if mus.get(p.id, 0) > delta:
            # lines through a proper point form a base-point-free pencil
            return EMPTY, {"pencil_through": p.id, "degree": delta - mus[p.id]}
    if delta == 0:
        dec = exceptional_decomposition(mus, cluster)
        if dec is None:
            return EMPTY, {"e0_degree": 0, "exceptional": "not a non-negative combination"}
        return NON_EMPTY, {"e0": 0, "exceptional": dict(sorted(dec.items()))}
    if all(m <= 0 for m in mus.values()):
        return NON_EMPTY, {"e0": delta, "exceptional": {k: -m for k, m in sorted(mus.items()) if m < 0}}
    dim = _expected_dimension(delta, mus)
    if dim > 0:
        return NON_EMPTY, {"expected_dimension": dim}
    return None, None


def _pick_triple(delta, mus, cluster, forbidden):
    """Three proper points whose multiplicities sum beyond delta."""
    usable = []
    for p in cluster.roots():
        if any(p.id in q.proximate_to and q.parent != p.id for q in cluster.points):
            continue
        usable.append(p.id)
    usable.sort(key=lambda k: -mus.get(k, 0))
    pool = [k for k in usable if mus.get(k, 0) > 0][:8]
    best = None
    for size in (3, 2, 1, 0):
        for combo in combinations(pool, size):
            if frozenset(combo) in forbidden:
                continue
            total = sum(mus[k] for k in combo)
            if total > delta and (best is None or total > best[0]):
                best = (total, combo)
        if best:
            return best[1]
    return None


def km_empty_test(pair: PlanePair, max_reductions: int = 200) -> KMResult:
    """Decide whether |2K + C| is empty on the resolution, when possible."""
    _check_rational(pair)
    cluster = pair.cluster
    delta = pair.degree - 6
    mus = {p.id: p.mult - 2 for p in cluster}
    steps = []
    assumptions = []
    forbidden = set()
    generic = 0
    for _ in range(max_reductions):
        delta, mus, unl = unloading(delta, mus, cluster)
        if unl:
            steps.append({"op": "unload", "points": unl})
        status, witness = _km_checks(delta, mus, cluster)
        if status:
            return KMResult(status, delta, mus, witness, steps, assumptions)
        combo = _pick_triple(delta, mus, cluster, forbidden)
        if combo is None:
            return KMResult(UNKNOWN, delta, mus, None, steps, assumptions)
        triple = list(combo)
        pts = list(cluster.points)
        while len(triple) < 3:
            generic += 1
            gid = f"~g{generic}"
            pts.append(ClusterPoint(gid, 1))
            mus[gid] = 0
            triple.append(gid)
        i, j, k = triple
        mi, mj, mk = mus[i], mus[j], mus[k]
        s = mi + mj + mk
        mus[i], mus[j], mus[k] = delta - mj - mk, delta - mi - mk, delta - mi - mj
        delta = 2 * delta - s
        # children of a base point become proper points on the line through
        # the images of the other two
        base = set(triple)
        forbidden = {f for f in forbidden if not f & base}
        new_pts = []
        for q in pts:
            if q.parent in base:
                forbidden.add(frozenset({q.id} | (base - {q.parent})))
                q = ClusterPoint(q.id, q.mult, None, frozenset(), None)
            new_pts.append(q)
        cluster = WeightedCluster(new_pts)
        steps.append({"op": "quadratic", "points": triple, "delta": delta})
        if GENERAL_POSITION not in assumptions:
            assumptions.append(GENERAL_POSITION)
    return KMResult(UNKNOWN, delta, mus, None, steps, assumptions)


# -- (-1)-classes -----------------------------------------------------------------

@dataclass(frozen=True)
class CandidateClass:
    vector: tuple
    kind: str
    admissible: bool
    points: tuple
    delta: int
    curve_dot: int

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.delta, self.points)


def noether_reduces(delta: int, mus) -> bool:
    """Does delta*e0 - sum mu_i e_i reduce to some e_i by quadratic maps?"""
    mus = sorted(mus, reverse=True) + [0, 0, 0]
    for _ in range(4 * delta + 8):
        if delta == 0:
            rest = sorted(m for m in mus if m != 0)
            return rest == [-1]
        if delta < 0:
            return False
        mus.sort(reverse=True)
        a, b, c = mus[:3]
        if a + b + c <= delta:
            return False
        mus[:3] = [delta - b - c, delta - a - c, delta - a - b]
        delta = 2 * delta - a - b - c
        mus.append(0)
    return False


def _free_points(model):
    """Labels usable as general points: level-0 cluster points and aux points."""
    return [p.id for p in model.cluster.roots()] + list(model.aux)


def _free_chain_sets(model, size, max_depth):
    """Closed point sets of the given size built from non-satellite chains."""
    cl = model.cluster
    depth = {}
    usable = []
    for p in cl.points:
        if p.parent is None:
            depth[p.id] = 0
        elif not p.is_satellite and p.parent in depth:
            depth[p.id] = depth[p.parent] + 1
        else:
            continue
        if depth[p.id] <= max_depth:
            usable.append(p.id)
    usable += list(model.aux)
    parent = {p.id: p.parent for p in cl.points}
    for combo in combinations(usable, size):
        chosen = set(combo)
        if all(parent.get(x) is None or parent[x] in chosen for x in combo):
            yield combo


def _vector(model, delta, weights):
    v = [0] * model.surface.dim
    v[0] = delta
    for label, m in weights.items():
        v[model.label_index(label)] -= m
    return tuple(v)


def find_contractible(model: BlowupModel, max_degree: int = 6, surface=None, curve=None):
    """(-1)-classes E with C.E <= 1 on the current surface, in contraction order."""
    s = surface or model.surface
    C = curve or model.curve_class
    K = s.canonical
    out = []

    def consider(vec, kind, admissible, pts, delta):
        if lattice.intersect(s, vec, vec) != -1 or lattice.intersect(s, K, vec) != -1:
            return
        cdot = lattice.intersect(s, C, vec)
        if cdot > 1 or cdot < 0:
            return
        out.append(CandidateClass(vec, kind, admissible, tuple(pts), delta, cdot))

    for p in model.cluster.points:
        # E_p = e_p - sum of e_q over q proximate to p; _vector negates weights
        w = {p.id: -1}
        for q in model.cluster.proximate_points(p.id):
            w[q.id] = 1
        consider(_vector(model, 0, w), CLUSTER_END, True, (p.id,), 0)
    cmult = {lab: -C[model.label_index(lab)] for lab in s.basis_labels[1:]}
    if max_degree >= 1:
        for combo in _free_chain_sets(model, 2, 1):
            consider(_vector(model, 1, {x: 1 for x in combo}), LINE, True, combo, 1)
    if max_degree >= 2:
        pool = sorted(_free_chain_sets(model, 5, 4), key=lambda c: -sum(cmult[x] for x in c))
        for combo in pool[:2000]:
            consider(_vector(model, 2, {x: 1 for x in combo}), CONIC, True, combo, 2)
    free = sorted(_free_points(model), key=lambda x: -cmult[x])
    for delta in range(3, max_degree + 1):
        for prof in minus_one_profiles(delta, len(free)):
            pts = free[: len(prof)]
            w = dict(zip(pts, prof))
            consider(_vector(model, delta, w), SEARCH, noether_reduces(delta, prof), pts, delta)
    out.sort(key=CandidateClass.sort_key)
    return out


# -- the MMP ----------------------------------------------------------------------

@dataclass
class MMPResult:
    end: str
    trace: list
    surface: lattice.BlowupSurface
    curve: tuple
    details: dict = field(default_factory=dict)


def _pa(s, C):
    return (lattice.intersect(s, C, C) + lattice.intersect(s, s.canonical, C)) // 2 + 1


def classify_end(s, C):
    """Recognise the end states of the MMP; None when not at one."""
    if _pa(s, C) != 0:
        return None, {}
    if s.rank == 1:
        h = lattice.picard_basis(s)[0]
        deg = abs(lattice.intersect(s, C, h))
        if deg <= 2:
            return END_PLANE, {"degree": deg}
        return None, {"degree": deg}
    if s.rank == 2:
        fs = [(lattice.intersect(s, C, f), f) for f in lattice.rulings(s)]
        fs = [x for x in fs if x[0] >= 0]
        if not fs:
            return None, {}
        cf, f = min(fs)
        c2 = lattice.intersect(s, C, C)
        kc = lattice.intersect(s, s.canonical, C)
        info = {"C.f": cf, "C^2": c2, "K.C": kc}
        if cf == 0 and c2 == 0 and kc == -2:
            return END_FIBRE, info
        if cf == 1:
            return END_SECTION, info
        if (cf, c2, kc) == (2, 4, -6):
            return END_DOUBLE_SECTION, info
        return None, info
    return None, {}


def half_mmp(model: BlowupModel, max_degree: int = 6, aux_cap: int = 3) -> MMPResult:
    s = model.surface
    C = model.curve_class
    trace = []
    limit = s.rank + aux_cap + 2
    while True:
        end, info = classify_end(s, C)
        if end:
            return MMPResult(end, trace, s, C, info)
        if len(trace) > limit + aux_cap:
            break
        cands = [c for c in find_contractible(model, max_degree, s, C)
                 if c.admissible and not (c.kind == CLUSTER_END and c.points[0] in model.aux)]
        if cands:
            E = cands[0]
            before = s.rank
            s = lattice.contract(s, E.vector, check=False)
            if s.rank != before - 1:
                raise InvariantViolation("contraction did not drop the rank", trace)
            trace.append({
                "op": "contract", "kind": E.kind, "points": list(E.points), "delta": E.delta,
                "class": list(E.vector), "C.E": E.curve_dot, "rank": s.rank,
                "assumptions": [] if E.kind == CLUSTER_END else [GENERAL_POSITION],
            })
            continue
        if len(model.aux) >= aux_cap:
            break
        label = f"~x{len(model.aux) + 1}"
        s = lattice.blow_up(s, label, check=False)
        C = C + (-1,)
        model = BlowupModel(s, C, model.cluster, model.degree, model.aux + (label,))
        trace.append({"op": "aux_blowup", "label": label, "rank": s.rank})
    lattice.check_signature(s)
    return MMPResult(STALLED, trace, s, C, {})


def replay_mmp(model: BlowupModel, trace) -> MMPResult:
    """Re-verify a half_mmp trace on the lattice: E^2 = K.E = -1, C.E <= 1."""
    s, C = model.surface, model.curve_class
    for i, step in enumerate(trace):
        if step["op"] == "aux_blowup":
            s = lattice.blow_up(s, step["label"])
            C = C + (-1,)
            continue
        E = tuple(step["class"]) + (0,) * (s.dim - len(step["class"]))
        if lattice.intersect(s, C, E) > 1:
            raise InvariantViolation(f"step {i}: C.E = {lattice.intersect(s, C, E)} > 1")
        s = lattice.contract(s, E)
    end, info = classify_end(s, C)
    return MMPResult(end or STALLED, list(trace), s, C, info)


@dataclass
class LineVerdict:
    status: str
    km: KMResult
    mmp: MMPResult
    certificate: dict


def line_equivalent(pair: PlanePair, max_degree: int = 6, aux_cap: int = 3) -> LineVerdict:
    km = km_empty_test(pair)
    model = resolve_to_lattice(pair)
    mmp = half_mmp(model, max_degree, aux_cap)
    yes = km.status == EMPTY or mmp.end != STALLED
    no = km.status == NON_EMPTY
    if yes and no:
        raise InvariantViolation(
            f"certificates disagree: emptiness test {km.status}, MMP end {mmp.end}", mmp.trace)
    if yes:
        cert = {"mmp_end": mmp.end, "mmp_trace": mmp.trace}
        if km.status == EMPTY:
            cert["km"] = km.witness
        return LineVerdict(EQUIVALENT, km, mmp, cert)
    if no:
        return LineVerdict(NOT_EQUIVALENT, km, mmp, {"km": km.witness, "steps": km.steps})
    return LineVerdict(UNDETERMINED, km, mmp, {
        "km": {"status": km.status, "delta": km.delta, "mus": km.mus},
        "mmp_end": mmp.end, "mmp_trace": mmp.trace,
    })


__all__ = [
    "BlowupModel", "CandidateClass", "KMResult", "MMPResult", "LineVerdict",
    "resolve_to_lattice", "unloading", "km_empty_test", "exceptional_decomposition", "noether_reduces",
    "find_contractible", "classify_end", "half_mmp", "replay_mmp", "line_equivalent",
    "EMPTY", "NON_EMPTY", "UNKNOWN", "EQUIVALENT", "NOT_EQUIVALENT", "UNDETERMINED",
    "CLUSTER_END", "LINE", "CONIC", "SEARCH", "STALLED", "END_PLANE", "END_FIBRE",
    "END_SECTION", "END_DOUBLE_SECTION",
]
