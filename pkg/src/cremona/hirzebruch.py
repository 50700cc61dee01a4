"""Curves on Hirzebruch surfaces and the reduction to standard models.

A ruled pair is a class alpha*C0 + beta*f on F_a with a cluster whose level-0
points carry an ``on_c0`` flag.  Elementary transformations use the closed
class formulas (checked against :func:`cremona.lattice.elm_oracle` in the
tests) and do the cluster bookkeeping under the generic-position assumption:
children of an elm centre land off C0 on the new fibre, and the new point is
not tangent to it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from ._kernels import max_weight_ideal
from .cluster import (
    CANONICAL, NON_CANONICAL, TERMINAL, ClusterPoint, PlanePair, ValidationReport,
    WeightedCluster, arithmetic_genus_ruled, classify_singularities,
    combinatorial_genus, discrepancy_entries, validate_cluster, validate_plane_pair,
)
from .errors import InputError, InvariantViolation, ReplayError

GENERIC_ASSUMPTION = "generic-position assumption"

LINE = "Line"
TERMINAL_PLANE = "TerminalPlane"
F0_TERMINAL = "F0Terminal"
FA_CANONICAL = "FaCanonical"


@dataclass(frozen=True)
class RuledPair:
    a: int
    alpha: int
    beta: int
    cluster: WeightedCluster = field(default_factory=WeightedCluster)

    @property
    def c0_intersection(self) -> int:
        return self.beta - self.a * self.alpha

    def on_c0_points(self):
        return [p for p in self.cluster.roots() if p.on_c0]

    def off_c0_roots(self):
        return [p for p in self.cluster.roots() if not p.on_c0]


@dataclass(frozen=True)
class GenericPoint:
    """A point of F_a outside the cluster: a smooth curve point (mult 1) or a
    point off the curve (mult 0)."""

    mult: int = 1
    on_c0: bool = False


GENERIC = "*generic*"
INF = float("inf")


def validate_ruled_pair(pair: RuledPair) -> ValidationReport:
    report = validate_cluster(pair.cluster, "ruled")
    if pair.a < 0:
        report.add(None, "surface", f"Hirzebruch index {pair.a} < 0")
    if pair.alpha < 1:
        report.add(None, "class", f"alpha = {pair.alpha} must be >= 1")
    if pair.beta < 0:
        report.add(None, "class", f"beta = {pair.beta} must be >= 0")
    if pair.a >= 1 and pair.c0_intersection < 0:
        report.add(None, "class", f"C.C0 = {pair.c0_intersection} < 0: curve would contain C0")
    for p in pair.cluster:
        if p.mult > pair.alpha:
            report.add(p.id, "mult", f"multiplicity {p.mult} at {p.id} exceeds C.f = {pair.alpha}")
    on = sum(p.mult for p in pair.on_c0_points())
    if on > max(pair.c0_intersection, 0) and pair.a >= 1:
        report.add(None, "c0", f"points on C0 carry {on} > C.C0 = {pair.c0_intersection}")
    if pair.a == 0 and on > pair.beta:
        report.add(None, "c0", f"points on C0 carry {on} > C.C0 = {pair.beta}")
    if pair.a == 0 and (pair.alpha, pair.beta) != (1, 0):
        # (1, 0) is itself a C0-type curve and meets the one through p only there
        for p in pair.cluster:
            if p.mult > pair.beta:
                report.add(p.id, "bezout", f"multiplicity {p.mult} at {p.id} exceeds C.C0 = {pair.beta}")
    if pair.alpha >= 2 and report.ok:
        # a member of |C0 + kf| passes through any closed set of 2k - a + 1 points
        cl = pair.cluster
        index = {p.id: i for i, p in enumerate(cl.points)}
        parents = [-1 if p.parent is None else index[p.parent] for p in cl.points]
        weights = [p.mult for p in cl.points]
        for k in range(pair.a, pair.a + 3):
            total, chosen = max_weight_ideal(parents, weights, 2 * k - pair.a + 1)
            bound = pair.beta + pair.alpha * (k - pair.a)
            if total is not None and total > bound:
                ids = ",".join(cl.points[i].id for i in chosen)
                report.add(None, "bezout", f"section C0+{k}f through {ids}: {total} > {bound}")
                break
    if report.ok and combinatorial_genus(pair) < 0:
        report.add(None, "genus", f"combinatorial genus {combinatorial_genus(pair)} < 0")
    return report


def validate_pair(pair) -> ValidationReport:
    if isinstance(pair, PlanePair):
        return validate_plane_pair(pair)
    return validate_ruled_pair(pair)


# -- moves -------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    op: str                     # blowup | elm | blowdown | swap
    center: str | None = None
    mult: int | None = None
    on_c0: bool | None = None
    direction: str | None = None
    created: str | None = None
    created_mult: int | None = None
    surface_after: str = ""
    class_after: tuple = ()
    coefficient: Fraction | None = None
    assumptions: tuple = ()

    def as_dict(self):
        d = {
            "op": self.op,
            "center": self.center,
            "mult": self.mult,
            "on_c0": self.on_c0,
            "direction": self.direction,
            "created": self.created,
            "created_mult": self.created_mult,
            "surface_after": self.surface_after,
            "class_after": dict(self.class_after),
            "coefficient": self.coefficient,
            "assumptions": list(self.assumptions),
        }
        return d

    @classmethod
    def from_dict(cls, d):
        coeff = d.get("coefficient")
        return cls(
            op=d["op"],
            center=d.get("center"),
            mult=d.get("mult"),
            on_c0=d.get("on_c0"),
            direction=d.get("direction"),
            created=d.get("created"),
            created_mult=d.get("created_mult"),
            surface_after=d.get("surface_after", ""),
            class_after=tuple(sorted(d.get("class_after", {}).items())),
            coefficient=None if coeff is None else Fraction(coeff),
            assumptions=tuple(d.get("assumptions", ())),
        )


def surface_name(pair) -> str:
    return "P2" if isinstance(pair, PlanePair) else f"F{pair.a}"


def class_of(pair) -> tuple:
    if isinstance(pair, PlanePair):
        return (("degree", pair.degree),)
    return (("alpha", pair.alpha), ("beta", pair.beta))


def fresh_id(cluster: WeightedCluster, base: str) -> str:
    pid = base
    while pid in cluster:
        pid += "'"
    return pid


def _ruled_flags(points):
    out = []
    for p in points:
        if p.parent is None and p.on_c0 is None:
            p = replace(p, on_c0=False)
        out.append(p)
    return out


# -- operations ----------------------------------------------------------------

def blow_up_max_point(pair: PlanePair, choice) -> RuledPair:
    """Blow up a point of maximal multiplicity; F_1 with class (d-m1)C0 + d f."""
    d = pair.degree
    m1 = pair.cluster.max_mult()
    if choice == GENERIC or isinstance(choice, GenericPoint):
        if any(p.mult > 1 for p in pair.cluster):
            raise InputError("a generic point is allowed only when every multiplicity is 1")
        return RuledPair(1, d - 1, d, WeightedCluster(_ruled_flags(pair.cluster.points)))
    p = pair.cluster.get(choice)
    if p.parent is not None:
        raise InputError(f"{choice} is not a level-0 point")
    if p.mult != m1:
        raise InputError(f"{choice} has multiplicity {p.mult} < maximal {m1}")
    rest = pair.cluster.without_root(choice, children_on_c0=True)
    return RuledPair(1, d - m1, d, WeightedCluster(_ruled_flags(rest.points)))


@dataclass(frozen=True)
class ElmInfo:
    mult: int
    on_c0: bool
    up: bool
    new_mult: int
    created: str | None


def elm(pair: RuledPair, center, created_id: str | None = None):
    """Elementary transformation at a level-0 point (or a generic point).

    Returns ``(new_pair, info)``; the new point of multiplicity alpha - m is
    booked in the cluster only when that multiplicity is at least 2.
    """
    if isinstance(center, GenericPoint):
        m, on = center.mult, bool(center.on_c0)
        cluster = pair.cluster
        if m not in (0, 1):
            raise InputError("generic centres have multiplicity 0 or 1")
    else:
        p = pair.cluster.get(center)
        if p.parent is not None:
            raise InputError(f"elm centre {center} is not a level-0 point")
        m, on = p.mult, bool(p.on_c0)
        cluster = pair.cluster.without_root(center, children_on_c0=False)
    if m > pair.alpha:
        raise InputError(f"multiplicity {m} > alpha = {pair.alpha}")
    up = on or pair.a == 0
    if up:
        a2, beta2 = pair.a + 1, pair.beta + pair.alpha - m
    else:
        a2, beta2 = pair.a - 1, pair.beta - m
    new_mult = pair.alpha - m
    if beta2 < a2 * pair.alpha:
        raise InputError("the curve would become the negative section of the target")
    points = list(cluster.points)
    if pair.a == 0 and not on:
        # new C0 is the C0-type curve through the centre
        points = [replace(q, on_c0=False) if q.parent is None else q for q in points]
    created = None
    if new_mult >= 2:
        created = fresh_id(cluster, created_id or "q")
        points.insert(0, ClusterPoint(created, new_mult, None, frozenset(), not up))
    new = RuledPair(a2, pair.alpha, beta2, WeightedCluster(points))
    return new, ElmInfo(m, on, up, new_mult, created)


@dataclass(frozen=True)
class AdjointData:
    coefficient: Fraction
    lam: Fraction
    nef: bool
    dot_f: Fraction = Fraction(0)


def adjoint(pair: RuledPair, c=None) -> AdjointData:
    """K + c*C on F_a.  For c = 2/alpha it is numerically lam*f."""
    if pair.alpha < 1:
        raise InputError("alpha must be >= 1")
    c = Fraction(2, pair.alpha) if c is None else Fraction(c)
    dot_f = -2 + c * pair.alpha
    dot_c0 = pair.a - 2 + c * (pair.beta - pair.a * pair.alpha)
    return AdjointData(c, dot_c0, dot_f >= 0 and dot_c0 >= 0, dot_f)


def kodaira_dimension(pair: RuledPair) -> int:
    adj = adjoint(pair)
    if not adj.nef:
        raise InputError(f"adjoint K + (2/{pair.alpha})C is not nef (lambda = {adj.lam})")
    return 0 if 2 * pair.beta == pair.alpha * (pair.a + 2) else 1


def blow_down_to_plane(pair: RuledPair, created_id: str | None = None) -> PlanePair:
    """Contract C0 on F_1: a plane curve of degree beta with a point of
    multiplicity beta - alpha; the points on C0 become infinitely near to it."""
    if pair.a != 1:
        raise InputError(f"blow down needs F_1, got F_{pair.a}")
    top = pair.beta - pair.alpha
    on = [p.id for p in pair.on_c0_points()]
    pts = []
    center = None
    if top >= 2 or (top >= 1 and on):
        center = fresh_id(pair.cluster, created_id or "P")
        pts.append(ClusterPoint(center, top))
    for p in pair.cluster.points:
        if p.parent is None:
            if p.id in on:
                pts.append(ClusterPoint(p.id, p.mult, center, frozenset({center}), None))
            else:
                pts.append(replace(p, on_c0=None))
        else:
            pts.append(p)
    return PlanePair(pair.beta, WeightedCluster(pts))


def swap_rulings(pair: RuledPair) -> RuledPair:
    if pair.a != 0:
        raise InputError("only F_0 has a second ruling")
    if pair.beta < 1:
        raise InputError("after the swap the curve would be a union of fibres")
    pts = [replace(p, on_c0=False) if p.parent is None else p for p in pair.cluster.points]
    return RuledPair(0, pair.beta, pair.alpha, WeightedCluster(pts))


# -- replay ------------------------------------------------------------------

def apply_move(state, move: Move):
    """Apply one recorded move and return the new state."""
    if move.op == "blowup":
        if not isinstance(state, PlanePair):
            raise ReplayError("blowup needs a plane state")
        new = blow_up_max_point(state, move.center if move.center != GENERIC else GENERIC)
    elif move.op == "elm":
        if not isinstance(state, RuledPair):
            raise ReplayError("elm needs a ruled state")
        center = GenericPoint(move.mult, bool(move.on_c0)) if move.center == GENERIC else move.center
        new, info = elm(state, center, move.created)
        if move.created is not None and info.created != move.created:
            raise ReplayError(f"elm created {info.created}, trace says {move.created}")
    elif move.op == "blowdown":
        new = blow_down_to_plane(state, move.created)
    elif move.op == "swap":
        new = swap_rulings(state)
    else:
        raise ReplayError(f"unknown move {move.op!r}")
    return new


def replay(start, moves, check=True):
    state = start
    for i, mv in enumerate(moves):
        try:
            state = apply_move(state, mv)
        except (InputError, KeyError) as exc:
            raise ReplayError(f"step {i}: {exc}", step=i) from exc
        if check and mv.surface_after:
            if surface_name(state) != mv.surface_after or class_of(state) != tuple(mv.class_after):
                raise ReplayError(
                    f"step {i}: reached {surface_name(state)} {dict(class_of(state))}, "
                    f"trace says {mv.surface_after} {dict(mv.class_after)}",
                    step=i,
                )
    return state


# -- standard models ---------------------------------------------------------

@dataclass(frozen=True)
class StandardModel:
    kind: str
    pair: object
    kappa: int | None
    trace: tuple
    start: object
    last_plane: PlanePair | None
    coefficient: Fraction | None = None

    def key(self):
        if isinstance(self.pair, RuledPair):
            return (self.kind, self.pair.a, self.pair.alpha, self.pair.beta, self.kappa)
        return (self.kind, None, None, self.pair.degree, self.kappa)


def _first(stage, options):
    return 0


def bad_centres(pair: RuledPair, c: Fraction):
    """Level-0 points to elm at: subtrees that are not canonical, or not
    terminal when rooted on C0 (everywhere on F_0)."""
    entries = discrepancy_entries(pair.cluster, c)
    out = []
    for r in pair.cluster.roots():
        low = min(entries[q.id] for q in pair.cluster.subtree(r.id))
        strict = r.on_c0 or pair.a == 0
        if low < 0 or (strict and low <= 0):
            out.append(r)
    order = {pid: i for i, pid in enumerate(pair.cluster.ids)}
    out.sort(key=lambda p: (-p.mult, order[p.id]))
    return out


def plane_choices(pair: PlanePair):
    if pair.cluster.max_mult() <= 1:
        return [GENERIC]
    m1 = pair.cluster.max_mult()
    return [p.id for p in pair.cluster.roots() if p.mult == m1]


def make_move(op, state, **kw):
    return Move(op=op, surface_after=surface_name(state), class_after=class_of(state), **kw)


def standard_model(pair, chooser=None, max_steps: int | None = None) -> StandardModel:
    """Run the reduction to a standard model.

    ``chooser(stage, options)`` returns the index of the option to take;
    options arrive sorted by the default policy (highest multiplicity, then
    input order), so the default picks the first.
    """
    chooser = chooser or _first
    report = validate_pair(pair)
    if not report.ok:
        raise InvariantViolation("invalid input: " + "; ".join(report.messages()))
    trace = []
    state = pair
    last_plane = pair if isinstance(pair, PlanePair) else None
    measure = None
    genus = combinatorial_genus(pair)
    if max_steps is None:
        weight = sum(p.mult for p in pair.cluster) + 1
        size = pair.degree if isinstance(pair, PlanePair) else pair.alpha + pair.beta
        max_steps = 20 * (weight + size) + 50

    def fail(msg):
        raise InvariantViolation(msg + f" (after {len(trace)} moves)", trace)

    def check(st):
        rep = validate_pair(st)
        if not rep.ok:
            fail("inconsistent state: " + "; ".join(rep.messages()))
        if combinatorial_genus(st) != genus:
            fail(f"genus changed from {genus} to {combinatorial_genus(st)}")

    def advance(new_measure):
        nonlocal measure
        if measure is not None and not new_measure < measure:
            fail(f"termination measure did not decrease: {measure} -> {new_measure}")
        measure = new_measure

    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            fail("step budget exhausted")
        if isinstance(state, PlanePair):
            d = state.degree
            last_plane = state
            advance((d, INF))
            if d == 1 or d - state.max_mult() == 1:
                return StandardModel(LINE, state, None, tuple(trace), pair, last_plane)
            cls, _ = classify_singularities(state, Fraction(3, d))
            if cls == TERMINAL:
                return StandardModel(TERMINAL_PLANE, state, None, tuple(trace), pair, last_plane, Fraction(3, d))
            options = plane_choices(state)
            pick = options[chooser("blowup", options)]
            state = blow_up_max_point(state, pick)
            trace.append(make_move("blowup", state, center=pick,
                               mult=1 if pick == GENERIC else last_plane.cluster.get(pick).mult,
                               coefficient=Fraction(2, state.alpha)))
            check(state)
            continue

        # ruled state
        if state.alpha == 1:
            return StandardModel(LINE, state, None, tuple(trace), pair, last_plane)
        c = Fraction(2, state.alpha)
        bad = bad_centres(state, c)
        if bad:
            options = [p.id for p in bad]
            pick = options[chooser("elm", options)]
            centre = state.cluster.get(pick)
            new, info = elm(state, pick, f"q{len(trace)}")
            trace.append(make_move("elm", new, center=pick, mult=info.mult, on_c0=info.on_c0,
                               direction="up" if info.up else "down", created=info.created,
                               created_mult=info.new_mult, coefficient=c,
                               assumptions=(GENERIC_ASSUMPTION,) if state.cluster.children(centre.id) or info.created else ()))
            state = new
            check(state)
            continue
        adj = adjoint(state)
        if state.a == 1 and not adj.nef:
            if not 2 * state.beta < 3 * state.alpha:
                fail("non-nef F_1 state without 2*beta < 3*alpha")
            state = blow_down_to_plane(state, f"P{len(trace)}")
            trace.append(make_move("blowdown", state, created=f"P{len(trace)}" if f"P{len(trace)}" in state.cluster else None))
            check(state)
            continue
        if state.a == 0 and not adj.nef:
            state = swap_rulings(state)
            advance((measure[0] if measure else INF, state.alpha))
            trace.append(make_move("swap", state, coefficient=Fraction(2, state.alpha)))
            check(state)
            continue
        kappa = kodaira_dimension(state)
        kind = F0_TERMINAL if state.a == 0 else FA_CANONICAL
        return StandardModel(kind, state, kappa, tuple(trace), pair, last_plane, c)


def check_standard_model(model: StandardModel) -> list:
    """Re-validate the output conditions; returns a list of failures."""
    problems = []
    if model.kind == FA_CANONICAL or model.kind == F0_TERMINAL:
        st = model.pair
        c = Fraction(2, st.alpha)
        adj = adjoint(st)
        if not adj.nef:
            problems.append("adjoint not nef")
        glob, _ = classify_singularities(st, c)
        if model.kind == F0_TERMINAL:
            entries = discrepancy_entries(st.cluster, c)
            if any(v <= 0 for v in entries.values()):
                problems.append("F0 model not terminal")
        else:
            if glob == NON_CANONICAL:
                problems.append("not canonical")
            along, _ = classify_singularities(st, c, along_c0=True)
            if along != TERMINAL:
                problems.append("not terminal along C0")
        lam_zero = 2 * st.beta == st.alpha * (st.a + 2)
        if (model.kappa == 0) != lam_zero:
            problems.append("kappa does not match lambda")
    elif model.kind == TERMINAL_PLANE:
        cls, _ = classify_singularities(model.pair, Fraction(3, model.pair.degree))
        if cls != TERMINAL:
            problems.append("plane model not terminal")
    end = replay(model.start, model.trace)
    if end != model.pair:
        problems.append("trace does not replay to the model")
    return problems


@dataclass
class ModelSet:
    models: list
    truncated: bool = False
    runs: int = 0


def enumerate_standard_models(pair, branch_bound: int = 64) -> ModelSet:
    """All standard models reachable by varying every choice of the reduction,
    deduplicated by (kind, a, alpha, beta, kappa)."""
    seen = {}
    stack = [()]
    runs = 0
    truncated = False
    while stack:
        if runs >= branch_bound:
            truncated = True
            break
        prefix = stack.pop()
        log = []

        def chooser(stage, options, prefix=prefix, log=log):
            i = len(log)
            pick = prefix[i] if i < len(prefix) else 0
            log.append((pick, len(options)))
            return pick

        model = standard_model(pair, chooser)
        runs += 1
        seen.setdefault(model.key(), model)
        for i in range(len(log) - 1, len(prefix) - 1, -1):
            pick, n = log[i]
            for j in range(n - 1, 0, -1):
                stack.append(tuple(p for p, _ in log[:i]) + (j,))
    models = sorted(seen.values(), key=lambda m: tuple(-1 if x is None else (x if isinstance(x, int) else 0) for x in m.key()[1:]))
    return ModelSet(models, truncated, runs)


__all__ = [
    "RuledPair", "GenericPoint", "GENERIC", "Move", "StandardModel", "AdjointData",
    "ModelSet", "validate_ruled_pair", "validate_pair", "blow_up_max_point", "elm",
    "adjoint", "kodaira_dimension", "blow_down_to_plane", "swap_rulings",
    "standard_model", "enumerate_standard_models", "check_standard_model",
    "apply_move", "replay", "make_move", "bad_centres", "surface_name", "class_of",
    "arithmetic_genus_ruled", "LINE", "TERMINAL_PLANE", "F0_TERMINAL",
    "FA_CANONICAL", "CANONICAL",
]
