"""Minimal plane models and the minimal-degree decision procedure.

From a standard model on F_a: resolve the curve along C0 by elementary
transformations (reaching F_b), then elm at b-1 off-C0 centres of maximal
total multiplicity and contract C0 on F_1.  The plane curve obtained has
degree beta' - sum(mu).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._kernels import max_weight_ideal
from .cluster import PlanePair, combinatorial_genus, noether_fano_certificate
from .errors import InputError, InvariantViolation
from .hirzebruch import (
    F0_TERMINAL, FA_CANONICAL, GENERIC, LINE, TERMINAL_PLANE, GenericPoint, RuledPair,
    blow_down_to_plane, blow_up_max_point, elm, enumerate_standard_models, make_move,
    replay, validate_pair,
)

MINIMAL = "Minimal"
NOT_MINIMAL = "NotMinimal"
IS_LINE = "Line"

SUBCRITICAL = "SubcriticalMult"
MPM = "MinimalPlaneModel"
KAPPA_ZERO = "KappaZeroDegree"
WITNESS = "Witness"


@dataclass(frozen=True)
class ResolvedRuledPair:
    base: RuledPair
    consumed: tuple = ()
    trace: tuple = ()

    def __post_init__(self):
        for p in self.base.on_c0_points():
            if p.mult >= 2:
                raise InvariantViolation(f"resolved pair still has a mult-{p.mult} point {p.id} on C0")
        if self.base.a >= 1 and self.base.c0_intersection < 0:
            raise InvariantViolation("resolved pair has C.C0 < 0")

    @property
    def b(self) -> int:
        return self.base.a

    @property
    def alpha(self) -> int:
        return self.base.alpha

    @property
    def beta(self) -> int:
        return self.base.beta


@dataclass(frozen=True)
class CenterSequence:
    centers: tuple      # point ids, or GENERIC
    mults: tuple

    @property
    def total(self) -> int:
        return sum(self.mults)


@dataclass
class MinimalityVerdict:
    status: str
    reason: str
    minimal_degree: int
    witness_trace: list | None = None
    start: object = None
    kappa: int | None = None
    models: list = field(default_factory=list)
    truncated: bool = False
    notes: list = field(default_factory=list)


def _step_id(prefix, n):
    return f"{prefix}{n}"


def resolve_along_c0(pair: RuledPair, step0: int = 0) -> ResolvedRuledPair:
    """Elm at on-C0 points of multiplicity >= 2 until none remain."""
    state = pair
    consumed = []
    trace = []
    budget = sum(p.mult for p in pair.cluster) + 1
    while True:
        bad = [p for p in state.on_c0_points() if p.mult >= 2]
        if not bad:
            break
        budget -= 1
        if budget < 0:
            raise InvariantViolation("resolution along C0 does not terminate", trace)
        p = max(bad, key=lambda q: q.mult)
        new, info = elm(state, p.id, _step_id("q", step0 + len(trace)))
        trace.append(make_move("elm", new, center=p.id, mult=info.mult, on_c0=True,
                               direction="up" if info.up else "down", created=info.created,
                               created_mult=info.new_mult))
        consumed.append(info.mult)
        state = new
    return ResolvedRuledPair(state, tuple(consumed), tuple(trace))


def optimal_center_sequence(r: ResolvedRuledPair) -> CenterSequence:
    """b-1 off-C0 centres of maximal total multiplicity (order ideal in the
    off-C0 forest, padded with smooth curve points)."""
    k = max(r.b - 1, 0)
    if k == 0:
        return CenterSequence((), ())
    cl = r.base.cluster
    off_roots = {p.id for p in cl.roots() if not p.on_c0}
    nodes = [p for p in cl.points if cl.root_of(p.id) in off_roots]
    index = {p.id: i for i, p in enumerate(nodes)}
    parents = [-1 if p.parent is None else index[p.parent] for p in nodes]
    weights = [p.mult for p in nodes]
    _, chosen = max_weight_ideal(parents, weights, k)
    centers = [nodes[i].id for i in chosen]
    mults = [nodes[i].mult for i in chosen]
    while len(centers) < k:
        centers.append(GENERIC)
        mults.append(1)
    return CenterSequence(tuple(centers), tuple(mults))


@dataclass(frozen=True)
class PlaneModel:
    pair: PlanePair
    degree: int
    trace: tuple
    best_effort_cluster: bool = True


def _plane_model_from_f0(r: ResolvedRuledPair, step0):
    st = r.base
    roots = [p for p in st.cluster.roots() if not p.on_c0]
    if roots:
        p = max(roots, key=lambda q: q.mult)
        centre, m = p.id, p.mult
    else:
        centre, m = GenericPoint(1, False), 1
    new, info = elm(st, centre, _step_id("q", step0))
    moves = [make_move("elm", new, center=centre if isinstance(centre, str) else GENERIC,
                       mult=m, on_c0=False, direction="up", created=info.created,
                       created_mult=info.new_mult)]
    return new, moves


def minimal_plane_model(r: ResolvedRuledPair, step0: int = 0) -> PlaneModel:
    """Plane model of the resolved pair through Lambda_{C0}."""
    state = r.base
    moves = []
    if r.b == 0:
        state, moves = _plane_model_from_f0(r, step0)
    else:
        seq = optimal_center_sequence(r)
        for c, mu in zip(seq.centers, seq.mults):
            centre = GenericPoint(1, False) if c == GENERIC else c
            new, info = elm(state, centre, _step_id("q", step0 + len(moves)))
            if info.up:
                raise InvariantViolation("off-C0 centre moved the index up", moves)
            moves.append(make_move("elm", new, center=c, mult=info.mult, on_c0=False,
                                   direction="down", created=info.created,
                                   created_mult=info.new_mult))
            state = new
    if state.a != 1:
        raise InvariantViolation(f"centre sequence ended on F_{state.a}", moves)
    pid = _step_id("P", step0 + len(moves))
    plane = blow_down_to_plane(state, pid)
    moves.append(make_move("blowdown", plane, created=pid if pid in plane.cluster else None))
    return PlaneModel(plane, plane.degree, tuple(moves))


def planar_system_degree(r: ResolvedRuledPair, gamma: int, mus) -> int:
    """Degree of the plane model given by the section class C0 + gamma*f."""
    b = r.b
    need = 2 * gamma + 1 - b
    if need < 0:
        raise InputError(f"section C0 + {gamma}f moves in a system with negative base length {need}")
    mus = list(mus)
    if len(mus) != need:
        raise InputError(f"expected {need} multiplicities, got {len(mus)}")
    if any(m < 0 or m > r.alpha for m in mus):
        raise InputError("multiplicities must lie in [0, alpha]")
    return r.alpha * (gamma - b + 1) + r.beta - sum(mus)


def line_witness(state, step0: int = 0):
    """Moves taking a line-equivalent state (plane with d - m1 = 1, or a ruled
    state with alpha = 1) to a line."""
    moves = []
    if isinstance(state, PlanePair):
        if state.degree == 1:
            return []
        if state.degree - state.max_mult() != 1:
            raise InputError("plane state is not a Line case")
        choices = [p.id for p in state.cluster.roots() if p.mult == state.max_mult()] or [GENERIC]
        pick = choices[0] if state.max_mult() > 1 else GENERIC
        mult = 1 if pick == GENERIC else state.cluster.get(pick).mult
        state = blow_up_max_point(state, pick)
        moves.append(make_move("blowup", state, center=pick, mult=mult))
    if state.alpha != 1:
        raise InputError("ruled state is not a section")
    guard = 4 * (state.beta + state.a) + 8
    while not (state.a == 1 and state.beta == 1):
        guard -= 1
        if guard < 0:
            raise InvariantViolation("line witness does not terminate", moves)
        m = 0 if state.a == 0 and state.beta == 0 else 1
        new, info = elm(state, GenericPoint(m, False), _step_id("q", step0 + len(moves)))
        moves.append(make_move("elm", new, center=GENERIC, mult=m, on_c0=False,
                               direction="up" if info.up else "down"))
        state = new
    plane = blow_down_to_plane(state, _step_id("P", step0 + len(moves)))
    moves.append(make_move("blowdown", plane))
    return moves


def _candidates(model):
    """(degree, full trace) pairs reachable from one standard model."""
    out = []
    trace = list(model.trace)
    start_is_plane = isinstance(model.start, PlanePair)
    if model.last_plane is not None and start_is_plane:
        # prefix up to the last plane visit
        cut = 0
        for i, mv in enumerate(trace):
            if mv.op == "blowdown":
                cut = i + 1
        if cut:
            out.append((model.last_plane.degree, trace[:cut]))
    if model.kind == LINE:
        out.append((1, trace + line_witness(model.pair, len(trace))))
    elif model.kind == TERMINAL_PLANE:
        out.append((model.pair.degree, trace))
    else:
        r = resolve_along_c0(model.pair, len(trace))
        pm = minimal_plane_model(r, len(trace) + len(r.trace))
        out.append((pm.degree, trace + list(r.trace) + list(pm.trace)))
    return out


def _check_witness(start, moves, degree, genus):
    end = replay(start, moves)
    if not isinstance(end, PlanePair) or end.degree != degree:
        raise InvariantViolation(f"witness does not reach a plane curve of degree {degree}", moves)
    if combinatorial_genus(end) != genus:
        raise InvariantViolation("witness changed the genus", moves)


def is_minimal_degree(pair, branch_bound: int = 64) -> MinimalityVerdict:
    rep = validate_pair(pair)
    if not rep.ok:
        raise InputError("invalid pair: " + "; ".join(rep.messages()))
    genus = combinatorial_genus(pair)
    if isinstance(pair, PlanePair):
        d = pair.degree
        if d == 1:
            return MinimalityVerdict(IS_LINE, MPM, 1, [], pair)
        if 3 * pair.max_mult() < d:
            cert = noether_fano_certificate(pair)
            if not cert.holds:
                raise InvariantViolation("subcritical multiplicity without a Noether-Fano certificate")
            return MinimalityVerdict(MINIMAL, SUBCRITICAL, d, None, pair)
    else:
        d = None
    ms = enumerate_standard_models(pair, branch_bound)
    best = None
    kappas = set()
    for model in ms.models:
        if model.kappa is not None:
            kappas.add(model.kappa)
        for deg, moves in _candidates(model):
            if best is None or deg < best[0]:
                best = (deg, moves, model)
    deg, moves, model = best
    kappa = kappas.pop() if len(kappas) == 1 else None
    verdict = MinimalityVerdict(MINIMAL, MPM, deg, None, pair, kappa, ms.models, ms.truncated)
    if len(kappas) > 0:
        verdict.notes.append("standard models disagree on kappa")
    if kappa == 0:
        verdict.reason = KAPPA_ZERO
        for m in ms.models:
            st = m.pair
            if isinstance(st, RuledPair) and st.a in (1, 2) and m.kind == FA_CANONICAL:
                if 2 * deg != 3 * st.alpha:
                    verdict.notes.append(f"degree {deg} differs from 3*alpha/2 on F_{st.a}")
    if d is None:
        _check_witness(pair, moves, deg, genus)
        verdict.witness_trace = list(moves)
        return verdict
    if deg < d:
        _check_witness(pair, moves, deg, genus)
        verdict.status = NOT_MINIMAL
        verdict.reason = WITNESS
        verdict.witness_trace = list(moves)
        if deg == 1:
            verdict.notes.append("equivalent to a line")
    else:
        verdict.minimal_degree = d
    return verdict


__all__ = [
    "ResolvedRuledPair", "CenterSequence", "PlaneModel", "MinimalityVerdict",
    "resolve_along_c0", "optimal_center_sequence", "minimal_plane_model",
    "planar_system_degree", "line_witness", "is_minimal_degree",
    "MINIMAL", "NOT_MINIMAL", "IS_LINE", "SUBCRITICAL", "MPM", "KAPPA_ZERO", "WITNESS",
    "F0_TERMINAL",
]
