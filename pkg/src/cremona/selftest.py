"""Built-in regression checks run by ``cremona selftest``."""
from __future__ import annotations

from .cluster import PlanePair, WeightedCluster, point
from .coolidge import EQUIVALENT, NOT_EQUIVALENT, line_equivalent
from .hirzebruch import RuledPair, enumerate_standard_models
from .minimality import MINIMAL, NOT_MINIMAL, is_minimal_degree
from .threefold import ProjectionPair, ci_projection_certificate, scroll_trace


def sextic_node_tacnode():
    return PlanePair(6, WeightedCluster([point("n", 2), point("t1", 2), point("t2", 2, "t1")]))


def septic_children():
    return PlanePair(7, WeightedCluster([point("p", 4), point("a", 2, "p"), point("b", 2, "p")]))


def septic_chain():
    return PlanePair(7, WeightedCluster([point("p", 4), point("a", 2, "p"), point("b", 2, "a")]))


def ruled_node(on_c0):
    return RuledPair(3, 3, 11, WeightedCluster([point("n", 2, on_c0=on_c0)]))


def ten_node_sextic():
    return PlanePair(6, WeightedCluster([point(f"n{i}", 2) for i in range(10)]))


def _check(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # report, do not crash the suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"name": name, "ok": bool(ok), "detail": detail}


def _ruled(on_c0, degree, top):
    def run():
        v = is_minimal_degree(ruled_node(on_c0))
        got = v.minimal_degree
        from .hirzebruch import replay
        end = replay(ruled_node(on_c0), v.witness_trace)
        return (got, end.max_mult()) == (degree, top), f"degree {got}, top multiplicity {end.max_mult()}"
    return run


def _sextic():
    ms = enumerate_standard_models(sextic_node_tacnode())
    keys = sorted((m.pair.a, m.pair.alpha, m.pair.beta, m.kappa) for m in ms.models)
    return keys == [(1, 4, 6, 0), (2, 4, 8, 0)], str(keys)


def _septic():
    a = is_minimal_degree(septic_children())
    b = is_minimal_degree(septic_chain())
    ok = a.status == MINIMAL and a.kappa == 1 and b.status == NOT_MINIMAL and b.minimal_degree == 6
    return ok, f"children {a.status}/{a.kappa}, chain {b.status}/{b.minimal_degree}"


def _coolidge():
    a = line_equivalent(PlanePair(3, WeightedCluster([point("n", 2)]))).status
    b = line_equivalent(ten_node_sextic()).status
    return (a, b) == (EQUIVALENT, NOT_EQUIVALENT), f"nodal cubic {a}, ten-node sextic {b}"


def _threefold():
    t = scroll_trace(5)
    c1 = ci_projection_certificate(ProjectionPair(2, 4, 2)).holds
    c2 = ci_projection_certificate(ProjectionPair(2, 3, 2)).holds
    ok = t == [(5, 4), (4, 3), (3, 2), (2, 1)] and c1 and not c2
    return ok, f"scroll {t}, ci (2,4,2) {c1}, (2,3,2) {c2}"


def run_checks() -> list:
    return [
        _check("ruled node on C0", _ruled(True, 9, 6)),
        _check("ruled node off C0", _ruled(False, 8, 5)),
        _check("sextic node+tacnode models", _sextic),
        _check("septic encodings", _septic),
        _check("line equivalence", _coolidge),
        _check("scroll and projection", _threefold),
    ]
