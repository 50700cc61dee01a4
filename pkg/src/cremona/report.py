"""Engine commands as report dictionaries, plus the checked emitter."""
from __future__ import annotations

from fractions import Fraction

from . import coolidge
from .cluster import (
    PlanePair, combinatorial_genus, jung_test, log_discrepancies, noether_fano_certificate,
)
from .document import build_document, canonical_json, pair_document, to_text
from .errors import InputError, ReplayError
from .hirzebruch import (
    Move, RuledPair, adjoint, class_of, enumerate_standard_models, replay, standard_model,
    surface_name, validate_pair,
)
from .minimality import is_minimal_degree
from .threefold import ProjectionPair, ci_projection_certificate, scroll_reduction

ENGINE = "cremona"
SEED = 0


def engine_version() -> str:
    from . import __version__
    return __version__


# -- helpers -----------------------------------------------------------------------

def state_summary(state) -> dict:
    d = {"surface": surface_name(state), "class": dict(class_of(state))}
    if isinstance(state, PlanePair):
        d["top_multiplicity"] = state.max_mult()
    return d


def trace_record(start, moves, final) -> dict:
    """Replayable trace: start and final states plus the move list."""
    return {"start": start, "moves": list(moves), "final": final}


def same_state(a, b) -> bool:
    return type(a) is type(b) and pair_document(a) == pair_document(b)


def verify_trace(tr) -> None:
    """Replay one trace; raise ReplayError at the first diverging step."""
    start, moves, final = tr["start"], tr["moves"], tr["final"]
    if isinstance(start, dict):
        start = build_document(start).pair
    if isinstance(final, dict):
        final = build_document(final).pair
    moves = [Move.from_dict(m) if isinstance(m, dict) else m for m in moves]
    end = replay(start, moves)
    if not same_state(end, final):
        raise ReplayError(
            f"step {len(moves) - 1}: replay ends at {surface_name(end)} {dict(class_of(end))}, "
            f"report says {surface_name(final)} {dict(class_of(final))}",
            step=max(len(moves) - 1, 0),
        )


def emit_report(result: dict, fmt: str = "json") -> bytes:
    """Serialise a report after replaying every trace it carries."""
    for entry in result.get("entries", [result]):
        for tr in entry.get("traces", []):
            verify_trace(tr)
    if fmt == "json":
        return canonical_json(result).encode("utf-8")
    if fmt == "text":
        return to_text(result).encode("utf-8")
    raise InputError(f"unknown format {fmt!r}")


def parse_coefficient(text) -> Fraction:
    try:
        c = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad coefficient {text!r}: use p/q") from exc
    return c


def chooser_for(tie_break):
    if tie_break in (None, "first"):
        return None
    if tie_break == "last":
        return lambda stage, options: len(options) - 1
    raise InputError(f"unknown tie_break {tie_break!r}")


# -- per-document commands ---------------------------------------------------------

def cmd_validate(pair, opts):
    rep = validate_pair(pair)
    return {"verdicts": {"valid": rep.ok, "violations": rep.messages(), "points": len(pair.cluster)}}


def cmd_genus(pair, opts):
    if isinstance(pair, PlanePair):
        pa = (pair.degree - 1) * (pair.degree - 2) // 2
    else:
        from .cluster import arithmetic_genus_ruled
        pa = arithmetic_genus_ruled(pair.a, pair.alpha, pair.beta)
    return {"verdicts": {"arithmetic_genus": pa, "delta": pair.cluster.delta(),
                         "genus": combinatorial_genus(pair)}}


def _discrepancy_dict(rep):
    return {
        "coefficient": rep.coefficient,
        "entries": {f"a({k})": v for k, v in rep.entries.items()},
        "saturation": rep.saturation,
        "minimum": rep.minimum,
        "witness": rep.witness,
        "stable": rep.stable,
        "classification": rep.classification(),
    }


def cmd_discrepancies(pair, opts):
    c = parse_coefficient(opts["coeff"])
    rep = log_discrepancies(pair, c, along_c0=opts.get("along_c0", False))
    out = _discrepancy_dict(rep)
    out["along_c0"] = bool(opts.get("along_c0", False))
    return {"verdicts": out}


def cmd_classify(pair, opts):
    c = parse_coefficient(opts["coeff"])
    rep = log_discrepancies(pair, c)
    v = {"coefficient": c, "classification": rep.classification(), "witness": rep.witness,
         "minimum": rep.minimum}
    if isinstance(pair, RuledPair):
        rc = log_discrepancies(pair, c, along_c0=True)
        v["along_c0"] = {"classification": rc.classification(), "witness": rc.witness,
                         "minimum": rc.minimum}
    return {"verdicts": v}


def model_dict(model) -> dict:
    d = {"kind": model.kind, "kappa": model.kappa, "state": state_summary(model.pair),
         "steps": len(model.trace)}
    st = model.pair
    if isinstance(st, RuledPair):
        c = Fraction(2, st.alpha)
        d["coefficient"] = c
        d["classification"] = log_discrepancies(st, c).classification()
        d["classification_along_c0"] = log_discrepancies(st, c, along_c0=True).classification()
        adj = adjoint(st)
        d["adjoint"] = {"lambda": adj.lam, "nef": adj.nef}
    return d


def cmd_standard_model(pair, opts):
    if opts.get("all"):
        ms = enumerate_standard_models(pair, opts["branch_bound"])
        models = ms.models
        extra = {"truncated": ms.truncated, "runs": ms.runs}
    else:
        models = [standard_model(pair, chooser_for(opts.get("tie_break")))]
        extra = {}
    verdicts = {"models": [model_dict(m) for m in models], "count": len(models)}
    verdicts.update(extra)
    traces = [trace_record(pair, m.trace, m.pair) for m in models]
    return {"verdicts": verdicts, "traces": traces}


def cmd_minimal_degree(pair, opts):
    v = is_minimal_degree(pair, opts["branch_bound"])
    verdicts = {"status": v.status, "reason": v.reason, "minimal_degree": v.minimal_degree,
                "kappa": v.kappa, "notes": v.notes, "truncated": v.truncated,
                "models": [model_dict(m) for m in v.models]}
    traces = []
    if v.witness_trace is not None and v.witness_trace:
        end = replay(pair, v.witness_trace)
        verdicts["witness_state"] = state_summary(end)
        verdicts["top_multiplicity"] = end.max_mult() if isinstance(end, PlanePair) else None
        traces.append(trace_record(pair, v.witness_trace, end))
    elif isinstance(pair, PlanePair):
        verdicts["top_multiplicity"] = pair.max_mult()
    return {"verdicts": verdicts, "traces": traces}


def cmd_line_equivalence(pair, opts):
    if not isinstance(pair, PlanePair):
        raise InputError("line-equivalence takes a plane curve")
    lv = coolidge.line_equivalent(pair, opts["max_class_degree"])
    model = coolidge.resolve_to_lattice(pair)
    check = coolidge.replay_mmp(model, lv.mmp.trace)
    if check.end != lv.mmp.end:
        raise ReplayError(f"step {len(lv.mmp.trace) - 1}: lattice replay ends at {check.end}, "
                          f"report says {lv.mmp.end}", step=max(len(lv.mmp.trace) - 1, 0))
    km = lv.km
    verdicts = {
        "status": lv.status,
        "adjoint_test": {"status": km.status, "delta": km.delta, "mus": km.mus,
                         "witness": km.witness, "steps": km.steps, "assumptions": km.assumptions},
        "mmp": {"end": lv.mmp.end, "details": lv.mmp.details, "trace": lv.mmp.trace},
    }
    certs = []
    if km.status == coolidge.EMPTY:
        certs.append({"kind": "AdjointEmpty", "claim": "|2K+C| is empty", "witness": km.witness})
    if km.status == coolidge.NON_EMPTY:
        certs.append({"kind": "AdjointNonEmpty", "claim": "2K+C is effective", "witness": km.witness})
    if lv.mmp.end != coolidge.STALLED:
        certs.append({"kind": "MMPEnd", "end": lv.mmp.end})
    return {"verdicts": verdicts, "certificates": certs}


def _cert_dict(c):
    return {"kind": c.kind, "holds": c.holds, "data": c.data}


def cmd_nf_certificate(pair, opts):
    if not isinstance(pair, PlanePair):
        raise InputError("nf-certificate takes a plane curve")
    certs = [_cert_dict(jung_test(pair))]
    if pair.degree >= 3:
        certs.insert(0, _cert_dict(noether_fano_certificate(pair)))
    return {"verdicts": {"certified": any(c["holds"] for c in certs)}, "certificates": certs}


DOCUMENT_COMMANDS = {
    "validate": cmd_validate,
    "genus": cmd_genus,
    "discrepancies": cmd_discrepancies,
    "classify": cmd_classify,
    "standard-model": cmd_standard_model,
    "minimal-degree": cmd_minimal_degree,
    "line-equivalence": cmd_line_equivalence,
    "nf-certificate": cmd_nf_certificate,
}


# -- document-free commands --------------------------------------------------------

def cmd_scroll_reduce(degree):
    steps = []
    for s in scroll_reduction(degree):
        steps.append({"degree": s.state.degree, "line_mult": s.state.line_mult,
                      "next_degree": s.next_degree, "next_line_mult": s.next_line_mult,
                      "degree_formula": f"3*{s.state.degree} - 2*{s.state.line_mult} - 3 = {s.next_degree}",
                      "mult_formula": f"2*{s.state.degree} - {s.state.line_mult} - 3 = {s.next_line_mult}"})
    return {"verdicts": {"trace": [[s["degree"], s["line_mult"]] for s in steps], "steps": steps}}


def cmd_ci_certificate(a, b, k):
    cert = ci_projection_certificate(ProjectionPair(a, b, k))
    return {"verdicts": {"certified": cert.holds}, "certificates": [_cert_dict(cert)]}


def cmd_nf_numeric(n, d_high, d_low, max_mult):
    cert = noether_fano_certificate(n, d_high, d_low, max_mult)
    return {"verdicts": {"certified": cert.holds}, "certificates": [_cert_dict(cert)]}


def envelope(command: str, options: dict, body: dict) -> dict:
    out = {"command": {"name": command, "options": options},
           "engine": {"name": ENGINE, "version": engine_version()}, "seed": SEED}
    out.update(body)
    return out


__all__ = [
    "DOCUMENT_COMMANDS", "emit_report", "verify_trace", "trace_record", "state_summary",
    "envelope", "cmd_scroll_reduce", "cmd_ci_certificate", "cmd_nf_numeric",
    "parse_coefficient", "chooser_for", "same_state",
]
