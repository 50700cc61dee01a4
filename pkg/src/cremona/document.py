"""Curve documents (JSON in) and canonical reports (JSON out)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema

from .cluster import ClusterPoint, PlanePair, ValidationReport, WeightedCluster
from .errors import InputError
from .hirzebruch import Move, RuledPair, validate_pair

SCHEMA_NAME = "curve_document.v1.json"


class DocumentError(InputError):
    """A document failed to parse, to match the schema, or to validate."""

    def __init__(self, message, path="/", report: ValidationReport | None = None):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.report = report


@dataclass
class CurveDocument:
    pair: object
    options: dict = field(default_factory=dict)


def load_schema() -> dict:
    with resources.files("cremona.schema").joinpath(SCHEMA_NAME).open("r", encoding="utf-8") as fh:
        return json.load(fh)


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        schema = load_schema()
        doc_schema = {"$ref": "#/$defs/document", "$defs": schema["$defs"]}
        _VALIDATOR = jsonschema.Draft202012Validator(doc_schema)
    return _VALIDATOR


def _pointer(parts) -> str:
    return "/" + "/".join(str(p) for p in parts) if parts else "/"


def _schema_error(data) -> DocumentError | None:
    errors = sorted(_validator().iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if not errors:
        return None
    err = errors[0]
    parts = list(err.absolute_path)
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [k for k in err.validator_value if k not in err.instance]
        if missing:
            return DocumentError(f"missing required property {missing[0]!r}", _pointer(parts + [missing[0]]))
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        if extra:
            return DocumentError(f"unknown property {extra[0]!r}", _pointer(parts + [extra[0]]))
    return DocumentError(err.message, _pointer(parts))


def decode(data):
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError(f"not UTF-8: {exc}") from exc
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    return data


def build_document(data: dict) -> CurveDocument:
    """Schema-check one decoded document and build its pair."""
    err = _schema_error(data)
    if err:
        raise err
    surface = data["surface"]
    cls = data["class"]
    plane = surface == "plane"
    if plane and "degree" not in cls:
        raise DocumentError("plane curves take a degree", "/class")
    if not plane and "degree" in cls:
        raise DocumentError("curves on F_a take alpha and beta", "/class")
    pts = []
    index = {}
    for i, raw in enumerate(data.get("points", [])):
        pid = raw["id"].strip()
        if not pid:
            raise DocumentError("empty id", f"/points/{i}/id")
        parent = raw.get("parent")
        parent = parent.strip() if parent is not None else None
        prox = {q.strip() for q in raw.get("proximate_to", [])}
        if parent is not None:
            prox.add(parent)
        if parent is None and prox:
            raise DocumentError("a level-0 point is proximate to nothing", f"/points/{i}/proximate_to")
        on = raw.get("on_c0")
        if plane and on is not None:
            raise DocumentError("on_c0 applies to Hirzebruch surfaces only", f"/points/{i}/on_c0")
        if not plane and parent is None and on is None:
            on = False
        pts.append(ClusterPoint(pid, raw["mult"], parent, frozenset(prox), on))
        index.setdefault(pid, i)
    cluster = WeightedCluster(pts)
    if plane:
        pair = PlanePair(cls["degree"], cluster)
    else:
        pair = RuledPair(surface["hirzebruch"], cls["alpha"], cls["beta"], cluster)
    report = validate_pair(pair)
    if not report.ok:
        v = report.violations[0]
        if v.id in index:
            path = f"/points/{index[v.id]}"
        elif v.kind in ("class", "degree", "genus", "c0", "bezout"):
            path = "/class"
        elif v.kind == "surface":
            path = "/surface"
        else:
            path = "/"
        raise DocumentError("; ".join(report.messages()), path, report)
    return CurveDocument(pair, dict(data.get("options", {})))


def parse_document(data) -> CurveDocument:
    data = decode(data)
    if not isinstance(data, dict):
        raise DocumentError("expected a JSON object")
    return build_document(data)


def parse_batch(data):
    """A list of entries: CurveDocument or DocumentError, one per document."""
    data = decode(data)
    if isinstance(data, dict):
        items, single = [data], True
    elif isinstance(data, list):
        items, single = data, False
    else:
        raise DocumentError("expected a JSON object or array")
    out = []
    for i, item in enumerate(items):
        try:
            if not isinstance(item, dict):
                raise DocumentError("expected a JSON object")
            out.append(build_document(item))
        except DocumentError as exc:
            if not single:
                exc.path = f"/{i}{exc.path if exc.path != '/' else ''}"
                exc.args = (f"{exc.path}: {str(exc).split(': ', 1)[-1]}",)
            out.append(exc)
    return out, single


# -- output ------------------------------------------------------------------------

def point_dict(p: ClusterPoint) -> dict:
    d = {"id": p.id, "mult": p.mult}
    if p.parent is not None:
        d["parent"] = p.parent
    extra = sorted(p.proximate_to - {p.parent})
    if extra:
        d["proximate_to"] = sorted(p.proximate_to)
    if p.on_c0 is not None and p.parent is None:
        d["on_c0"] = p.on_c0
    return d


def pair_document(pair, options=None) -> dict:
    if isinstance(pair, PlanePair):
        doc = {"surface": "plane", "class": {"degree": pair.degree}}
    else:
        doc = {"surface": {"hirzebruch": pair.a}, "class": {"alpha": pair.alpha, "beta": pair.beta}}
    doc["points"] = [point_dict(p) for p in pair.cluster]
    if options:
        doc["options"] = dict(options)
    return doc


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def plain(obj):
    """Convert engine values into JSON-ready data with no floats."""
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, Move):
        return plain(obj.as_dict())
    if isinstance(obj, (PlanePair, RuledPair)):
        return pair_document(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(plain(v) for v in obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_text(obj, prefix="") -> str:
    """Stable flat listing: one ``path<TAB>value`` line per leaf."""
    lines = []

    def walk(x, path):
        if isinstance(x, dict):
            if not x:
                lines.append(f"{path or '/'}\t{{}}")
            for k in sorted(x):
                walk(x[k], f"{path}/{k}")
        elif isinstance(x, list):
            if not x:
                lines.append(f"{path or '/'}\t[]")
            for i, v in enumerate(x):
                walk(v, f"{path}/{i}")
        else:
            lines.append(f"{path or '/'}\t{json.dumps(x, ensure_ascii=False)}")

    walk(plain(obj), prefix)
    return "\n".join(lines) + "\n"


def moves_from_data(items) -> list:
    return [Move.from_dict(d) for d in items]


__all__ = [
    "DocumentError", "CurveDocument", "load_schema", "parse_document", "parse_batch",
    "build_document", "pair_document", "point_dict", "rational", "plain",
    "canonical_json", "to_text", "moves_from_data",
]
