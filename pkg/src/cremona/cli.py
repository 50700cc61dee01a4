"""Command-line front end: ``cremona <command> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import report
from .document import DocumentError, build_document, canonical_json, decode, moves_from_data
from .errors import CremonaError, InputError, InvariantViolation, ReplayError
from .hirzebruch import replay

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INTERNAL = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="curve document (JSON object or array); '-' for stdin")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--max-class-degree", type=int, default=None,
                        help="degree bound for the (-1)-class search (default 6)")
    common.add_argument("--branch-bound", type=int, default=None,
                        help="cap on reduction runs when enumerating choices (default 64)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for document arrays")

    p = argparse.ArgumentParser(prog="cremona", description="Cremona equivalence of plane curves.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a document")
    sub.add_parser("genus", parents=[common], help="combinatorial genus")
    s = sub.add_parser("discrepancies", parents=[common], help="log discrepancies of (S, cC)")
    s.add_argument("--coeff", required=True, help="coefficient c as p/q")
    s.add_argument("--along-c0", action="store_true", help="only valuations centred on C0")
    s = sub.add_parser("classify", parents=[common], help="Terminal / Canonical / NonCanonical")
    s.add_argument("--coeff", required=True, help="coefficient c as p/q")
    s = sub.add_parser("standard-model", parents=[common], help="reduce to a standard model")
    s.add_argument("--all", action="store_true", help="enumerate over all choices")
    sub.add_parser("minimal-degree", parents=[common], help="minimal degree verdict with witness")
    sub.add_parser("line-equivalence", parents=[common], help="is the curve equivalent to a line")
    s = sub.add_parser("nf-certificate", parents=[common], help="Noether-Fano certificate")
    s.add_argument("-n", type=int, help="ambient dimension (numeric form, no document)")
    s.add_argument("--d-high", type=int)
    s.add_argument("--d-low", type=int)
    s.add_argument("--max-mult", type=int)
    s = sub.add_parser("scroll-reduce", parents=[common], help="degree reduction of a scroll-like surface")
    s.add_argument("--degree", type=int, required=True)
    s = sub.add_parser("ci-certificate", parents=[common], help="projected complete intersection")
    s.add_argument("-a", type=int, required=True)
    s.add_argument("-b", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s = sub.add_parser("replay", parents=[common], help="replay a trace or a report")
    s.add_argument("--trace", required=True, help="report JSON, trace object or move list")
    sub.add_parser("selftest", parents=[common], help="run built-in regression checks")
    return p


def _read_input(path):
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def command_options(args, doc_options=None) -> dict:
    """Flags win over document options; document options win over defaults."""
    doc_options = doc_options or {}
    mcd = args.max_class_degree if args.max_class_degree is not None else doc_options.get("max_class_degree", 6)
    bb = args.branch_bound if args.branch_bound is not None else doc_options.get("branch_bound", 64)
    opts = {"max_class_degree": mcd, "branch_bound": bb, "tie_break": doc_options.get("tie_break", "first")}
    if getattr(args, "coeff", None) is not None:
        opts["coeff"] = args.coeff
    if getattr(args, "along_c0", False):
        opts["along_c0"] = True
    if getattr(args, "all", False):
        opts["all"] = True
    return opts


def _error_body(exc) -> tuple:
    if isinstance(exc, DocumentError):
        body = {"error": {"kind": "validation", "path": exc.path, "message": str(exc)}}
        if exc.report is not None:
            body["error"]["violations"] = exc.report.messages()
        return body, EXIT_VALIDATION
    if isinstance(exc, InputError):
        return {"error": {"kind": "validation", "message": str(exc)}}, EXIT_VALIDATION
    if isinstance(exc, ReplayError):
        return {"error": {"kind": "replay", "step": exc.step, "message": str(exc)}}, EXIT_INTERNAL
    return {"error": {"kind": "invariant", "message": str(exc)}}, EXIT_INTERNAL


def run_entry(command, raw, flags):
    """Process one decoded document; returns (body, exit code).  Top level so
    worker processes can pickle it."""
    args = argparse.Namespace(**flags)
    try:
        doc = build_document(raw)
        opts = command_options(args, doc.options)
        body = report.DOCUMENT_COMMANDS[command](doc.pair, opts)
        body = {"input": doc.pair, "options": opts, **body}
        # replay now so a divergence is charged to this entry
        for tr in body.get("traces", []):
            report.verify_trace(tr)
        # plain data crosses process boundaries cleanly
        return json.loads(canonical_json(body)), EXIT_OK
    except CremonaError as exc:
        return _error_body(exc)


def _flags(args) -> dict:
    keep = ("max_class_degree", "branch_bound", "coeff", "along_c0", "all")
    return {k: getattr(args, k, None) for k in keep}


def run_documents(args):
    data = decode(_read_input(args.input))
    if isinstance(data, dict):
        items, single = [data], True
    elif isinstance(data, list):
        items, single = data, False
    else:
        raise DocumentError("expected a JSON object or array")
    flags = _flags(args)
    if args.jobs and args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_entry, [args.command] * len(items), items, [flags] * len(items)))
    else:
        results = [run_entry(args.command, it, flags) for it in items]
    if single:
        body, code = results[0]
        return body, code
    entries = []
    for i, (body, code) in enumerate(results):
        if "error" in body and body["error"].get("path"):
            p = body["error"]["path"]
            body["error"]["path"] = f"/{i}" + ("" if p == "/" else p)
        entries.append({"index": i, "exit_code": code, **body})
    return {"entries": entries}, max(code for _, code in results) if results else EXIT_OK


def run_replay(args):
    with open(args.trace, "rb") as fh:
        data = json.loads(fh.read().decode("utf-8"))
    start_doc = None
    if args.input is not None:
        start_doc = build_document(decode(_read_input(args.input))).pair
    if isinstance(data, list):
        traces = [{"moves": data}]
    elif "traces" in data:
        traces = data["traces"]
    elif "moves" in data:
        traces = [data]
    else:
        raise InputError("trace file has no moves")
    out = []
    for t_index, t in enumerate(traces):
        start = start_doc if start_doc is not None else build_document(t["start"]).pair
        moves = moves_from_data(t["moves"])
        end = replay(start, moves)
        rec = {"trace": t_index, "steps": len(moves), "final": report.state_summary(end),
               "final_state": end}
        if "final" in t:
            claimed = build_document(t["final"]).pair
            if not report.same_state(end, claimed):
                raise ReplayError(
                    f"trace {t_index}, step {len(moves) - 1}: final state differs from the recorded one",
                    step=max(len(moves) - 1, 0))
            rec["matches"] = True
        out.append(rec)
    return {"verdicts": {"replayed": out}}, EXIT_OK


def run_selftest(args):
    from .selftest import run_checks
    checks = run_checks()
    ok = all(c["ok"] for c in checks)
    return {"verdicts": {"ok": ok, "checks": checks}}, EXIT_OK if ok else EXIT_INTERNAL


def dispatch(args):
    c = args.command
    if c == "nf-certificate" and args.n is not None:
        return report.cmd_nf_numeric(args.n, args.d_high, args.d_low, args.max_mult), EXIT_OK
    if c in report.DOCUMENT_COMMANDS:
        return run_documents(args)
    if c == "replay":
        return run_replay(args)
    if c == "selftest":
        return run_selftest(args)
    if c == "scroll-reduce":
        return report.cmd_scroll_reduce(args.degree), EXIT_OK
    if c == "ci-certificate":
        return report.cmd_ci_certificate(args.a, args.b, args.k), EXIT_OK
    raise InputError(f"unknown command {c}")


def _echo(args) -> dict:
    skip = {"command", "output", "input", "jobs", "format", "trace"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v not in (None, False)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        body, code = dispatch(args)
    except CremonaError as exc:
        body, code = _error_body(exc)
    result = report.envelope(args.command, _echo(args), body)
    try:
        data = report.emit_report(result, args.format)
    except (ReplayError, InvariantViolation) as exc:
        body, code = _error_body(exc)
        data = report.emit_report(report.envelope(args.command, _echo(args), body), args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    if code:
        msg = body.get("error", {}).get("message") if isinstance(body, dict) else None
        if msg:
            print(f"cremona: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
