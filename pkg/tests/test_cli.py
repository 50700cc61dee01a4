import json

import pytest
from hypothesis import given, settings, strategies as st

from cremona.cli import main
from cremona.cluster import PlanePair
from cremona.document import DocumentError, canonical_json, pair_document, parse_document
from cremona.errors import ReplayError
from cremona.hirzebruch import Move, RuledPair
from cremona.report import emit_report, envelope, trace_record
from cremona.hirzebruch import standard_model

from randpairs import random_plane_pair, random_ruled_pair, seeded

SEXTIC_DOC = {"surface": "plane", "class": {"degree": 6}, "points": [
    {"id": "n", "mult": 2}, {"id": "t1", "mult": 2}, {"id": "t2", "mult": 2, "parent": "t1"}]}
SEPTIC_DOC = {"surface": "plane", "class": {"degree": 7}, "points": [
    {"id": "p", "mult": 4}, {"id": "a", "mult": 2, "parent": "p"}, {"id": "b", "mult": 2, "parent": "p"}]}
D1_DOC = {"surface": {"hirzebruch": 3}, "class": {"alpha": 3, "beta": 11},
          "points": [{"id": "n", "mult": 2, "on_c0": True}]}
D2_DOC = {"surface": {"hirzebruch": 3}, "class": {"alpha": 3, "beta": 11},
          "points": [{"id": "n", "mult": 2, "on_c0": False}]}


def run(tmp_path, capsys, args, doc=None):
    argv = list(args)
    if doc is not None:
        path = tmp_path / "in.json"
        path.write_text(json.dumps(doc))
        argv += ["--input", str(path)]
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_parse_examples():
    pair = parse_document(json.dumps(SEXTIC_DOC).encode()).pair
    assert isinstance(pair, PlanePair) and pair.degree == 6
    assert [(p.id, p.mult, p.parent) for p in pair.cluster] == [("n", 2, None), ("t1", 2, None), ("t2", 2, "t1")]
    pair = parse_document(D1_DOC).pair
    assert isinstance(pair, RuledPair) and (pair.a, pair.alpha, pair.beta) == (3, 3, 11)
    assert pair.cluster.get("n").on_c0 is True


def test_missing_class_path():
    with pytest.raises(DocumentError) as err:
        parse_document(b'{"surface": "plane", "points": []}')
    assert err.value.path == "/class"


@pytest.mark.parametrize("raw,path", [
    (b'{"surface": "plane", "class": {"degree": 3}, "extra": 1}', "/extra"),
    (b'{"surface": "plane", "class": {"degree": 3}, "points": [{"id": "a", "mult": 0}]}', "/points/0/mult"),
    (b'{"surface": "plane", "class": {"alpha": 1, "beta": 2}}', "/class"),
    (b'{"surface": "plane", "class": {"degree": 3}, "points": [{"id": "a", "mult": 5}]}', "/points/0"),
    (b'{"surface": "plane", "class": {"degree": 3}, "points": [{"id": "a", "mult": 1, "on_c0": true}]}',
     "/points/0/on_c0"),
])
def test_error_locations(raw, path):
    with pytest.raises(DocumentError) as err:
        parse_document(raw)
    assert err.value.path == path


def test_malformed_json():
    with pytest.raises(DocumentError, match="malformed JSON"):
        parse_document(b"{nope")
    with pytest.raises(DocumentError, match="UTF-8"):
        parse_document(b"\xff\xfe")


def test_ids_normalised():
    doc = {"surface": "plane", "class": {"degree": 4},
           "points": [{"id": " a ", "mult": 2}, {"id": "b", "mult": 1, "parent": "a "}]}
    pair = parse_document(doc).pair
    assert pair.cluster.ids == ("a", "b") if isinstance(pair.cluster.ids, tuple) else list(pair.cluster.ids) == ["a", "b"]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_round_trip(seed, ruled):
    rng = seeded(seed)
    pair = random_ruled_pair(rng) if ruled else random_plane_pair(rng)
    once = parse_document(canonical_json(pair_document(pair))).pair
    twice = parse_document(canonical_json(pair_document(once))).pair
    assert once == twice
    assert pair_document(once) == pair_document(pair)


def test_discrepancy_encoding(tmp_path, capsys):
    doc = {"surface": "plane", "class": {"degree": 6}, "points": [{"id": "p1", "mult": 2}]}
    code, out = run(tmp_path, capsys, ["discrepancies", "--coeff", "1/2"], doc)
    assert code == 0
    assert '"a(p1)": "0/1"' in out
    assert "." not in json.dumps(json.loads(out)["verdicts"]["entries"])


def test_minimal_degree_report(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["minimal-degree"], D2_DOC)
    assert code == 0
    assert '"minimal_degree": 8' in out
    rep = json.loads(out)
    assert rep["verdicts"]["top_multiplicity"] == 5
    assert rep["engine"]["version"] and rep["seed"] == 0


def test_determinism(tmp_path, capsys):
    _, a = run(tmp_path, capsys, ["standard-model", "--all"], SEXTIC_DOC)
    _, b = run(tmp_path, capsys, ["standard-model", "--all"], SEXTIC_DOC)
    assert a == b


def test_exit_codes(tmp_path, capsys):
    assert run(tmp_path, capsys, ["validate"], SEXTIC_DOC)[0] == 0
    code, out = run(tmp_path, capsys, ["validate"], {"surface": "plane", "points": []})
    assert code == 1 and json.loads(out)["error"]["path"] == "/class"
    bad = dict(SEXTIC_DOC, points=[{"id": "a", "mult": 2}, {"id": "b", "mult": 3, "parent": "a"}])
    assert run(tmp_path, capsys, ["genus"], bad)[0] == 1


def test_replay_mismatch_on_emission():
    pair = parse_document(SEPTIC_DOC).pair
    m = standard_model(pair)
    moves = list(m.trace)
    d = moves[1].as_dict()
    d["class_after"] = {"degree": 11}
    moves[1] = Move.from_dict(d)
    rep = envelope("standard-model", {}, {"traces": [trace_record(pair, moves, m.pair)]})
    with pytest.raises(ReplayError) as err:
        emit_report(rep)
    assert err.value.step == 1


def test_replay_subcommand(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["minimal-degree"], D1_DOC)
    trace_file = tmp_path / "report.json"
    trace_file.write_text(out)
    code, out = run(tmp_path, capsys, ["replay", "--trace", str(trace_file)])
    assert code == 0
    assert json.loads(out)["verdicts"]["replayed"][0]["final"]["class"] == {"degree": 9}
    rep = json.loads(trace_file.read_text())
    rep["traces"][0]["moves"][0]["class_after"]["beta"] = 99
    trace_file.write_text(json.dumps(rep))
    code, out = run(tmp_path, capsys, ["replay", "--trace", str(trace_file)])
    assert code == 2
    assert json.loads(out)["error"]["step"] == 0


def test_batch_per_entry(tmp_path, capsys):
    bad = {"surface": "plane", "class": {"degree": 2}, "points": [{"id": "x", "mult": 3}]}
    code, out = run(tmp_path, capsys, ["genus"], [SEXTIC_DOC, bad, D1_DOC])
    rep = json.loads(out)
    assert code == 1
    assert [e["exit_code"] for e in rep["entries"]] == [0, 1, 0]
    assert rep["entries"][1]["error"]["path"] == "/1/points/0"
    code2, out2 = run(tmp_path, capsys, ["genus", "--jobs", "2"], [SEXTIC_DOC, bad, D1_DOC])
    assert (code2, out2) == (code, out)


def test_text_format(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["genus", "--format", "text"], SEXTIC_DOC)
    assert code == 0
    assert "/verdicts/genus\t7" in out.splitlines()


def test_options_precedence(tmp_path, capsys):
    doc = dict(SEXTIC_DOC, options={"branch_bound": 1, "tie_break": "last"})
    _, out = run(tmp_path, capsys, ["standard-model", "--all"], doc)
    rep = json.loads(out)
    assert rep["options"]["branch_bound"] == 1 and rep["verdicts"]["truncated"]
    _, out = run(tmp_path, capsys, ["standard-model", "--all", "--branch-bound", "64"], doc)
    assert json.loads(out)["verdicts"]["count"] == 2
    _, out = run(tmp_path, capsys, ["standard-model"], doc)
    assert json.loads(out)["verdicts"]["models"][0]["state"]["class"] == {"alpha": 4, "beta": 8}


def test_line_equivalence_command(tmp_path, capsys):
    doc = {"surface": "plane", "class": {"degree": 6}, "points": [{"id": f"n{i}", "mult": 2} for i in range(10)]}
    code, out = run(tmp_path, capsys, ["line-equivalence"], doc)
    assert code == 0 and json.loads(out)["verdicts"]["status"] == "NotEquivalent"
    code, out = run(tmp_path, capsys, ["line-equivalence"], SEXTIC_DOC)
    assert code == 1


def test_document_free_commands(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["scroll-reduce", "--degree", "5"])
    assert json.loads(out)["verdicts"]["trace"] == [[5, 4], [4, 3], [3, 2], [2, 1]]
    code, out = run(tmp_path, capsys, ["ci-certificate", "-a", "2", "-b", "4", "-k", "2"])
    assert json.loads(out)["verdicts"]["certified"] is True
    code, out = run(tmp_path, capsys, ["nf-certificate", "-n", "2", "--d-high", "6", "--d-low", "5", "--max-mult", "3"])
    assert json.loads(out)["verdicts"]["certified"] is False
    code, out = run(tmp_path, capsys, ["scroll-reduce", "--degree", "1"])
    assert code == 1


def test_nf_certificate_document(tmp_path, capsys):
    doc = {"surface": "plane", "class": {"degree": 7}, "points": [{"id": "a", "mult": 2}]}
    code, out = run(tmp_path, capsys, ["nf-certificate"], doc)
    assert code == 0 and json.loads(out)["verdicts"]["certified"] is True


def test_classify_command(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["classify", "--coeff", "1/2"], SEXTIC_DOC)
    assert json.loads(out)["verdicts"]["classification"] == "Canonical"
    code, out = run(tmp_path, capsys, ["classify", "--coeff", "abc"], SEXTIC_DOC)
    assert code == 1


def test_selftest(tmp_path, capsys):
    code, out = run(tmp_path, capsys, ["selftest"])
    assert code == 0 and json.loads(out)["verdicts"]["ok"] is True


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out = run(tmp_path, capsys, ["genus", "--output", str(target)], SEXTIC_DOC)
    assert out == "" and json.loads(target.read_text())["verdicts"]["genus"] == 7
