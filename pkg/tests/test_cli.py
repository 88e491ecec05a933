import json

import pytest

from alggraph.cli import main
from alggraph.corpus import corpus_algebras


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus")
    assert main(["corpus", "--out", str(path)]) == 0
    return path


def test_corpus_roundtrip(corpus_dir):
    from alggraph.algebra import validate_algebra

    for name, alg in corpus_algebras().items():
        raw = json.loads((corpus_dir / f"{name}.json").read_text())
        again = validate_algebra(raw)
        assert again.to_json_dict() == alg.to_json_dict()
        # parse -> serialize -> parse is a fixpoint
        assert json.loads(json.dumps(again.to_json_dict())) == raw


def test_verify_exit_codes(corpus_dir):
    assert main(["verify", "connectivity", str(corpus_dir / "s2.json")]) == 0
    assert main(["verify", "connectivity", str(corpus_dir / "proj2.json")]) == 2
    assert main(["verify", "q2d", str(corpus_dir / "parity3.json")]) == 0
    assert main(["verify", "rect", str(corpus_dir / "id_z2.json")]) == 2
    assert main(["verify", "rect", str(corpus_dir / "le_s2.json")]) == 0
    assert main(["verify", "qmaj", str(corpus_dir / "m2.json")]) == 0
    assert main(["verify", "almost-trivial", str(corpus_dir / "id_z2.json")]) == 0
    assert main(["verify", "almost-trivial", str(corpus_dir / "parity3.json")]) == 1
    assert main(["verify", "lifting", str(corpus_dir / "c3.json")]) == 0


def test_usage_and_io_errors(corpus_dir):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 64
    assert main(["verify", "connectivity", "/no/such/file.json"]) == 74
    assert main(["verify", "connectivity"]) == 64


def test_analyze_and_graph(corpus_dir, tmp_path, capsys):
    assert main(["analyze", str(corpus_dir / "proj2.json")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["omits_type1"] is False

    dot = tmp_path / "g.dot"
    assert main(["graph", str(corpus_dir / "mix3.json"), "--dot", str(dot)]) == 0
    assert "digraph" in dot.read_text()


def test_malformed_algebra_is_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"size": 2, "operations": [
        {"name": "f", "arity": 2, "table": [0, 0, 0, 0]}]}))
    assert main(["verify", "connectivity", str(bad)]) == 3


def test_relation_closure_validation(tmp_path):
    rel = tmp_path / "rel.json"
    rel.write_text(json.dumps({
        "factors": ["s2", "s2"], "arity": 2, "tuples": [[0, 1], [1, 0]]
    }))
    assert main(["verify", "q2d", str(rel)]) == 3  # not closed under join


def test_random_deterministic(capsys):
    args = ["random", "--spec", "algebra;size=2;ops=3;filter=smooth", "--seed", "9", "--count", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second
    assert len(json.loads(first)) == 5


def test_verify_campaign(capsys):
    args = [
        "verify", "connectivity",
        "--random", "algebra;size=2;ops=3;filter=smooth,omits-type-1,class-smooth",
        "--seed", "3", "--count", "6",
    ]
    code = main(args)
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["summary"]["fail"] == 0
    assert len(report["instances"]) == 6
