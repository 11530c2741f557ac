import json
import random

import pytest

from scop.cli import main
from scop.generate import random_sco, relabel_isomorphism
from scop.io import dump_system, load_system
from scop.morphisms import identity


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def coin_file(tmp_path, coin):
    path = tmp_path / "coin.json"
    dump_system(coin, path)
    return path


@pytest.fixture
def quantum_file(tmp_path, capsys):
    path = tmp_path / "quantum.json"
    code, _, _ = run(capsys, "demo", "quantum", "--grid", 256, "--shape", "gaussian", "--blocks", 3, "--out", path)
    assert code == 0
    return path


def test_validate(capsys, coin_file, tmp_path):
    code, out, _ = run(capsys, "validate", coin_file)
    assert code == 0 and json.loads(out)["ok"]
    bad = json.loads(coin_file.read_text())
    bad["mu"].append({"f": "flip", "q": "h", "e": "look", "p": "h", "prob": "1/2"})
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    assert run(capsys, "validate", tmp_path / "bad.json")[0] == 1


def test_parse_and_io_errors(capsys, tmp_path):
    assert run(capsys, "validate", tmp_path / "missing.json")[0] == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run(capsys, "validate", tmp_path / "junk.json")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "verify", tmp_path / "x.json")[0] == 2  # no check chosen


def test_analyze(capsys, coin_file):
    code, out, _ = run(capsys, "analyze", coin_file)
    report = json.loads(out)
    assert code == 0
    assert set(report) == {"validation", "order", "dynamics", "experiments"}
    assert report["experiments"]["per_experiment"]["look"]["tests"]["heads"] == ["H"]
    code, out, _ = run(capsys, "analyze", coin_file, "--sections", "order")
    assert set(json.loads(out)) == {"order"}


def test_human_output(capsys, coin_file):
    _, out, _ = run(capsys, "validate", coin_file, "--human")
    assert "\n  " in out


def test_complete(capsys, tmp_path):
    path = tmp_path / "op.json"
    assert run(capsys, "generate", "--seed", 3, "--profile", "operational", "--out", path)[0] == 0
    code, out, _ = run(capsys, "complete", path)
    report = json.loads(out)
    assert code == 0 and report["property_completeness"]["complete"]
    assert report["destruction_state"]["state"] == "0"


def test_verify_cascade_on_demo(capsys, quantum_file):
    code, out, _ = run(capsys, "verify", "--cascade", "e", quantum_file)
    assert code == 0 and json.loads(out)["cascade"]
    code, out, _ = run(capsys, "verify", quantum_file, "--first-kind", "e")
    assert code == 0
    assert not json.loads(out)["context"]["first_kind"] and json.loads(out)["experiment"]["first_kind"]


def test_verify_operational(capsys, coin_file):
    code, out, _ = run(capsys, "verify", coin_file, "--operational")
    assert code == 0 and json.loads(out)["operational"]
    assert run(capsys, "verify", coin_file, "--cascade", "look")[0] == 2  # no spectrum


def test_construct_and_product(capsys, tmp_path):
    sco = random_sco(random.Random(1), 3, 2, closure="none")
    src = tmp_path / "sco.json"
    dump_system(sco, src)
    out_path = tmp_path / "scop.json"
    code, out, _ = run(capsys, "construct", "--from-sco", src, "--out", out_path)
    assert code == 0 and json.loads(out)["properties"] == len(load_system(out_path).properties)
    assert run(capsys, "construct", "--from-sco", src, "--cap", 2)[0] == 2
    code, out, _ = run(capsys, "product", out_path, "--contexts", "x0,x1", "--id", "X", "--experiment")
    assert code == 0
    assert "X" in json.loads(out)["contexts"]
    code, out, _ = run(capsys, "product", out_path, "--states", "s0,s1", "--id", "S")
    assert code == 0
    assert "S" in [s["id"] for s in json.loads(out)["states"]]
    assert run(capsys, "product", out_path, "--states", "s0,zz", "--id", "S")[0] == 2


def morphism_files(tmp_path, coin, n=None):
    dump_system(coin, tmp_path / "s.json")
    mor = identity(coin)
    data = {"source": "s.json", "target": "s.json", "m": mor.m, "l": mor.l, "n": n or mor.n, "k": mor.k}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(data))
    return path


def test_morphism_verify(capsys, tmp_path, coin):
    code, out, _ = run(capsys, "morphism", "verify", morphism_files(tmp_path, coin))
    assert code == 0 and json.loads(out)["preservation"]["ok"]
    broken = morphism_files(tmp_path, coin, n={"heads": "tails", "tails": "tails", "landed": "landed"})
    code, out, _ = run(capsys, "morphism", "verify", broken)
    assert code == 1
    assert {"a": "heads", "p'": "h"} in [{k: v[k] for k in ("a", "p'")} for v in json.loads(out)["morphism"]["covariance_xi"]]


def test_morphism_lift(capsys, tmp_path):
    sco = random_sco(random.Random(4), 3, 1, closure="none")
    iso = relabel_isomorphism(sco, random.Random(2))
    dump_system(iso.source, tmp_path / "a.json")
    dump_system(iso.target, tmp_path / "b.json")
    (tmp_path / "sco_m.json").write_text(json.dumps(
        {"source": "a.json", "target": "b.json", "m": iso.m, "l": iso.l, "k": iso.k}
    ))
    code, out, _ = run(capsys, "morphism", "lift", "--sco", tmp_path / "sco_m.json")
    assert code == 0 and json.loads(out)["morphism"]["ok"]
    assert run(capsys, "morphism", "lift")[0] == 2


def test_demo_classical(capsys):
    code, out, _ = run(capsys, "demo", "classical", "--particles", "0,1;2.5,-1")
    assert code == 0 and len(json.loads(out)["states"]) == 2
    assert run(capsys, "demo", "classical", "--particles", "1,0;1,2")[0] == 2
    assert run(capsys, "demo", "classical", "--particles", "1")[0] == 2


def test_sample(capsys, coin_file, monkeypatch):
    code, out, _ = run(capsys, "sample", coin_file, "--start", "flip,up", "--steps", 5, "--seed", 1)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6 and lines[0] == "flip\tup"
    monkeypatch.setenv("SCOP_SEED", "1")
    assert run(capsys, "sample", coin_file, "--start", "flip,up", "--steps", 5, "--seed", 99)[1] == out
    monkeypatch.setenv("SCOP_SEED", "x")
    assert run(capsys, "sample", coin_file, "--start", "flip,up")[0] == 2


def test_generate_is_byte_identical(capsys, tmp_path):
    for profile in ("generic", "d-classical", "operational"):
        a, b = tmp_path / f"{profile}a.json", tmp_path / f"{profile}b.json"
        run(capsys, "generate", "--seed", 8, "--profile", profile, "--out", a)
        run(capsys, "generate", "--seed", 8, "--profile", profile, "--out", b)
        assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "generate", "--seed", 8)
    assert code == 0 and out == run(capsys, "generate", "--seed", 8)[1]
