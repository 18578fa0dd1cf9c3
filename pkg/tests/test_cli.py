import json
import subprocess
import sys

import pytest

from chuspace import ChuSpace
from chuspace.cli import run
from chuspace.formats import emit_morphism, emit_space, load_space, write_text
from chuspace.gallery import order_cocones


@pytest.fixture
def files(tmp_path, two_column_map):
    c, c2, m = two_column_map
    write_text(tmp_path / "c.chu", emit_space(c))
    write_text(tmp_path / "d.chu", emit_space(c2))
    write_text(tmp_path / "m.chumorph", emit_morphism(m, "c.chu", "d.chu"))
    return tmp_path


def _json(capsys, argv):
    assert run(argv + ["--json"]) == 0
    return json.loads(capsys.readouterr().out)


def test_check(files, capsys):
    out = _json(capsys, ["check", str(files / "c.chu")])
    assert out["extensional"] and out["separable"] and out["discrete"] is True
    assert run(["check", str(files / "c.chu")]) == 0
    assert "extensional" in capsys.readouterr().out


def test_json_and_table_agree(files, capsys):
    js = _json(capsys, ["classify", str(files / "c.chu")])
    run(["classify", str(files / "c.chu")])
    table = dict(line.split(None, 1) for line in capsys.readouterr().out.splitlines())
    assert table["missing_function"].strip() == "-"
    for key in ("extensional", "finite_iC", "finite_iE", "discrete"):
        assert table[key].strip() == str(js[key])


def test_morphisms_and_iso(files, capsys):
    assert _json(capsys, ["morphisms", str(files / "c.chu"), str(files / "d.chu")])["count"] == 1
    assert _json(capsys, ["iso", str(files / "c.chu"), str(files / "c.chu")])["isomorphic"]


def test_monic_writes_witness(files, capsys):
    out_dir = files / "w"
    out = _json(capsys, ["monic", str(files / "m.chumorph"), "--category", "C", "--emit", str(out_dir)])
    assert out["monic"] is False and out["witness_kind"] == "backward-surjectivity"
    assert load_space(out_dir / "witness_space.chu").attributes == ("x1", "x2.copy1", "x2.copy2")
    assert _json(capsys, ["monic", str(files / "m.chumorph"), "--category", "E"])["monic"] is True


def test_gallery_emit_then_colimit_and_mediate(tmp_path, capsys):
    g = tmp_path / "g"
    assert run(["gallery", "order-chain", "--window", "3", "--emit", str(g)]) == 0
    capsys.readouterr()
    out = _json(capsys, ["colimit", str(g / "chain.chuchain")])
    assert out["thread_count"] == 3 and out["exact"]
    apex, legs, _, _ = order_cocones(3)
    write_text(tmp_path / "apex.chu", emit_space(apex))
    paths = []
    for i, leg in enumerate(legs, start=1):
        p = tmp_path / f"leg{i}.chumorph"
        write_text(p, emit_morphism(leg, target_ref="apex.chu"))
        paths.append(str(p))
    out = _json(capsys, ["mediate", str(g / "chain.chuchain"), str(tmp_path / "apex.chu")] + paths)
    assert out["exists"]


def test_demo_and_sweep(capsys):
    out = _json(capsys, ["gallery", "demo-no-colimit", "--window", "3"])
    assert out["commuting_monic_iC"] == 0 and out["ie_mediator_exists"]
    out = _json(capsys, ["sweep", "--suite", "roundtrip"])
    assert out["failures"] == 0


def test_fraisse_and_amalgamate(tmp_path, capsys):
    out = _json(capsys, ["fraisse", "--steps", "15", "--emit", str(tmp_path / "u")])
    assert out["resolutions_verified"] == 15 and out["chain_problems"] == []
    assert (tmp_path / "u" / "log.json").exists()
    base = ChuSpace.from_rows([[1]], ["a"], ["x"])
    from chuspace import ChuMorphism
    left = ChuSpace.from_rows([[1, 1], [0, 1]], ["a", "b"], ["x", "z"])
    f = ChuMorphism.from_labels(base, left, {"a": "a"}, {"x": "x", "z": "x"})
    write_text(tmp_path / "b.chu", emit_space(base))
    write_text(tmp_path / "l.chu", emit_space(left))
    write_text(tmp_path / "f.chumorph", emit_morphism(f, "b.chu", "l.chu"))
    b, l, fm = (str(tmp_path / n) for n in ("b.chu", "l.chu", "f.chumorph"))
    out = _json(capsys, ["amalgamate", b, l, l, fm, fm])
    assert out["commutes"] and out["apex_extensional"]


def test_exit_codes(tmp_path, files, capsys):
    bad = tmp_path / "bad.chu"
    bad.write_text("chu v1\nnonsense\n")
    assert run(["check", str(bad)]) == 2
    big = ChuSpace.from_rows([[0]] * 6, [f"a{k}" for k in range(6)], ["x"])
    write_text(tmp_path / "big.chu", emit_space(big))
    write_text(tmp_path / "big2.chu", emit_space(ChuSpace.from_rows([[0]] * 20, [f"b{k}" for k in range(20)], ["y"])))
    assert run(["morphisms", str(tmp_path / "big.chu"), str(tmp_path / "big2.chu"), "--budget", "100"]) == 3
    assert run(["nosuchcommand"]) == 1
    assert run(["monic", str(files / "m.chumorph"), "--category", "Q"]) == 1


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "chuspace.cli", "check", str(files / "c.chu"), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["objects"] == 1
