import hashlib
import subprocess
import sys

import pytest

from coevo.cli import main
from coevo.rdf import serialize_ntriples

from conftest import POLITICIAN, read_nt


def ex1_args(out, *extra, command="sync"):
    return [command, "--source", str(POLITICIAN / "base.nt"), "--target", str(POLITICIAN / "base.nt"),
            "--source-changes", str(POLITICIAN / "source-changes"),
            "--target-changes", str(POLITICIAN / "target-changes"), "--out", str(out), *extra]


@pytest.mark.parametrize("strategy, config", [
    ("I", "strategy-I.toml"), ("II", "strategy-II.toml"), ("III", "c3.toml"), ("IV", "c4.toml")])
def test_sync_goldens(tmp_path, strategy, config):
    assert main(ex1_args(tmp_path, "--config", str(POLITICIAN / config))) == 0
    got = (tmp_path / "target.after.nt").read_bytes()
    assert got == (POLITICIAN / "expected" / f"strategy-{strategy}.nt").read_bytes()
    for name in ("source.after.nt", "out-source.added.nt", "out-source.removed.nt",
                 "out-target.added.nt", "out-target.removed.nt", "conflicts.tsv", "report.tsv"):
        assert (tmp_path / name).exists()


def test_sync_outputs_reapply(tmp_path):
    from coevo.changeset import Changeset, apply
    assert main(ex1_args(tmp_path, "--config", str(POLITICIAN / "c4.toml"))) == 0
    base = read_nt(POLITICIAN / "base.nt")
    for side in ("source", "target"):
        c = Changeset(read_nt(tmp_path / f"out-{side}.added.nt"),
                      read_nt(tmp_path / f"out-{side}.removed.nt"))
        assert apply(base, c) == read_nt(tmp_path / f"{side}.after.nt")


def test_conflicts_command(tmp_path, capsys):
    before = {p: p.read_bytes() for p in POLITICIAN.rglob("*.nt")}
    assert main(ex1_args(tmp_path, "--config", str(POLITICIAN / "c4.toml"), command="conflicts")) == 0
    assert "1 conflicting key(s)" in capsys.readouterr().out
    assert sorted(p.name for p in tmp_path.iterdir()) == ["conflicts.tsv"]
    rows = (tmp_path / "conflicts.tsv").read_text().splitlines()
    assert len(rows) == 2 and "birthYear" in rows[1] and "CaseIV" in rows[1]
    assert {p: p.read_bytes() for p in POLITICIAN.rglob("*.nt")} == before


def test_scenario_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(ex1_args(out, "--seed", "5", command="scenario")) == 0

    def digest(root):
        return {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
                for p in sorted(root.rglob("*")) if p.is_file()}

    da = digest(a)
    assert da == digest(b)
    assert {k.split("/")[0] for k in da} == {"report.tsv"} | {f"scenario-{i}" for i in range(1, 6)}
    assert len((a / "report.tsv").read_text().splitlines()) == 6


def test_scenarios_file(tmp_path):
    sc = tmp_path / "s.toml"
    sc.write_text('[[scenarios]]\nname = "only-two"\ndefault = "II"\n')
    assert main(ex1_args(tmp_path / "o", "--scenarios", str(sc), command="scenario")) == 0
    assert [p.name for p in (tmp_path / "o").iterdir() if p.is_dir()] == ["scenario-only-two"]


def test_seed_precedence(tmp_path, monkeypatch):
    # without a pinned policy seed, `any` on birthYear follows the run seed
    cfg = tmp_path / "c.toml"
    cfg.write_text('seed = 0\n[strategy]\ndefault = "IV"\n[policy]\ndefault = "any"\n'
                   '[properties."http://dbpedia.org/property/birthYear"]\n'
                   'kind = "DatatypeProperty"\nfunctional = true\n')

    def kept(*extra):
        out = tmp_path / f"o{len(list(tmp_path.iterdir()))}"
        assert main(ex1_args(out, "--config", str(cfg), *extra)) == 0
        by = [t for t in read_nt(out / "target.after.nt") if t.predicate.value.endswith("birthYear")]
        return by[0].object.lexical

    assert kept() == "1959"
    assert kept("--seed", "2") == "1959-01-01"
    monkeypatch.setenv("COEVO_SEED", "2")
    assert kept() == "1959-01-01"
    assert kept("--seed", "0") == "1959"
    monkeypatch.setenv("COEVO_SEED", "zwei")
    assert main(ex1_args(tmp_path / "bad", "--config", str(cfg))) == 4


def test_exit_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.nt"
    bad.write_text("<http://a> <http://b> .\n")
    args = ex1_args(tmp_path)
    args[args.index("--source") + 1] = str(bad)
    assert main(args) == 2
    assert "bad.nt" in capsys.readouterr().err
    args[args.index("--source") + 1] = str(tmp_path / "missing.nt")
    assert main(args) == 2


def test_exit_config_error(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[strategy]\ndefault = 'V'\n")
    assert main(ex1_args(tmp_path, "--config", str(cfg))) == 4


def test_exit_resolution_error(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[policy]\ndefault = "latest"\n'
                   '[properties."http://dbpedia.org/property/birthYear"]\n'
                   'kind = "DatatypeProperty"\nfunctional = true\n')
    assert main(ex1_args(tmp_path, "--config", str(cfg))) == 3
    err = capsys.readouterr().err
    assert "resolution error at" in err and "birthYear" in err


def test_strict_inclusion(tmp_path, caplog):
    target = tmp_path / "t.nt"
    target.write_text('<http://x/s> <http://x/p> "not in source" .\n')
    args = ex1_args(tmp_path / "o")
    args[args.index("--target") + 1] = str(target)
    assert main(args) == 0
    assert "absent from source" in caplog.text
    assert main(args + ["--strict"]) == 2


def test_empty_changesets(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    args = ex1_args(tmp_path / "o")
    args[args.index("--source-changes") + 1] = str(empty)
    args[args.index("--target-changes") + 1] = str(empty)
    assert main(args) == 0
    assert (tmp_path / "o" / "target.after.nt").read_bytes() == (POLITICIAN / "base.nt").read_bytes()
    assert (tmp_path / "o" / "out-target.added.nt").read_bytes() == b""


def test_diff_roundtrip(tmp_path, capsys):
    new = tmp_path / "new.nt"
    new.write_bytes((POLITICIAN / "expected" / "strategy-IV.nt").read_bytes())
    assert main(["diff", str(POLITICIAN / "base.nt"), str(new), "--out", str(tmp_path / "d"),
                 "--seq", "3"]) == 0
    assert capsys.readouterr().out.strip() == "added 6 removed 1"
    out = tmp_path / "o"
    args = ex1_args(out, "--config", str(POLITICIAN / "strategy-II.toml"))
    args[args.index("--target-changes") + 1] = str(tmp_path / "d")
    assert main(args) == 0
    assert read_nt(out / "target.after.nt") == read_nt(new)
    assert (out / "target.after.nt").read_text() == serialize_ntriples(read_nt(new))


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "coevo.cli", *ex1_args(tmp_path, command="conflicts")],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    r = subprocess.run([sys.executable, "-m", "coevo.cli", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2
