import csv
import io

import pytest

from tla2smt.cli import main, read_manifest

from conftest import CORPUS, needs_z3


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_translate_integer_example(capsys):
    code, out, _ = run(["translate", str(CORPUS / "int3.tlapo")], capsys)
    assert code == 0
    assert "(in (i2u 3) tla_Int)" in out


def test_translate_to_file(tmp_path, capsys):
    target = tmp_path / "out.smt2"
    code, out, _ = run(["translate", str(CORPUS / "records.tlapo"), "--out", str(target)], capsys)
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.count("(check-sat)") == 2 and "(reset)" in text


@needs_z3
def test_prove_double_negation(capsys):
    code, out, _ = run(["prove", str(CORPUS / "notnot_iff.tlapo")], capsys)
    assert (code, out) == (0, "proved\n")


@needs_z3
def test_prove_several_obligations(capsys):
    code, out, _ = run(["prove", str(CORPUS / "records.tlapo"), "--jobs", "2"], capsys)
    rows = [ln.split("\t") for ln in out.splitlines()]
    assert [r[:2] for r in rows] == [["records#1", "proved"], ["records#2", "proved"]]


def test_trace(capsys):
    code, out, _ = run(["trace", str(CORPUS / "fcn_square.tlapo")], capsys)
    assert code == 0
    assert "app_lambda @ " in out and " --> " in out


def test_dump_stages(capsys):
    code, _, err = run(["translate", str(CORPUS / "abstraction_cup.tlapo"),
                        "--dump-stage", "all"], capsys)
    assert code == 0
    for stage in ("[boolify]", "[reduce1]", "[final]"):
        assert stage in err


def test_unknown_stage_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as ex:
        main(["translate", str(CORPUS / "int3.tlapo"), "--dump-stage", "nope"])
    assert ex.value.code == 2


def test_bad_timeout_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as ex:
        main(["prove", str(CORPUS / "int3.tlapo"), "--timeout", "0"])
    assert ex.value.code == 2


def test_missing_subcommand(capsys):
    with pytest.raises(SystemExit) as ex:
        main([])
    assert ex.value.code == 2


def test_missing_file(capsys):
    code, _, err = run(["translate", "/nonexistent.tlapo"], capsys)
    assert code == 2 and "No such file" in err


def test_syntax_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.tlapo"
    bad.write_text("PROVE (1 +")
    code, _, err = run(["translate", str(bad)], capsys)
    assert code == 2 and "TlaSyntaxError" in err


def test_read_manifest(tmp_path):
    m = tmp_path / "m.tsv"
    m.write_text("file\texpected\n# comment\na.tlapo\tproved\n\nb.tlapo\tnot-proved\n")
    assert read_manifest(m) == {"a.tlapo": "proved", "b.tlapo": "not-proved"}


def _small_corpus(tmp_path, expected_b):
    (tmp_path / "a.tlapo").write_text("PROVE \\A x : (~~x) <=> x\n")
    (tmp_path / "b.tlapo").write_text("PROVE 4 \\in 1 .. 3\n")
    (tmp_path / "manifest.tsv").write_text(
        f"file\texpected\na.tlapo\tproved\nb.tlapo\t{expected_b}\n")


@needs_z3
def test_corpus_matches_manifest(tmp_path, capsys):
    _small_corpus(tmp_path, "not-proved")
    code, out, err = run(["corpus", str(tmp_path), "--expect", "manifest.tsv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out), delimiter="\t"))
    assert rows[0] == ["name", "size", "verdict", "seconds"]
    assert [r[:3] for r in rows[1:]] == [["a.tlapo", "1", "proved"],
                                          ["b.tlapo", "1", "not-proved"]]
    assert "0 mismatches" in err


@needs_z3
def test_corpus_mismatch_exit_code(tmp_path, capsys):
    _small_corpus(tmp_path, "proved")
    code, _, err = run(["corpus", str(tmp_path), "--expect", "manifest.tsv"], capsys)
    assert code == 1
    assert "mismatch: b.tlapo: expected proved, got not-proved" in err
