import stat
import sys
import time

import pytest

from tla2smt import translate
from tla2smt.errors import MalformedAnswer, SolverSpawnError
from tla2smt.solver import (NOT_PROVED, PROVED, SOLVER_ERROR, TIMEOUT, UNKNOWN,
                            SolverConfig, classify, run_solver)

from conftest import needs_z3


def fake_solver(tmp_path, body, name="fake"):
    """A stand-in solver: a Python script whose behaviour is ``body``."""
    path = tmp_path / name
    path.write_text(f"#!{sys.executable}\nimport sys, time\n{body}\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def one(text):
    (s,) = translate(text, "t")
    return s


@needs_z3
def test_tautology_is_proved():
    v = run_solver(one("ASSUME NEW p, NEW q PROVE (p => q) \\/ (q => p)"))
    assert v.status == PROVED and v.proved
    assert v.returncode == 0


@needs_z3
def test_untyped_double_negation_is_not_proved():
    v = run_solver(one("PROVE \\A x : (~~x) = x"), SolverConfig(timeout=20))
    assert v.status in (NOT_PROVED, UNKNOWN, TIMEOUT)


def test_missing_executable():
    with pytest.raises(SolverSpawnError):
        run_solver("(check-sat)", SolverConfig(executable="no-such-solver-xyz"))


def test_classify():
    assert classify("unsat\n") == PROVED
    assert classify("sat") == NOT_PROVED
    assert classify("unknown\n") == UNKNOWN
    assert classify("success\nunsat\n\n") == PROVED
    with pytest.raises(MalformedAnswer):
        classify("")
    with pytest.raises(MalformedAnswer):
        classify('(error "line 1")')


def test_timeout_must_be_positive():
    with pytest.raises(ValueError):
        SolverConfig(timeout=0)


def test_timeout_kills_the_solver(tmp_path):
    exe = fake_solver(tmp_path, "time.sleep(60)")
    start = time.monotonic()
    v = run_solver("(check-sat)", SolverConfig(exe, [], timeout=0.5, fallback=None))
    assert v.status == TIMEOUT
    assert time.monotonic() - start < 10


def test_crash_is_a_solver_error(tmp_path):
    exe = fake_solver(tmp_path, "sys.stderr.write('boom'); sys.exit(3)")
    v = run_solver("(check-sat)", SolverConfig(exe, [], timeout=5))
    assert v.status == SOLVER_ERROR and v.returncode == 3 and "boom" in v.stderr


def test_garbage_answer_with_clean_exit(tmp_path):
    exe = fake_solver(tmp_path, "print('maybe')")
    with pytest.raises(MalformedAnswer):
        run_solver("(check-sat)", SolverConfig(exe, [], timeout=5))


def test_unknown_is_never_proved(tmp_path):
    exe = fake_solver(tmp_path, "sys.stdin.read(); print('unknown')")
    v = run_solver("(check-sat)", SolverConfig(exe, ["a"], timeout=5, fallback=["b"]))
    assert v.status == UNKNOWN


def test_fallback_answer_is_used_when_definite(tmp_path):
    exe = fake_solver(tmp_path, "sys.stdin.read()\n"
                                "print('unknown' if sys.argv[1:] == ['first'] else 'unsat')")
    v = run_solver("(check-sat)", SolverConfig(exe, ["first"], timeout=5, fallback=["second"]))
    assert v.status == PROVED


def test_fallback_timeout_keeps_first_answer(tmp_path):
    exe = fake_solver(tmp_path, "sys.stdin.read()\n"
                                "if sys.argv[1:] != ['first']: time.sleep(60)\n"
                                "print('unknown')")
    v = run_solver("(check-sat)", SolverConfig(exe, ["first"], timeout=2, fallback=["x"]))
    assert v.status == UNKNOWN
    assert v.seconds < 10


def test_named_config(monkeypatch, tmp_path):
    cfg = SolverConfig.named("z3", 7)
    assert cfg.timeout == 7 and "-smt2" in cfg.args and cfg.fallback
    assert SolverConfig.named("/opt/cvc5").args == ["--lang=smt2", "-"]
    exe = fake_solver(tmp_path, "sys.stdin.read(); print('sat')", name="mysolver")
    monkeypatch.setenv("TLA2SMT_SOLVER_PATH", exe)
    cfg = SolverConfig.named(None)
    assert cfg.executable == exe
    assert run_solver("(check-sat)", cfg).status == NOT_PROVED
