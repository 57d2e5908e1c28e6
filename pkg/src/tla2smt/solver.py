"""Running an external SMT solver on an emitted script."""
from __future__ import annotations

import os
import shutil
import signal
import subprocess
import time
from dataclasses import dataclass, field

from .errors import MalformedAnswer, SolverSpawnError

PROVED, NOT_PROVED, UNKNOWN, TIMEOUT, SOLVER_ERROR = (
    "proved", "not-proved", "unknown", "timeout", "solver-error")

ANSWERS = {"unsat": PROVED, "sat": NOT_PROVED, "unknown": UNKNOWN}

# argument templates for solvers that read a script from stdin
KNOWN_SOLVERS = {
    # auto_config re-enables MBQI, which never gives up on the infinite
    # models that the integer embedding forces
    "z3": ["-in", "-smt2", "smt.auto_config=false", "smt.mbqi=false"],
    "cvc5": ["--lang=smt2", "-"],
    "cvc4": ["--lang=smt2", "-"],
}

# second attempt after an "unknown": model-based instantiation finds
# instances that no trigger covers, but may run until the deadline
FALLBACK_ARGS = {
    "z3": ["-in", "-smt2", "smt.auto_config=false", "smt.mbqi=true"],
}
FALLBACK_SHARE = 0.25


@dataclass
class SolverConfig:
    executable: str = "z3"
    args: list = field(default_factory=lambda: list(KNOWN_SOLVERS["z3"]))
    timeout: float = 60.0
    answers: dict = field(default_factory=lambda: dict(ANSWERS))
    fallback: list | None = field(default_factory=lambda: list(FALLBACK_ARGS["z3"]))
    fallback_share: float = FALLBACK_SHARE

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def named(cls, name: str | None = None, timeout: float = 60.0) -> "SolverConfig":
        """Config for a solver given by name or path.

        Falls back to $TLA2SMT_SOLVER_PATH, then to z3.
        """
        name = name or os.environ.get("TLA2SMT_SOLVER_PATH") or "z3"
        base = os.path.basename(name)
        kind = next((k for k in KNOWN_SOLVERS if base.startswith(k)), "z3")
        fb = FALLBACK_ARGS.get(kind)
        return cls(name, list(KNOWN_SOLVERS[kind]), timeout,
                   fallback=list(fb) if fb else None)


@dataclass
class Verdict:
    status: str
    seconds: float
    output: str = ""
    stderr: str = ""
    returncode: int | None = None

    @property
    def proved(self) -> bool:
        return self.status == PROVED


def _resolve(executable: str) -> str:
    path = shutil.which(executable)
    if path is None:
        env = os.environ.get("TLA2SMT_SOLVER_PATH")
        if env and shutil.which(env):
            return shutil.which(env)
        raise SolverSpawnError(f"solver executable not found: {executable}")
    return path


def classify(stdout: str, answers: dict = ANSWERS) -> str:
    lines = [ln.strip() for ln in stdout.splitlines() if ln.strip()]
    if not lines:
        raise MalformedAnswer("solver produced no answer")
    token = lines[-1].split()[0]
    if token not in answers:
        raise MalformedAnswer(f"unexpected solver answer {lines[-1]!r}")
    return answers[token]


def run_solver(script, cfg: SolverConfig | None = None) -> Verdict:
    """Run the solver; retry an "unknown" once with the fallback arguments.

    The retry gets ``fallback_share`` of the timeout.  Its answer is used
    only if it is definite, so a theorem is never lost by the retry.
    """
    cfg = cfg or SolverConfig()
    text = script if isinstance(script, str) else script.text()
    exe = _resolve(cfg.executable)
    first = _run_once(exe, cfg.args, text, cfg.timeout, cfg.answers)
    if first.status != UNKNOWN or not cfg.fallback:
        return first
    budget = min(cfg.timeout - first.seconds, cfg.timeout * cfg.fallback_share)
    if budget <= 0:
        return first
    second = _run_once(exe, cfg.fallback, text, budget, cfg.answers)
    total = first.seconds + second.seconds
    if second.status in (PROVED, NOT_PROVED):
        return Verdict(second.status, total, second.output, second.stderr, second.returncode)
    return Verdict(first.status, total, first.output, first.stderr, first.returncode)


def _run_once(exe, args, text, timeout, answers) -> Verdict:
    start = time.monotonic()
    try:
        proc = subprocess.Popen([exe, *args], stdin=subprocess.PIPE,
                                stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                text=True, start_new_session=True)
    except OSError as ex:
        raise SolverSpawnError(f"cannot start {exe}: {ex}") from ex
    try:
        out, err = proc.communicate(text, timeout=timeout)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, err = proc.communicate()
        return Verdict(TIMEOUT, time.monotonic() - start, out, err, proc.returncode)
    elapsed = time.monotonic() - start
    try:
        status = classify(out, answers)
    except MalformedAnswer:
        # a crash is an outcome, not a protocol violation
        if proc.returncode != 0:
            return Verdict(SOLVER_ERROR, elapsed, out, err, proc.returncode)
        raise
    return Verdict(status, elapsed, out, err, proc.returncode)
