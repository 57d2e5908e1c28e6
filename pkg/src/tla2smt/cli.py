"""Command-line entry point: translate, prove, trace and corpus runs."""
from __future__ import annotations

import argparse
import csv
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import TranslationError
from .parser import parse_file
from .preprocess import PipelineState, preprocess
from .abstract import NameSupply
from .printer import pretty_obligation
from .smt import emit
from .solver import PROVED, NOT_PROVED, SolverConfig, run_solver

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _stage_filter(spec: str | None):
    if not spec:
        return None
    if spec == "all":
        return lambda stage: True
    if spec == "reduce":
        return lambda stage: stage.startswith("reduce")
    if re.fullmatch(r"boolify|final|reduce\d+", spec):
        return lambda stage: stage == spec
    raise argparse.ArgumentTypeError(f"unknown stage {spec!r}")


def _load(path: str):
    p = Path(path)
    return parse_file(p.read_text(encoding="utf-8"), p.stem)


def translate_obligation(ob, args, out=None):
    """Preprocess and emit one obligation, honouring the dump and trace flags."""
    out = out or sys.stderr
    want = _stage_filter(getattr(args, "dump_stage", None))
    state = PipelineState(NameSupply())
    if getattr(args, "trace", False):
        state.trace = []

    def dump(stage, o):
        if want and want(stage):
            print(f"---- {o.name} [{stage}]", file=out)
            print(pretty_obligation(o), file=out)

    basic = preprocess(ob, dump=dump, state=state)
    if state.trace is not None:
        for step in state.trace:
            print(step, file=out)
    return emit(basic, logic=args.logic, inline_int=args.inline_int)


def cmd_translate(args) -> int:
    scripts = [translate_obligation(ob, args).text() for ob in _load(args.file)]
    text = "(reset)\n".join(scripts)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _prove_one(ob, args, cfg):
    script = translate_obligation(ob, args)
    return run_solver(script, cfg)


def _config(args) -> SolverConfig:
    return SolverConfig.named(args.solver, args.timeout)


def cmd_prove(args) -> int:
    obs = _load(args.file)
    cfg = _config(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        verdicts = list(pool.map(lambda ob: _prove_one(ob, args, cfg), obs))
    if len(obs) == 1:
        print(verdicts[0].status)
    else:
        for ob, v in zip(obs, verdicts):
            print(f"{ob.name}\t{v.status}\t{v.seconds:.2f}")
    return EXIT_OK


def cmd_trace(args) -> int:
    args.trace = True
    for ob in _load(args.file):
        print(f"---- {ob.name}")
        translate_obligation(ob, args, out=sys.stdout)
    return EXIT_OK


def read_manifest(path: Path) -> dict:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if not row or row[0].startswith("#"):
                continue
            if row[0] == "file" and len(row) > 1 and row[1] == "expected":
                continue
            out[row[0]] = row[1]
    return out


def run_file(path: Path, args, cfg) -> tuple[int, str, float]:
    """(number of obligations, verdict, seconds) for one corpus file.

    A file is proved when every obligation in it is proved.  Any other
    solver outcome counts as not proved.
    """
    start = time.monotonic()
    try:
        obs = _load(str(path))
        statuses = [_prove_one(ob, args, cfg).status for ob in obs]
    except TranslationError as ex:
        print(f"{path.name}: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 0, "error", time.monotonic() - start
    verdict = PROVED if all(s == PROVED for s in statuses) else NOT_PROVED
    return len(obs), verdict, time.monotonic() - start


def cmd_corpus(args) -> int:
    root = Path(args.dir)
    manifest = Path(args.expect)
    if not manifest.exists() and (root / manifest).exists():
        manifest = root / manifest
    expected = read_manifest(manifest)
    files = sorted(root.glob("*.tlapo"))
    cfg = _config(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda p: run_file(p, args, cfg), files))
    print("name\tsize\tverdict\tseconds")
    mismatches = []
    total = 0.0
    for path, (size, verdict, secs) in zip(files, results):
        total += secs
        print(f"{path.name}\t{size}\t{verdict}\t{secs:.2f}")
        if expected.get(path.name) != verdict:
            mismatches.append((path.name, expected.get(path.name), verdict))
    missing = sorted(set(expected) - {p.name for p in files})
    for name in missing:
        mismatches.append((name, expected[name], "missing"))
    for name, want, got in mismatches:
        print(f"mismatch: {name}: expected {want}, got {got}", file=sys.stderr)
    proved = sum(1 for _, v, _ in results if v == PROVED)
    print(f"{len(files)} files, {proved} proved, {len(mismatches)} mismatches, "
          f"{total:.1f}s", file=sys.stderr)
    return EXIT_MISMATCH if mismatches else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tla2smt",
        description="Translate set-theoretic proof obligations to SMT-LIB and prove them.")
    sub = ap.add_subparsers(dest="command", required=True)

    def pipeline_flags(p):
        p.add_argument("--logic", default=None,
                       help="emit (set-logic LOGIC), e.g. UFNIA; default: none")
        p.add_argument("--inline-int", action="store_true",
                       help="expand x \\in Int to an integer existential")
        p.add_argument("--dump-stage", default=None, type=str,
                       help="print the obligation after a stage: boolify, reduceN, "
                            "reduce, final or all (to stderr)")
        p.add_argument("--trace", action="store_true",
                       help="print every rewrite step (to stderr)")

    def solver_flags(p):
        p.add_argument("--solver", default=None,
                       help="solver executable (default: $TLA2SMT_SOLVER_PATH or z3)")
        p.add_argument("--timeout", type=float, default=60.0,
                       help="seconds per obligation (default: 60)")
        p.add_argument("--jobs", type=int, default=1, help="parallel solver runs")

    p = sub.add_parser("translate", help="emit SMT-LIB for every obligation in FILE")
    p.add_argument("file")
    p.add_argument("--out", "-o", default=None, help="write to this file instead of stdout")
    pipeline_flags(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("prove", help="translate FILE and run the solver")
    p.add_argument("file")
    pipeline_flags(p)
    solver_flags(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("trace", help="print the rewrite trace for FILE")
    p.add_argument("file")
    pipeline_flags(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("corpus", help="prove every .tlapo in DIR and compare with a manifest")
    p.add_argument("dir")
    p.add_argument("--expect", required=True, help="TSV manifest: file, expected verdict")
    pipeline_flags(p)
    solver_flags(p)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.dump_stage:
        try:
            _stage_filter(args.dump_stage)
        except argparse.ArgumentTypeError as ex:
            ap.error(str(ex))
    if getattr(args, "timeout", 1) <= 0:
        ap.error("--timeout must be positive")
    try:
        return args.func(args)
    except (TranslationError, OSError) as ex:
        print(f"tla2smt: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
