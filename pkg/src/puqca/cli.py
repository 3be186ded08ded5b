"""``puqca`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 rule/mode
mismatch.  Human-readable numbers use 6 decimals; CSV output uses 17
significant digits and LF line endings.

Rule files are JSON objects with ``"schema": 1``, ``"kind"`` (``"full"`` or
``"fermionic"``) and an ``"angles"`` mapping.  Full rules use the keys
``w0.theta, w0.alpha, w0.gamma, w0.xi`` (optionally ``w0.phi``) and the same
for ``w1``; fermionic rules use ``theta1, xi1, gamma1, theta2, xi2, gamma2``.
Optional ``"label"`` and ``"source"`` strings are kept as metadata.  Instead of
a path, ``table:<family>[:<n>]`` selects a rule from the embedded tables.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import dct, fermion, ga, verify
from . import statevector as sv
from .model import (FermionRule, NotSimulableError, PUQCARule, RuleFormatError,
                    parse_rule, serialize_rule)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3
MAX_SEED = 2 ** 64 - 1


class UsageError(Exception):
    pass


class ModeMismatch(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        try:
            n, t = part.split(":")
            out.append((int(n), int(t)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad size entry {part!r}; expected n:t") from None
    return out


def load_rule(ref: str) -> PUQCARule | FermionRule:
    """Load a rule from a JSON file or from ``table:<family>[:<n>]``."""
    if ref.startswith("table:"):
        parts = ref.split(":")
        tables = verify.load_tables()
        fam = tables.get(parts[1]) if len(parts) > 1 else None
        if fam is None or fam["kind"] == "bound":
            raise UsageError(f"unknown rule table {ref!r}")
        if "rule" in fam:
            angles = fam["rule"]
        else:
            if len(parts) < 3:
                raise UsageError(f"table {parts[1]!r} needs a size, e.g. {ref}:8")
            try:
                angles = next(r["rule"] for r in fam["rows"] if r["n"] == int(parts[2]))
            except (StopIteration, ValueError):
                raise UsageError(f"no rule for {ref!r}") from None
        if fam["kind"] == "full":
            return verify.full_rule(angles)
        return verify.six_angle_rule(angles, "gamma")
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read rule file: {exc}") from None
    try:
        return parse_rule(text)
    except RuleFormatError as exc:
        raise UsageError(f"invalid rule file {ref}: {exc}") from None


def _resolve_mode(rule, use_fermion: bool):
    """Pick the evaluator for a rule, raising ModeMismatch on incompatible pairs."""
    if use_fermion:
        try:
            return fermion.as_fermion_rule(rule)
        except NotSimulableError as exc:
            raise ModeMismatch(f"rule is not in the simulable regime: {exc}") from None
    if isinstance(rule, FermionRule):
        raise ModeMismatch("fermionic rule given; pass --fermion to evaluate it")
    return rule


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _f6(x: float) -> str:
    return f"{x:.6f}"


# --------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    rule = _resolve_mode(load_rule(args.rule), args.fermion)
    try:
        spec = dct.ClassifierSpec(args.n, args.t, args.p, args.delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    start = time.perf_counter()
    kw = {"boundary": args.boundary} if args.fermion else {"method": "dense" if args.dense else "sector"}
    if args.sample:
        if args.fermion:
            raise UsageError("--sample is only available for the qubit evaluator")
        est = dct.sampled_fitness(rule, spec, args.sample, args.seed)
        elapsed = time.perf_counter() - start
        print(f"n={spec.n} t={spec.t} p={spec.p} delta={_f6(spec.delta)}")
        print(f"fitness estimate: {_f6(est.estimate)} +/- {_f6(est.half_width)} "
              f"({est.sample_size} samples, seed {args.seed})")
        print(f"runtime: {elapsed:.3f} s")
        return EXIT_OK
    if args.fermion:
        rep = fermion.fermion_fitness(rule, spec, boundary=args.boundary, cap=args.cap)
    else:
        rep = dct.fitness(rule, spec, cap=args.cap, **kw)
    elapsed = time.perf_counter() - start
    print(f"n={spec.n} t={spec.t} p={spec.p} delta={_f6(spec.delta)}")
    print(f"fitness: {_f6(rep.fitness)}")
    print(f"correct: {rep.correct_count}/{rep.total}  wrong: {rep.wrong_count}  "
          f"undecided: {rep.half_error_count}")
    print(f"runtime: {elapsed:.3f} s")
    if args.misclassified:
        lines = ["configuration"] + rep.misclassified
        _write_text(args.misclassified, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_profile(args) -> int:
    rule = _resolve_mode(load_rule(args.rule), args.fermion)
    try:
        bits = sv.as_bits(args.input)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not bits or len(bits) % 2:
        raise UsageError("input length must be even and positive")
    if args.t < 0:
        raise UsageError("t must be non-negative")
    if args.fermion:
        prof = fermion.profile(rule, bits, args.t, boundary=args.boundary)
    else:
        prof = np.array([sv.sector_evolve(bits, rule, args.t).excitation_probability(p)
                         for p in range(len(bits))])
    buf = io.StringIO()
    buf.write("site,probability\n")
    for p, v in enumerate(prof):
        buf.write(f"{p},{v:.17g}\n")
    _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        if args.sizes:
            objective = ga.MultiSizeObjective(args.sizes, args.p, args.delta,
                                              fermionic=args.fermion, aggregate=args.aggregate,
                                              boundary=args.boundary)
        else:
            if args.n is None or args.t is None:
                raise UsageError("either --n and --t or --sizes is required")
            objective = ga.FitnessObjective(dct.ClassifierSpec(args.n, args.t, args.p, args.delta),
                                            fermionic=args.fermion, boundary=args.boundary)
        cfg = ga.GAConfig(objective, objective.n_genes, args.pop, args.gens, args.pm,
                          args.sigma, args.seed, args.elitism, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def progress(gen, best):
        if args.verbose:
            print(f"generation {gen}: best {_f6(best)}", file=sys.stderr)

    start = time.perf_counter()
    res = ga.evolve_search(cfg, progress)
    elapsed = time.perf_counter() - start
    rule = res.best.rule()
    _write_text(args.out, serialize_rule(rule, label=f"search seed {args.seed}") + "\n")
    hist = ["generation,best_fitness"] + [f"{i},{v:.17g}" for i, v in enumerate(res.history)]
    _write_text(args.history, "\n".join(hist) + "\n")
    print(f"best fitness: {_f6(res.best.fitness)} after {res.generations} generations "
          f"({'solved' if res.solved else 'not solved'})")
    print(f"rule written to {args.out}; history written to {args.history}")
    print(f"runtime: {elapsed:.3f} s")
    return EXIT_OK


def cmd_verify_tables(args) -> int:
    families = args.tables.split(",") if args.tables else None
    try:
        report = verify.verify_tables(families, search=args.conventions == "search",
                                      method="dense" if args.dense else "sector")
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    for fam in report.families:
        status = "PASS" if fam.passed else "FAIL"
        print(f"{status} {fam.family} [{fam.variant}]")
        for r in fam.rows:
            extra = ""
            if r.expected_wrong is not None:
                extra = f" wrong {r.computed_wrong} (expected {r.expected_wrong})"
            mark = "ok " if r.match else "BAD"
            where = f"n={r.n}" + (f" t={r.t}" if r.t is not None else "")
            print(f"  {mark} {where}: expected {_f6(r.expected)} computed {_f6(r.computed)}{extra}")
        if not fam.passed and len(fam.tried) > 1:
            print(f"  no variant matched; tried {len(fam.tried)}: {', '.join(fam.tried)}")
    if args.report:
        _write_text(args.report, verify.report_csv(report))
    print("all tables match" if report.passed else "verification failed")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_bound(args) -> int:
    if args.n <= 0 or args.n % 2:
        raise UsageError("n must be even and positive")
    print(_f6(dct.classical_bound(args.n)))
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    if args.n <= 0 or args.n % 2 or args.n > 12:
        raise UsageError("n must be even, positive and at most 12")
    if args.t < 0 or args.trials < 1:
        raise UsageError("t must be non-negative and trials positive")
    rule = None
    if args.rule:
        rule = _resolve_mode(load_rule(args.rule), True)
    dev = fermion.crosscheck(args.n, args.t, args.trials, args.seed, rule)
    ok = dev <= args.tol
    print(f"max deviation: {dev:.3e} ({'pass' if ok else 'FAIL'}, tolerance {args.tol:.0e})")
    return EXIT_OK if ok else EXIT_VERIFY


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="puqca", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    def task_flags(p, need_nt=True):
        p.add_argument("--n", type=int, required=need_nt)
        p.add_argument("--t", type=int, required=need_nt)
        p.add_argument("--p", type=int, default=1)
        p.add_argument("--delta", type=float, default=0.0)

    def fermion_flags(p):
        p.add_argument("--fermion", action="store_true",
                       help="use the free-fermion evaluator (alpha = phi = 0 rules)")
        p.add_argument("--boundary", choices=fermion.BOUNDARIES, default="periodic",
                       help="wrap-around convention of the fermionic evaluator")

    p = sub.add_parser("eval", help="exact fitness of a rule")
    p.add_argument("--rule", required=True)
    task_flags(p)
    fermion_flags(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--sector-fast", action="store_true",
                      help="weight-sector evaluator (default)")
    mode.add_argument("--dense", action="store_true", help="full 2^n state evaluator")
    p.add_argument("--sample", type=int, default=0, help="estimate from N sampled inputs")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--cap", type=int, default=dct.DEFAULT_MISCLASSIFIED_CAP)
    p.add_argument("--misclassified", help="write misclassified inputs to this CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("profile", help="per-site excitation probabilities as CSV")
    p.add_argument("--rule", required=True)
    p.add_argument("--input", required=True, help="bit string such as 10110000")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--output", help="CSV path (default stdout)")
    fermion_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("search", help="evolutionary search for a classifier")
    task_flags(p, need_nt=False)
    fermion_flags(p)
    p.add_argument("--sizes", type=_sizes, help="multi-size task, e.g. 4:2,6:3,8:4")
    p.add_argument("--aggregate", choices=("mean", "min"), default="mean")
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--gens", type=int, default=100)
    p.add_argument("--pm", type=float, default=0.36)
    p.add_argument("--sigma", type=float, default=0.45)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--elitism", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="best_rule.json")
    p.add_argument("--history", default="history.csv")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify-tables", help="recompute every embedded table")
    p.add_argument("--tables", help="comma-separated families: " + ",".join(verify.FAMILY_NAMES))
    p.add_argument("--conventions", choices=("default", "search"), default="default")
    p.add_argument("--dense", action="store_true", help="audit with the full 2^n evaluator")
    p.add_argument("--report", help="CSV report path ('-' for stdout)")
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("bound", help="closed-form classical fitness bound")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("crosscheck", help="fermionic vs qubit evaluator agreement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rule", help="check one explicit rule instead of random ones")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_crosscheck)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModeMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
