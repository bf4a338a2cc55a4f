"""Command line interface.

Subcommands:
  solve       run the lambda / eta hierarchies on a problem file
  weingarten  print the exact Weingarten table for given n, d
  mc-check    compare exact vs Monte Carlo trace moments for a word
  eval-state  evaluate the problem's state on a word

Every flag is mirrored by an NCUPPER_<NAME> environment variable; explicit
flags win. Exit codes: 0 success, 2 input error, 3 budget exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .algebra import NCPolynomial, Word
from .errors import NCUpperError, InputError
from .haar import (ConstantAtom, SignatureMatrix, UnitaryAtom,
                   exact_trace_moment, mc_trace_moment, DEFAULT_BUDGET)
from .hierarchy import (DEFAULT_TOL, DEFAULT_WORD_BUDGET, eta_sequence,
                        lambda_sequence)
from .problems import (ProblemFile, parse_problem, parse_word_tokens,
                       serialize_problem)
from .states import evaluate_state
from .symcomb import partitions, weingarten


def _env_default(name: str, cast, fallback=None):
    raw = os.environ.get(f"NCUPPER_{name}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise InputError(f"bad value for NCUPPER_{name}: {raw!r}") from None


def _dims_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad dims list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ncupper",
                                  description="Upper bound hierarchies for "
                                  "noncommutative eigenvalue minimization")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the hierarchies on a problem")
    solve.add_argument("problem")
    solve.add_argument("--order", type=int,
                       default=_env_default("ORDER", int))
    solve.add_argument("--hierarchy", choices=("lambda", "eta", "both"),
                       default=_env_default("HIERARCHY", str))
    solve.add_argument("--dims", type=_dims_list,
                       default=_env_default("DIMS", _dims_list))
    solve.add_argument("--tol", type=float,
                       default=_env_default("TOL", float, DEFAULT_TOL))
    solve.add_argument("--budget", type=int,
                       default=_env_default("BUDGET", int, DEFAULT_BUDGET))
    solve.add_argument("--samples", type=int,
                       default=_env_default("SAMPLES", int, 10 ** 5))
    solve.add_argument("--seed", type=int,
                       default=_env_default("SEED", int, 0))
    solve.add_argument("--threads", type=int,
                       default=_env_default("THREADS", int, 1))
    solve.add_argument("--out", default=_env_default("OUT", str))
    solve.add_argument("--format", choices=("table", "machine"),
                       default=_env_default("FORMAT", str, "table"))

    wg = sub.add_parser("weingarten", help="print the Weingarten table")
    wg.add_argument("--n", type=int, required=True)
    wg.add_argument("--d", type=int, required=True)

    mc = sub.add_parser("mc-check", help="exact vs Monte Carlo for a word")
    mc.add_argument("problem")
    mc.add_argument("word", help="word in problem syntax, e.g. 'b1 b2' or 'u1 u2*'")
    mc.add_argument("--dim", type=int, required=True)
    mc.add_argument("--samples", type=int,
                    default=_env_default("SAMPLES", int, 10 ** 5))
    mc.add_argument("--seed", type=int, default=_env_default("SEED", int, 0))
    mc.add_argument("--budget", type=int,
                    default=_env_default("BUDGET", int, DEFAULT_BUDGET))

    ev = sub.add_parser("eval-state", help="evaluate the state on a word")
    ev.add_argument("problem")
    ev.add_argument("word")
    ev.add_argument("--order", type=int, default=_env_default("ORDER", int))
    ev.add_argument("--dims", type=_dims_list,
                    default=_env_default("DIMS", _dims_list))
    ev.add_argument("--budget", type=int,
                    default=_env_default("BUDGET", int, DEFAULT_BUDGET))
    return top


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def _input_hash(problem: ProblemFile, flags: dict) -> str:
    src = json.dumps({"problem": serialize_problem(problem), "flags": flags},
                     sort_keys=True)
    return hashlib.sha256(src.encode()).hexdigest()


def run_solve(args) -> dict:
    problem = parse_problem(args.problem)
    hierarchy = args.hierarchy or problem.hierarchy
    d_max = args.order if args.order else max(problem.orders)
    if d_max < 1:
        raise InputError("--order must be >= 1")
    family = problem.state_family(args.dims)
    lam_rep = eta_rep = None
    if hierarchy in ("lambda", "both"):
        lam_rep = lambda_sequence(problem.objective, problem.algebra,
                                  problem.subset, family, d_max,
                                  tol=args.tol, budget=args.budget,
                                  threads=args.threads)
    if hierarchy in ("eta", "both"):
        eta_rep = eta_sequence(problem.objective, problem.algebra, family,
                               d_max, tol=args.tol, budget=args.budget)

    flags = {"order": d_max, "hierarchy": hierarchy,
             "dims": args.dims, "tol": args.tol, "budget": args.budget,
             "seed": args.seed}
    record = {
        "tool": "ncupper",
        "version": __version__,
        "input_hash": _input_hash(problem, flags),
        "flags": flags,
        "orders": [],
    }
    timings = {}
    for d in range(1, d_max + 1):
        row: dict = {"d": d}
        t = 0.0
        if lam_rep:
            rec = lam_rep.orders[d - 1]
            row["lambda"] = {
                "value": _sig6(rec.lam),
                "basis_size": rec.basis_size,
                "rank_b": rec.lam_report.rank_b,
                "kernel_residual": _sig6(rec.lam_report.kernel_residual),
                "pencil_digest": rec.pencil_digest,
            }
            t += rec.wall_time
        if eta_rep:
            rec = eta_rep.orders[d - 1]
            row["eta"] = {
                "value": _sig6(rec.eta),
                "basis_size": rec.basis_size,
                "rank_b": rec.eta_report.rank_b,
                "kernel_residual": _sig6(rec.eta_report.kernel_residual),
                "pencil_digest": rec.pencil_digest,
            }
            t += rec.wall_time
        timings[d] = t
        record["orders"].append(row)

    machine = json.dumps(record, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(machine)
    if args.format == "machine":
        sys.stdout.write(machine)
    else:
        _print_table(record, timings)
    return record


def _print_table(record: dict, timings: dict):
    cols = ["order", "lambda", "eta", "time_s"]
    print("  ".join(f"{c:>10}" for c in cols))
    for row in record["orders"]:
        d = row["d"]
        lam = row.get("lambda", {}).get("value", "-")
        eta = row.get("eta", {}).get("value", "-")
        print("  ".join(f"{str(v):>10}" for v in
                        (d, lam, eta, f"{timings[d]:.2f}")))


def run_weingarten(args):
    if args.n < 1 or args.d < 1:
        raise InputError("need --n >= 1 and --d >= 1")
    for mu in partitions(args.n):
        print(f"{mu} -> {weingarten(mu, args.d)}")


def _word_to_trace_atoms(word: Word, problem: ProblemFile, dim: int):
    """Map a word over the problem algebra to trace-word atoms at matrix
    size dim: unitary letters become Haar symbols, hermitian-unitary letters
    expand to conjugated signatures with r = dim // 2."""
    atoms = []
    constants = {}
    for l in word.letters:
        kind = problem.algebra.generator(l.gen).kind
        if kind == "unitary":
            atoms.append(UnitaryAtom(l.gen, l.star))
        elif kind == "hermitian-unitary":
            constants["D"] = SignatureMatrix(dim, dim // 2)
            atoms += [UnitaryAtom(l.gen), ConstantAtom("D"),
                      UnitaryAtom(l.gen, star=True)]
        else:
            raise InputError(f"mc-check does not support kind {kind!r}")
    return atoms, constants


def run_mc_check(args):
    problem = parse_problem(args.problem)
    word = parse_word_tokens(args.word, problem.algebra)
    if word.is_identity:
        raise InputError("mc-check needs a non-identity word")
    atoms, constants = _word_to_trace_atoms(word, problem, args.dim)
    exact = exact_trace_moment(atoms, args.dim, constants, budget=args.budget)
    est, err = mc_trace_moment(atoms, args.dim, constants,
                               samples=args.samples, seed=args.seed)
    dev = abs(float(exact) - est)
    sigmas = dev / err if err > 0 else (0.0 if dev == 0 else float("inf"))
    print(f"word       : {word}")
    print(f"exact      : {exact} = {_sig6(float(exact))}")
    print(f"monte-carlo: {_sig6(est)} +- {_sig6(err)} "
          f"({args.samples} samples, seed {args.seed})")
    print(f"deviation  : {_sig6(dev)} ({_sig6(sigmas)} sigma)")


def run_eval_state(args):
    problem = parse_problem(args.problem)
    word = parse_word_tokens(args.word, problem.algebra)
    d = args.order if args.order else max(problem.orders)
    state = problem.state_family(args.dims)(d)
    value = evaluate_state(state, word, problem.algebra, budget=args.budget)
    print(f"{value} = {_sig6(float(value))}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            run_solve(args)
        elif args.command == "weingarten":
            run_weingarten(args)
        elif args.command == "mc-check":
            run_mc_check(args)
        elif args.command == "eval-state":
            run_eval_state(args)
        return 0
    except NCUpperError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
