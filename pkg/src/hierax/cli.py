"""``hierax`` command line: decide, eliminate symbols, interpolate.

Exit codes: 0 task succeeded, 1 negative verdict, 2 input error,
3 case-split limit reached, 4 oracle disagreement.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .base import decide_ground_sat, finite_order_oracle
from .core import (ARITH_FUNCTIONS, App, DEFAULT_DNF_CAP, DNFLimitError, HieraxError, Num,
                   Verdict, formula_subterms, nnf, neg)
from .interpolation import NotUnsat, compute_interpolant
from .locality import reduce_chain
from .problem import TASKS, ProblemFile, load_problem, parse_terms
from .report import block, render_smtlib, trace_chain
from .symelim import ground_constraint, symbol_eliminate

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT, EXIT_ORACLE = 0, 1, 2, 3, 4


@dataclass
class CliResult:
    code: int
    report: str
    diagnostics: str = ""


class _InputError(HieraxError):
    pass


class _OracleMismatch(HieraxError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hierax", description=__doc__.splitlines()[0])
    p.add_argument("--task", choices=TASKS, help="defaults to the (task ...) form of the file")
    p.add_argument("--trace", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check verdicts by brute-force model enumeration")
    p.add_argument("--smtlib-out", metavar="FILE")
    p.add_argument("--seed-terms", metavar="FILE", help="extra ground instance terms")
    p.add_argument("--dnf-cap", type=int, default=DEFAULT_DNF_CAP, metavar="N",
                   help="largest case split before giving up (exit 3)")
    p.add_argument("problem")
    return p


def run_cli(argv) -> CliResult:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as e:
        return CliResult(EXIT_INPUT if e.code else EXIT_OK, "", "")
    try:
        prob = load_problem(args.problem)
        seeds = list(prob.seed_terms)
        if args.seed_terms:
            with open(args.seed_terms, encoding="utf-8") as fh:
                seeds += parse_terms(fh.read(), prob)
        task = args.task or prob.task
        if task is None:
            raise _InputError("no task given (use --task or a (task ...) form)")
        runner = {"sat": _run_sat, "symelim": _run_symelim, "interpolate": _run_interpolate}[task]
        code, lines, smt = runner(prob, seeds, args)
    except DNFLimitError as e:
        return CliResult(EXIT_LIMIT, "", f"hierax: case-split limit reached: {e}\n")
    except _OracleMismatch as e:
        return CliResult(EXIT_ORACLE, "", f"hierax: ORACLE DISAGREEMENT: {e}\n")
    except (HieraxError, ValueError, OSError) as e:
        return CliResult(EXIT_INPUT, "", f"hierax: {type(e).__name__}: {e}\n")
    if args.smtlib_out and smt is not None:
        with open(args.smtlib_out, "w", encoding="utf-8") as fh:
            fh.write(smt)
    return CliResult(code, "\n".join(lines) + "\n")


def main(argv=None) -> int:
    res = run_cli(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.report if res.report != "\n" else "")
    sys.stderr.write(res.diagnostics)
    return res.code


# --------------------------------------------------------------------------
# tasks


def _oracle_check(base, items, expected: Verdict, what: str) -> str:
    fs = list(items)
    for f in fs:
        for s in formula_subterms(f.to_formula() if hasattr(f, "to_formula") else f):
            if isinstance(s, Num) or (isinstance(s, App) and s.fn in ARITH_FUNCTIONS):
                return f"; oracle: skipped for {what} (arithmetic terms)"
    got = finite_order_oracle(fs)
    if got is not expected:
        raise _OracleMismatch(f"{what}: engine says {expected}, enumeration says {got}")
    return f"; oracle: {what} {got} (agrees)"


def _run_sat(prob: ProblemFile, seeds, args):
    spec = prob.spec
    G = prob.goal + prob.goal_a + prob.goal_b
    if not G:
        raise _InputError("sat task needs at least one (goal ...)")
    reduced, steps = reduce_chain(spec, G, seeds)
    verdict = decide_ground_sat(spec.base, reduced, cap=args.dnf_cap)
    lines = trace_chain(steps, reduced, args.trace) if args.trace else []
    if args.oracle:
        lines.append(_oracle_check(spec.base, reduced, verdict, "base problem"))
    expected = prob.expect or Verdict.UNSAT
    lines.append(str(verdict))
    code = EXIT_OK if verdict is expected else EXIT_NEGATIVE
    smt = render_smtlib(G, spec.base, "goal") if args.smtlib_out else None
    return code, lines, smt


def _run_symelim(prob: ProblemFile, seeds, args):
    spec = prob.spec
    if not prob.goal:
        raise _InputError("symelim task needs at least one (goal ...)")
    if not spec.params:
        raise _InputError("symelim task needs a (params ...) declaration")
    res = symbol_eliminate(spec, prob.goal, seeds, cap=args.dnf_cap)
    lines = []
    if args.trace:
        lines += trace_chain(res.steps, res.reduced, args.trace)
        p = res.partition
        lines.append("; kept as parameter terms: " + " ".join(map(str, p.c_f)))
        lines.append("; parameter arguments: " + " ".join(map(str, p.c_p)))
        lines.append("; eliminated: " + " ".join(map(str, p.c_rest)))
        if res.kept_fresh:
            lines.append("; fresh argument constants generalized without expansion: "
                         + " ".join(map(str, res.kept_fresh)))
        expanded = [c for c in p.c_p if c.name.startswith("#") and c not in res.kept_fresh]
        if expanded:
            lines.append("; fresh argument constants expanded before generalization: "
                         + " ".join(map(str, expanded)))
        if args.trace >= 2:
            lines += block("existential", [res.existential])
            lines += block("gamma1-raw", [res.gamma1_raw])
        lines += block("gamma1", [res.gamma1])
        if args.trace >= 2:
            lines += block("gamma2-raw", [res.gamma2_raw])
        lines += block("gamma2", [res.gamma2])
    if res.qe_theory is not spec.base:
        lines.append(f"; note: quantifier elimination ran in {res.qe_theory.value}, the model completion "
                     f"of {spec.base.value}; the constraint rules out the goal but need not be the weakest")
    elif args.trace:
        lines.append(f"; quantifier elimination in {res.qe_theory.value}")
    if args.oracle:
        insts = ground_constraint(res)
        reduced, _ = reduce_chain(spec, prob.goal + insts)
        verdict = decide_ground_sat(spec.base, reduced)
        if verdict is not Verdict.UNSAT:
            raise _OracleMismatch("goal plus constraint instances is not unsat")
        lines.append(_oracle_check(spec.base, reduced, verdict, "goal with constraint"))
    lines.append(str(res.constraint))
    smt = render_smtlib([res.constraint], spec.base, "parameter constraint") if args.smtlib_out else None
    return EXIT_OK, lines, smt


def _run_interpolate(prob: ProblemFile, seeds, args):
    spec = prob.spec
    if not prob.goal_a or not prob.goal_b:
        raise _InputError("interpolate task needs (goalA ...) and (goalB ...)")
    try:
        rep = compute_interpolant(spec, prob.goal_a, prob.goal_b, prob.closure,
                                  params=spec.params or None, cap=args.dnf_cap)
    except NotUnsat as e:
        return EXIT_NEGATIVE, [f"SAT ; {e}"], None
    lines = []
    if args.trace:
        lines += block("side-a", rep.side_a)
        lines += block("side-b", rep.side_b)
        lines += trace_chain(rep.steps, rep.reduced, args.trace)
        p = rep.partition
        lines.append("; shared functions: " + " ".join(rep.shared_functions))
        lines.append("; shared constants: " + " ".join(map(str, rep.shared_constants)))
        lines.append("; kept as shared terms: " + " ".join(map(str, p.c_f)))
        lines.append("; eliminated: " + " ".join(map(str, p.c_rest)))
        if args.trace >= 2:
            lines += block("interpolant-raw", [rep.raw])
    if args.trace:
        lines.append(f"; quantifier elimination in {rep.qe_theory.value}")
    for n in rep.notes:
        lines.append(f"; note: {n}")
    if args.oracle:
        A, B, I = prob.goal_a, prob.goal_b, rep.interpolant
        for what, items in (("A and not I", A + [nnf(neg(I))]), ("B and I", B + [I])):
            reduced, _ = reduce_chain(spec, items)
            lines.append(_oracle_check(spec.base, reduced, decide_ground_sat(spec.base, reduced), what))
    lines.append(str(rep.interpolant))
    ok = lambda b: "PASS" if b else "FAIL"  # noqa: E731
    lines.append(f"; verification: A and not I unsat {ok(rep.a_entails_i)}, "
                 f"B and I unsat {ok(rep.b_and_i_unsat)}, shared symbols {ok(rep.audit_ok)}")
    for a in rep.audit:
        lines.append(f"; audit: {a}")
    smt = render_smtlib([rep.interpolant], spec.base, "interpolant") if args.smtlib_out else None
    return (EXIT_OK if rep.verified else EXIT_NEGATIVE), lines, smt


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
