"""Text renderings: reduction traces and SMT-LIB-style assertions.

Every non-comment line of a trace is a form in the problem-file grammar,
so intermediate sets can be fed back to the parser.
"""
from __future__ import annotations

from fractions import Fraction

from .base import BaseTheory
from .core import (And, App, Atom, Bool, Clause, Const, Formula, Implies, Not,
                   Num, Or, Quant, Term, Var, clause_sexpr, formula_subterms)
from .locality import PurificationResult
from .problem import problem_scope
from .sexpr import SList, read_all


BLOCKS = ("instance-terms", "instances", "defs", "arg-defs", "k0", "g0", "con0",
          "base-set", "side-a", "side-b", "existential", "gamma1-raw", "gamma1",
          "gamma2-raw", "gamma2", "interpolant-raw")


def _item(x) -> str:
    return clause_sexpr(x) if isinstance(x, Clause) else str(x)


def block(name: str, items, notes: dict | None = None) -> list[str]:
    """``(name item...)`` with one item per line; ``notes`` adds trailing comments."""
    items = list(items)
    if not items:
        return [f"({name})"]
    lines = [f"({name}"]
    for i, x in enumerate(items):
        tail = f" ; {notes[i]}" if notes and i in notes else ""
        lines.append(f"  {_item(x)}{tail}")
    lines.append(")")
    return lines


def trace_step(res: PurificationResult, detail: int) -> list[str]:
    """One reduction step: instances, definitions and congruence instances.

    At ``detail >= 2`` the purified axiom and goal parts are added.
    """
    out = [f"; reduction of level {res.level}"]
    if detail >= 2:
        out += block("instance-terms", res.instance_terms)
    out += block("instances", res.instances)
    out += block("defs", [Atom("=", c, t) for c, t in res.defs.items()])
    if res.arg_defs:
        out.append("; non-constant arguments were named before purification")
        out += block("arg-defs", [Atom("=", c, t) for c, t in res.arg_defs.items()])
    if detail >= 2:
        out += block("k0", res.k0)
        out += block("g0", res.g0)
    notes = {i: "trivial" for i, t in enumerate(res.con0_trivial) if t}
    out += block("con0", res.con0, notes)
    return out


def trace_chain(steps, reduced, detail: int) -> list[str]:
    out = []
    for res in steps:
        out += trace_step(res, detail)
    if detail >= 2:
        out.append("; base problem")
        out += block("base-set", reduced)
    return out


# --------------------------------------------------------------------------
# SMT-LIB


def _smt_name(name: str) -> str:
    ok = all(ch.isalnum() or ch in "_.!$%&*+-/<=>?@^~" for ch in name) and not name[0].isdigit()
    return name if ok else f"|{name}|"


def _smt_num(v: Fraction) -> str:
    def mag(x: Fraction) -> str:
        if x.denominator == 1:
            return f"{x.numerator}.0"
        return f"(/ {x.numerator}.0 {x.denominator}.0)"
    return mag(v) if v >= 0 else f"(- {mag(-v)})"


def smt_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return _smt_name(t.name)
    if isinstance(t, Num):
        return _smt_num(t.value)
    return "(" + " ".join([_smt_name(t.fn)] + [smt_term(a) for a in t.args]) + ")"


def smt_formula(f: Formula, sort: str) -> str:
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"({f.pred} {smt_term(f.lhs)} {smt_term(f.rhs)})"
    if isinstance(f, Not):
        return f"(not {smt_formula(f.arg, sort)})"
    if isinstance(f, (And, Or)):
        if not f.args:
            return "true" if isinstance(f, And) else "false"
        op = "and" if isinstance(f, And) else "or"
        return f"({op} " + " ".join(smt_formula(a, sort) for a in f.args) + ")"
    if isinstance(f, Implies):
        return f"(=> {smt_formula(f.lhs, sort)} {smt_formula(f.rhs, sort)})"
    if isinstance(f, Quant):
        vs = " ".join(f"({_smt_name(v.name)} {sort})" for v in f.vars)
        return f"({f.kind} ({vs}) {smt_formula(f.body, sort)})"
    raise TypeError(f"cannot render {f!r}")


def render_smtlib(formulas, base: BaseTheory, comment: str = "") -> str:
    """Declarations for every symbol used, then one ``assert`` per formula."""
    formulas = [f.to_formula() if isinstance(f, Clause) else f for f in formulas]
    eq_only = base.family == "equality"
    sort = "U" if eq_only else "Real"
    fns: dict[str, int] = {}
    consts = set()
    for f in formulas:
        for s in formula_subterms(f):
            if isinstance(s, App) and not (base.arithmetic and s.fn in ("+", "-", "*")):
                fns[s.fn] = len(s.args)
            elif isinstance(s, Const):
                consts.add(s.name)
    lines = [f"; {comment}"] if comment else []
    lines.append("(set-logic UFLRA)" if not eq_only else "(set-logic UF)")
    if eq_only:
        lines.append("(declare-sort U 0)")
    for name in sorted(consts):
        lines.append(f"(declare-fun {_smt_name(name)} () {sort})")
    for name in sorted(fns):
        args = " ".join([sort] * fns[name])
        lines.append(f"(declare-fun {_smt_name(name)} ({args}) {sort})")
    for f in formulas:
        lines.append(f"(assert {smt_formula(f, sort)})")
    return "\n".join(lines) + "\n"


def read_trace(text: str, problem) -> dict[str, list[Formula]]:
    """Parse the blocks of a trace back into formulas, keyed by block name.

    Blocks that occur more than once (one per level) are concatenated;
    the result line and other forms are skipped.
    """
    scope = problem_scope(problem)
    out: dict[str, list[Formula]] = {}
    for node in read_all(text):
        if isinstance(node, SList) and node.head() in BLOCKS:
            items = out.setdefault(node.head(), [])
            for item in node.items[1:]:
                if node.head() == "instance-terms":
                    items.append(scope.term(item, set(), free_is_var=False))
                else:
                    items.append(scope.formula(item))
    return out
