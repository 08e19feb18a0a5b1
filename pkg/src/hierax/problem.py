"""Problem files: parsing, symbol resolution and canonical rendering.

Grammar (prefix syntax, ``;`` comments)::

    (base DLO|TOrd|LRA|EQ)
    (level n (functions (f 1) (c 0) ...) (axioms <formula> ...))
    (params name ...)
    (closure shared-constants (f ...) [(const ...)]) | (closure subterm-only)
    (seed-terms <term> ...)
    (task sat|symelim|interpolate)
    (expect sat|unsat)
    (goal <formula>)  (goalA <formula>)  (goalB <formula>)

Undeclared identifiers are variables inside axioms and free constants
everywhere else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import re

from .base import BaseTheory
from .core import (ARITH_FUNCTIONS, And, App, Atom, Const, Formula,
                   HieraxError, Implies, Not, Num, Or, Quant, Term, Var,
                   Verdict, FALSE, TRUE, clause_sexpr, clauses_of,
                   is_quantifier_free)
from .interpolation import SharedConstants, SubtermOnly
from .locality import Level, LevelViolation, SpecError, TheorySpec
from .sexpr import ProblemSyntaxError, SList, Symbol, read_all


class UnknownSymbol(HieraxError):
    pass


class ArityMismatch(HieraxError):
    pass


TASKS = ("sat", "symelim", "interpolate")
BASES = {"DLO": BaseTheory.DLO, "TOrd": BaseTheory.TORD, "LRA": BaseTheory.LRA, "EQ": BaseTheory.EQ}
_BASE_NAMES = {v: k for k, v in BASES.items()}
_NUMERAL = re.compile(r"^-?\d+(/\d+)?$")
_CONNECTIVES = {"and", "or", "=>", "not", "forall", "exists", "true", "false"}
_PREDS = {"<=", "<", "=", ">=", ">", "distinct"}


def _where(node) -> tuple[int, int]:
    return node.line, node.col


def _located(exc_type, msg, node):
    line, col = _where(node)
    if exc_type is ProblemSyntaxError:
        return ProblemSyntaxError(msg, line, col)
    return exc_type(f"{line}:{col}: {msg}")


@dataclass
class ProblemFile:
    spec: TheorySpec
    task: str | None = None
    goal: list = field(default_factory=list)
    goal_a: list = field(default_factory=list)
    goal_b: list = field(default_factory=list)
    closure: object = None
    seed_terms: list = field(default_factory=list)
    expect: Verdict | None = None

    def key(self) -> tuple:
        """Structural identity; two problems with equal keys are the same problem."""
        s = self.spec
        levels = tuple((tuple(sorted(l.functions.items())), tuple(l.axioms)) for l in s.levels)
        return (s.base, levels, tuple(sorted(s.params)), self.task, tuple(self.goal),
                tuple(self.goal_a), tuple(self.goal_b), self.closure,
                tuple(self.seed_terms), self.expect)

    def __eq__(self, other):
        return isinstance(other, ProblemFile) and self.key() == other.key()


class Scope:
    """Symbol table for resolving identifiers of one problem."""

    def __init__(self, base: BaseTheory, functions: dict):
        self.base = base
        self.functions = dict(functions)  # name -> (arity, level)

    def term(self, node, bound: set, free_is_var: bool) -> Term:
        if isinstance(node, Symbol):
            name = node.text
            if _NUMERAL.match(name):
                if not self.base.arithmetic:
                    raise _located(ProblemSyntaxError, f"numeral {name} outside LRA", node)
                return Num(Fraction(name))
            if name in _CONNECTIVES or name in _PREDS:
                raise _located(ProblemSyntaxError, f"{name!r} is not a term", node)
            if name in bound:
                return Var(name)
            if name in self.functions:
                arity = self.functions[name][0]
                if arity:
                    raise _located(ArityMismatch, f"{name} expects {arity} argument(s), got 0", node)
                return Const(name)
            return Var(name) if free_is_var else Const(name)
        if not len(node) or not isinstance(node[0], Symbol):
            raise _located(ProblemSyntaxError, "expected a function application", node)
        fn = node.head()
        args = [self.term(a, bound, free_is_var) for a in node.items[1:]]
        if fn in ARITH_FUNCTIONS and self.base.arithmetic:
            want = ARITH_FUNCTIONS[fn]
            if (want >= 0 and len(args) != want) or not args:
                raise _located(ArityMismatch, f"{fn} expects {want} argument(s), got {len(args)}", node)
            return App(fn, args)
        if fn not in self.functions:
            raise _located(UnknownSymbol, f"undeclared function {fn!r}", node)
        arity = self.functions[fn][0]
        if arity != len(args):
            raise _located(ArityMismatch, f"{fn} expects {arity} argument(s), got {len(args)}", node)
        return App(fn, args)

    def formula(self, node, bound: set = frozenset(), free_is_var: bool = False) -> Formula:
        if isinstance(node, Symbol):
            if node.text == "true":
                return TRUE
            if node.text == "false":
                return FALSE
            raise _located(ProblemSyntaxError, f"expected a formula, got {node.text!r}", node)
        head = node.head()
        if head is None:
            raise _located(ProblemSyntaxError, "expected a formula", node)
        rest = node.items[1:]
        sub = lambda n: self.formula(n, bound, free_is_var)  # noqa: E731
        if head in ("and", "or"):
            args = tuple(sub(a) for a in rest)
            if len(args) < 2:
                return args[0] if args else (TRUE if head == "and" else FALSE)
            return And(args) if head == "and" else Or(args)
        if head == "not":
            _need(node, 1)
            return Not(sub(rest[0]))
        if head == "=>":
            _need(node, 2)
            return Implies(sub(rest[0]), sub(rest[1]))
        if head in ("forall", "exists"):
            _need(node, 2)
            if not isinstance(rest[0], SList) or not all(isinstance(v, Symbol) for v in rest[0]):
                raise _located(ProblemSyntaxError, "expected a variable list", rest[0])
            names = [v.text for v in rest[0]]
            for v in rest[0]:
                if v.text in self.functions:
                    raise _located(ProblemSyntaxError, f"cannot bind declared symbol {v.text!r}", v)
            body = self.formula(rest[1], set(bound) | set(names), free_is_var)
            return Quant(head, tuple(Var(n) for n in names), body)
        if head in _PREDS:
            ts = [self.term(a, bound, free_is_var) for a in rest]
            if head == "distinct":
                if len(ts) < 2:
                    raise _located(ArityMismatch, "distinct needs at least 2 arguments", node)
                lits = tuple(Not(Atom("=", a, b)) for i, a in enumerate(ts) for b in ts[i + 1:])
                return lits[0] if len(lits) == 1 else And(lits)
            if len(ts) != 2:
                raise _located(ArityMismatch, f"{head} expects 2 arguments, got {len(ts)}", node)
            if head in ("<=", "<", ">=", ">") and self.base.family == "equality":
                raise _located(UnknownSymbol, f"predicate {head} is not in {self.base.value}", node)
            if head == ">=":
                return Atom("<=", ts[1], ts[0])
            if head == ">":
                return Atom("<", ts[1], ts[0])
            return Atom(head, ts[0], ts[1])
        if head in self.functions:
            raise _located(ProblemSyntaxError, f"function {head!r} used as a formula", node)
        raise _located(UnknownSymbol, f"unknown predicate or connective {head!r}", node)


def _need(node: SList, n: int):
    if len(node) - 1 != n:
        raise _located(ArityMismatch, f"{node.head()} expects {n} argument(s), got {len(node) - 1}", node)


def _symbols_of(node: SList, what: str) -> list[str]:
    out = []
    for s in node.items[1:]:
        if not isinstance(s, Symbol):
            raise _located(ProblemSyntaxError, f"expected a {what} name", s)
        out.append(s.text)
    return out


def parse_problem(text: str) -> ProblemFile:
    forms = read_all(text)
    if not forms:
        raise ProblemSyntaxError("empty problem file", 1, 1)
    base = None
    decls: dict[int, tuple[SList, dict, list]] = {}
    params: list[str] = []
    rest: list[SList] = []
    for f in forms:
        if not isinstance(f, SList) or f.head() is None:
            raise _located(ProblemSyntaxError, "expected a top-level form", f)
        head = f.head()
        if head == "base":
            if len(f) != 2 or not isinstance(f[1], Symbol) or f[1].text not in BASES:
                raise _located(ProblemSyntaxError, f"base must be one of {', '.join(BASES)}", f)
            if base is not None:
                raise _located(ProblemSyntaxError, "duplicate base declaration", f)
            base = BASES[f[1].text]
        elif head == "level":
            n = _level_number(f)
            if n in decls:
                raise _located(ProblemSyntaxError, f"level {n} declared twice", f)
            decls[n] = (f,) + _level_parts(f)
        elif head == "params":
            params.extend(_symbols_of(f, "parameter"))
        elif head in ("closure", "seed-terms", "task", "expect", "goal", "goalA", "goalB"):
            rest.append(f)
        else:
            raise _located(ProblemSyntaxError, f"unknown top-level form {head!r}", f)
    if base is None:
        raise ProblemSyntaxError("missing (base ...) declaration", 1, 1)
    if sorted(decls) != list(range(1, len(decls) + 1)):
        raise ProblemSyntaxError(f"levels must be numbered 1..n, got {sorted(decls)}", 1, 1)

    functions: dict[str, tuple[int, int]] = {}
    for n in sorted(decls):
        node, fdecl, _ = decls[n]
        for name, (arity, where) in fdecl.items():
            if name in functions:
                raise _located(ProblemSyntaxError, f"{name!r} declared twice", where)
            if name in _CONNECTIVES or name in _PREDS or (base.arithmetic and name in ARITH_FUNCTIONS):
                raise _located(ProblemSyntaxError, f"{name!r} is reserved", where)
            functions[name] = (arity, n)
    for p in params:
        if p not in functions:
            raise UnknownSymbol(f"parameter {p!r} is not a declared extension symbol")
    scope = Scope(base, functions)

    levels = [Level({k: a for k, (a, _) in decls[n][1].items()}, []) for n in sorted(decls)]
    skeleton = TheorySpec(base, levels, frozenset(params))
    for n in sorted(decls):
        for ax in decls[n][2]:
            phi = scope.formula(ax, free_is_var=True)
            for c in clauses_of(phi):
                try:
                    skeleton._check_clause(n, c)
                except LevelViolation as e:
                    raise _located(LevelViolation, str(e), ax) from None
                except SpecError as e:
                    raise _located(SpecError, str(e), ax) from None
                levels[n - 1].axioms.append(c)
    spec = TheorySpec(base, levels, frozenset(params))

    prob = ProblemFile(spec)
    for f in rest:
        head = f.head()
        if head == "task":
            prob.task = _choice(f, TASKS)
        elif head == "expect":
            prob.expect = Verdict(_choice(f, ("sat", "unsat")))
        elif head == "closure":
            prob.closure = _closure(f, functions)
        elif head == "seed-terms":
            prob.seed_terms.extend(_ground_term(scope, t) for t in f.items[1:])
        else:
            if len(f) != 2:
                raise _located(ArityMismatch, f"{head} takes one formula", f)
            phi = scope.formula(f[1])
            if not is_quantifier_free(phi):
                raise _located(ProblemSyntaxError, f"{head} must be quantifier-free", f[1])
            {"goal": prob.goal, "goalA": prob.goal_a, "goalB": prob.goal_b}[head].append(phi)
    return prob


def _level_number(f: SList) -> int:
    if len(f) < 2 or not isinstance(f[1], Symbol) or not f[1].text.isdigit() or int(f[1].text) < 1:
        raise _located(ProblemSyntaxError, "expected (level <n> ...) with n >= 1", f)
    return int(f[1].text)


def _level_parts(f: SList):
    fdecl: dict = {}
    axioms: list = []
    for part in f.items[2:]:
        if not isinstance(part, SList) or part.head() not in ("functions", "axioms"):
            raise _located(ProblemSyntaxError, "expected (functions ...) or (axioms ...)", part)
        if part.head() == "functions":
            for d in part.items[1:]:
                ok = (isinstance(d, SList) and len(d) == 2 and isinstance(d[0], Symbol)
                      and isinstance(d[1], Symbol) and d[1].text.isdigit())
                if not ok:
                    raise _located(ProblemSyntaxError, "expected (<name> <arity>)", d)
                if d[0].text in fdecl:
                    raise _located(ProblemSyntaxError, f"{d[0].text!r} declared twice", d)
                fdecl[d[0].text] = (int(d[1].text), d)
        else:
            axioms.extend(part.items[1:])
    return fdecl, axioms


def _choice(f: SList, options) -> str:
    if len(f) != 2 or not isinstance(f[1], Symbol) or f[1].text not in options:
        raise _located(ProblemSyntaxError, f"{f.head()} must be one of {', '.join(options)}", f)
    return f[1].text


def _closure(f: SList, functions: dict):
    if len(f) >= 2 and isinstance(f[1], Symbol):
        kind = f[1].text
        if kind == "subterm-only" and len(f) == 2:
            return SubtermOnly()
        if kind == "shared-constants" and len(f) in (3, 4) and all(isinstance(x, SList) for x in f.items[2:]):
            fns = []
            for s in f[2]:
                if not isinstance(s, Symbol) or s.text not in functions or functions[s.text][0] == 0:
                    raise _located(UnknownSymbol, f"{s} is not a declared function", s)
                fns.append((s.text, functions[s.text][0]))
            consts = None
            if len(f) == 4:
                consts = tuple(s.text for s in f[3] if isinstance(s, Symbol))
                if len(consts) != len(f[3]):
                    raise _located(ProblemSyntaxError, "expected constant names", f[3])
            return SharedConstants(tuple(fns), consts)
    raise _located(ProblemSyntaxError,
                   "expected (closure shared-constants (<fn> ...) [(<const> ...)]) or (closure subterm-only)", f)


def _ground_term(scope: Scope, node) -> Term:
    return scope.term(node, set(), free_is_var=False)


def parse_terms(text: str, problem: ProblemFile) -> list[Term]:
    """Ground terms (e.g. a seed-terms file) in the symbol scope of ``problem``."""
    scope = problem_scope(problem)
    return [_ground_term(scope, n) for n in read_all(text)]


def parse_formula(text: str, problem: ProblemFile, free_is_var: bool = False) -> Formula:
    """One formula in the symbol scope of ``problem``."""
    nodes = read_all(text)
    if len(nodes) != 1:
        raise ProblemSyntaxError(f"expected one formula, got {len(nodes)}", 1, 1)
    return problem_scope(problem).formula(nodes[0], free_is_var=free_is_var)


def problem_scope(problem: ProblemFile) -> Scope:
    fns = {}
    for i, lvl in enumerate(problem.spec.levels, start=1):
        for name, a in lvl.functions.items():
            fns[name] = (a, i)
    return Scope(problem.spec.base, fns)


# --------------------------------------------------------------------------
# rendering


def render_problem(p: ProblemFile) -> str:
    s = p.spec
    out = [f"(base {_BASE_NAMES[s.base]})"]
    for i, lvl in enumerate(s.levels, start=1):
        fns = " ".join(f"({n} {a})" for n, a in lvl.functions.items())
        out.append(f"(level {i}")
        out.append(f"  (functions {fns})")
        if lvl.axioms:
            out.append("  (axioms")
            out.extend(f"    {clause_sexpr(c)}" for c in lvl.axioms)
            out.append("  ))")
        else:
            out.append("  (axioms))")
    if s.params:
        out.append("(params " + " ".join(sorted(s.params)) + ")")
    if isinstance(p.closure, SharedConstants):
        fns = " ".join(n for n, _ in p.closure.functions)
        extra = "" if p.closure.constants is None else " (" + " ".join(p.closure.constants) + ")"
        out.append(f"(closure shared-constants ({fns}){extra})")
    elif isinstance(p.closure, SubtermOnly):
        out.append("(closure subterm-only)")
    if p.seed_terms:
        out.append("(seed-terms " + " ".join(map(str, p.seed_terms)) + ")")
    if p.task:
        out.append(f"(task {p.task})")
    if p.expect:
        out.append(f"(expect {p.expect.value})")
    for head, fs in (("goal", p.goal), ("goalA", p.goal_a), ("goalB", p.goal_b)):
        out.extend(f"({head} {phi})" for phi in fs)
    return "\n".join(out) + "\n"


def load_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())

