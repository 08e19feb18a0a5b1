"""Terms, formulas, clauses and the structural queries used by every engine.

Terms are single-sorted trees.  Leaves are variables, constants (free
constants, fresh constants and nullary extension symbols alike) and exact
rational numerals; inner nodes are function applications.  All values are
immutable; equality is structural and hashes are cached.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence


class HieraxError(Exception):
    """Base class for all errors raised by the library."""


class DNFLimitError(HieraxError):
    """Raised when a disjunctive normal form exceeds the configured cap."""


class NonGroundInstance(HieraxError):
    """Raised when instantiation would leave a free variable behind."""


DEFAULT_DNF_CAP = 100_000


class Verdict(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"

    def __str__(self):
        return self.value.upper()

ARITH_FUNCTIONS = {"+": -1, "-": -1, "*": 2}
PREDICATES = ("=", "<=", "<")


# --------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __lt__(self, other: "Term") -> bool:
        return term_key(self) < term_key(other)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("var", name)))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class Const(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("const", name)))

    def __eq__(self, other):
        return isinstance(other, Const) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Const({self.name!r})"

    def __str__(self):
        return self.name


class Num(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value):
        value = Fraction(value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash(("num", value)))

    def __eq__(self, other):
        return isinstance(other, Num) and other.value == self.value

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Num({str(self.value)!r})"

    def __str__(self):
        return str(self.value)


class App(Term):
    __slots__ = ("fn", "args", "_hash")

    def __init__(self, fn: str, args: Sequence[Term] = ()):
        args = tuple(args)
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("app", fn, args)))

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, App) and other._hash == self._hash
                and other.fn == self.fn and other.args == self.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.fn!r}, {self.args!r})"

    def __str__(self):
        return "(" + " ".join([self.fn] + [str(a) for a in self.args]) + ")"


def term_key(t: Term) -> str:
    return str(t)


class TermTable:
    """Hash-consing table: structurally equal terms map to one shared object.

    Safe to share between threads.
    """

    def __init__(self):
        self._table: dict[Term, Term] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._table)

    def intern(self, t: Term) -> Term:
        if isinstance(t, App):
            t = App(t.fn, [self.intern(a) for a in t.args])
        with self._lock:
            return self._table.setdefault(t, t)


def subterms(t: Term) -> set[Term]:
    """All subterms of ``t``, ``t`` included."""
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s in out:
            continue
        out.add(s)
        if isinstance(s, App):
            stack.extend(s.args)
    return out


def iter_subterms(t: Term) -> Iterator[Term]:
    """Post-order traversal (children before parents), duplicates included."""
    if isinstance(t, App):
        for a in t.args:
            yield from iter_subterms(a)
    yield t


def term_vars(t: Term) -> set[Var]:
    return {s for s in subterms(t) if isinstance(s, Var)}


def term_consts(t: Term) -> set[Const]:
    return {s for s in subterms(t) if isinstance(s, Const)}


def is_ground(t: Term) -> bool:
    return not term_vars(t)


def replace_terms(t: Term, mapping: Mapping[Term, Term]) -> Term:
    """Replace subterms top-down; a replaced subterm is not revisited."""
    if t in mapping:
        return mapping[t]
    if isinstance(t, App):
        new_args = tuple(replace_terms(a, mapping) for a in t.args)
        if new_args != t.args:
            return App(t.fn, new_args)
    return t


# --------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Bool(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.pred not in PREDICATES:
            raise ValueError(f"unsupported predicate {self.pred!r}")

    def __str__(self):
        return f"({self.pred} {self.lhs} {self.rhs})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"(not {self.arg})"


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __str__(self):
        if not self.args:
            return "true"
        return "(and " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __str__(self):
        if not self.args:
            return "false"
        return "(or " + " ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"(=> {self.lhs} {self.rhs})"


@dataclass(frozen=True)
class Quant(Formula):
    kind: str  # "exists" | "forall"
    vars: tuple
    body: Formula

    def __str__(self):
        vs = " ".join(v.name for v in self.vars)
        return f"({self.kind} ({vs}) {self.body})"


def Exists(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    return Quant("exists", vs, body) if vs else body


def Forall(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    return Quant("forall", vs, body) if vs else body


def eq(a: Term, b: Term) -> Atom:
    return Atom("=", a, b)


def le(a: Term, b: Term) -> Atom:
    return Atom("<=", a, b)


def lt(a: Term, b: Term) -> Atom:
    return Atom("<", a, b)


def neg(f: Formula) -> Formula:
    """Negation with double-negation and constant folding."""
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Bool):
        return FALSE if f.value else TRUE
    return Not(f)


def conj(fs: Iterable[Formula]) -> Formula:
    out = []
    for f in fs:
        if f == TRUE:
            continue
        if f == FALSE:
            return FALSE
        if isinstance(f, And):
            out.extend(f.args)
        else:
            out.append(f)
    out = list(dict.fromkeys(out))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(fs: Iterable[Formula]) -> Formula:
    out = []
    for f in fs:
        if f == FALSE:
            continue
        if f == TRUE:
            return TRUE
        if isinstance(f, Or):
            out.extend(f.args)
        else:
            out.append(f)
    out = list(dict.fromkeys(out))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def literal_atom(lit: Formula) -> Atom:
    return lit.arg if isinstance(lit, Not) else lit


def literal_positive(lit: Formula) -> bool:
    return not isinstance(lit, Not)


def formula_terms(f: Formula) -> Iterator[Term]:
    """Top-level argument terms of every atom in ``f``."""
    if isinstance(f, Atom):
        yield f.lhs
        yield f.rhs
    elif isinstance(f, Not):
        yield from formula_terms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from formula_terms(a)
    elif isinstance(f, Implies):
        yield from formula_terms(f.lhs)
        yield from formula_terms(f.rhs)
    elif isinstance(f, Quant):
        yield from formula_terms(f.body)


def formula_subterms(f: Formula) -> set[Term]:
    out = set()
    for t in formula_terms(f):
        out |= subterms(t)
    return out


def free_vars(f: Formula) -> set[Var]:
    if isinstance(f, Quant):
        return free_vars(f.body) - set(f.vars)
    if isinstance(f, Atom):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*[free_vars(a) for a in f.args]) if f.args else set()
    if isinstance(f, Implies):
        return free_vars(f.lhs) | free_vars(f.rhs)
    return set()


def formula_consts(f: Formula) -> set[Const]:
    return {t for t in formula_subterms(f) if isinstance(t, Const)}


def formula_functions(f: Formula) -> set[str]:
    return {t.fn for t in formula_subterms(f) if isinstance(t, App)}


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Quant):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.lhs) and is_quantifier_free(f.rhs)
    return True


def map_terms(f: Formula, fn: Callable[[Term], Term]) -> Formula:
    """Apply ``fn`` to the top-level terms of every atom."""
    if isinstance(f, Atom):
        return Atom(f.pred, fn(f.lhs), fn(f.rhs))
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_terms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_terms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_terms(f.lhs, fn), map_terms(f.rhs, fn))
    if isinstance(f, Quant):
        return Quant(f.kind, f.vars, map_terms(f.body, fn))
    return f


def substitute(f: Formula, mapping: Mapping[Term, Term]) -> Formula:
    """Replace terms by ``mapping``; variables bound inside ``f`` are left alone."""
    if not mapping:
        return f
    if isinstance(f, Quant):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        return Quant(f.kind, f.vars, substitute(f.body, inner))
    if isinstance(f, Not):
        return Not(substitute(f.arg, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(substitute(a, mapping) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.lhs, mapping), substitute(f.rhs, mapping))
    return map_terms(f, lambda t: replace_terms(t, mapping))


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form of a quantifier-free formula (implications removed)."""
    if isinstance(f, Bool):
        return neg(f) if negate else f
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [nnf(a, negate) for a in f.args]
        return disj(parts) if negate else conj(parts)
    if isinstance(f, Or):
        parts = [nnf(a, negate) for a in f.args]
        return conj(parts) if negate else disj(parts)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.lhs), f.rhs)), negate)
    raise TypeError(f"nnf expects a quantifier-free formula, got {f}")


def to_dnf(f: Formula, cap: int = DEFAULT_DNF_CAP) -> list[tuple]:
    """Disjunctive normal form as a list of literal tuples.

    Contradictory cubes (``A`` together with ``not A``) are dropped; ``[]``
    is false and ``[()]`` is true.
    """
    return _dnf(nnf(f), cap)


def _dnf(f: Formula, cap: int) -> list[tuple]:
    if f == TRUE:
        return [()]
    if f == FALSE:
        return []
    if is_literal(f):
        return [(f,)]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_dnf(a, cap))
            if len(out) > cap:
                raise DNFLimitError(f"DNF exceeds {cap} disjuncts")
        return _dedup_cubes(out)
    if isinstance(f, And):
        cubes = [()]
        for a in f.args:
            cubes = _cube_product(cubes, _dnf(a, cap), cap)
            if not cubes:
                return []
        return cubes
    raise TypeError(f"unexpected formula in DNF conversion: {f}")


def _cube_product(left: list[tuple], right: list[tuple], cap: int) -> list[tuple]:
    out = []
    for c1 in left:
        for c2 in right:
            merged = _merge_cube(c1, c2)
            if merged is not None:
                out.append(merged)
                if len(out) > cap:
                    raise DNFLimitError(f"DNF exceeds {cap} disjuncts")
    return _dedup_cubes(out)


def _merge_cube(c1: tuple, c2: tuple):
    lits = list(dict.fromkeys(c1 + c2))
    s = set(lits)
    for lit in lits:
        if neg(lit) in s:
            return None
    return tuple(lits)


def _dedup_cubes(cubes: list[tuple]) -> list[tuple]:
    seen = set()
    out = []
    for c in cubes:
        k = frozenset(c)
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


def to_cnf(f: Formula, cap: int = DEFAULT_DNF_CAP) -> list[tuple]:
    """Conjunctive normal form as a list of literal tuples (clauses).

    Tautological clauses are dropped; ``[]`` is true and ``[()]`` is false.
    """
    return [tuple(neg(l) for l in cube) for cube in _dnf(nnf(f, True), cap)]


def dnf_formula(cubes: Sequence[tuple]) -> Formula:
    return disj(conj(c) for c in cubes)


# --------------------------------------------------------------------------
# clauses and substitutions


@dataclass(frozen=True)
class Clause:
    """A finite disjunction of literals; variables are implicitly universal."""

    literals: tuple

    def __post_init__(self):
        for lit in self.literals:
            if not is_literal(lit):
                raise ValueError(f"not a literal: {lit}")

    def __len__(self):
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    @property
    def vars(self) -> set[Var]:
        out = set()
        for lit in self.literals:
            out |= free_vars(lit)
        return out

    def is_ground(self) -> bool:
        return not self.vars

    def terms(self) -> Iterator[Term]:
        for lit in self.literals:
            yield from formula_terms(lit)

    def subterms(self) -> set[Term]:
        out = set()
        for t in self.terms():
            out |= subterms(t)
        return out

    def to_formula(self) -> Formula:
        return disj(self.literals)

    def map(self, fn: Callable[[Term], Term]) -> "Clause":
        return Clause(tuple(map_terms(l, fn) for l in self.literals))

    def __str__(self):
        return clause_sexpr(self)


def clause_sexpr(c: Clause) -> str:
    """Implication-style rendering: negative literals become premises."""
    lits = c.literals
    if not lits:
        return "false"
    if len(lits) == 1:
        return str(lits[0])
    prem = [l.arg for l in lits if isinstance(l, Not)]
    concl = [l for l in lits if not isinstance(l, Not)]
    if prem and concl:
        p = prem[0] if len(prem) == 1 else And(tuple(prem))
        q = concl[0] if len(concl) == 1 else Or(tuple(concl))
        return str(Implies(p, q))
    return "(or " + " ".join(map(str, lits)) + ")"


def clauses_of(f: Formula, cap: int = DEFAULT_DNF_CAP) -> list[Clause]:
    """Clausify a quantifier-free formula (or a universally closed one)."""
    while isinstance(f, Quant) and f.kind == "forall":
        f = f.body
    if isinstance(f, Implies) and is_quantifier_free(f):
        # premise-first literal order, as in the implication
        prem = to_dnf(f.lhs, cap)
        if len(prem) == 1:
            negs = tuple(neg(l) for l in prem[0])
            return [Clause(_dedup(negs + c)) for c in to_cnf(f.rhs, cap)
                    if not _tautology(negs + c)]
    return [Clause(c) for c in to_cnf(f, cap)]


def _dedup(lits: tuple) -> tuple:
    return tuple(dict.fromkeys(lits))


def _tautology(lits: tuple) -> bool:
    s = set(lits)
    return any(neg(l) in s for l in lits)


Substitution = Mapping[Var, Term]


def apply_subst(c: Clause, sigma: Substitution) -> Clause:
    """Instance of ``c`` under ``sigma``; literal order and polarity are kept."""
    return Clause(tuple(substitute(l, sigma) for l in c.literals))


# --------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    """Partitioned signature: base symbols, extension levels, parameters.

    ``levels[i]`` maps the names of the level ``i + 1`` extension symbols to
    their arities; nullary entries are constant parameters or extension
    constants.
    """

    base_functions: dict = field(default_factory=dict)
    base_predicates: dict = field(default_factory=lambda: {"=": 2, "<=": 2, "<": 2})
    levels: list = field(default_factory=list)
    params: frozenset = frozenset()
    free_constants: set = field(default_factory=set)

    def __post_init__(self):
        seen = set(self.base_functions)
        for i, lvl in enumerate(self.levels, start=1):
            clash = seen & set(lvl)
            if clash:
                raise ValueError(f"level {i} redeclares {sorted(clash)}")
            seen |= set(lvl)
        clash = seen & set(self.free_constants)
        if clash:
            raise ValueError(f"free constants clash with declared symbols: {sorted(clash)}")
        for p in self.params:
            owners = [i for i, lvl in enumerate(self.levels, start=1) if p in lvl]
            if len(owners) != 1:
                raise ValueError(f"parameter {p!r} must belong to exactly one level")

    def level_of(self, name: str):
        """Extension level of a symbol (1-based), or None for non-extension symbols."""
        for i, lvl in enumerate(self.levels, start=1):
            if name in lvl:
                return i
        return None

    def arity(self, name: str):
        if name in self.base_functions:
            return self.base_functions[name]
        for lvl in self.levels:
            if name in lvl:
                return lvl[name]
        return None

    def extension_symbols(self) -> set[str]:
        return set().union(*[set(l) for l in self.levels]) if self.levels else set()

    def level_functions(self, level: int) -> set[str]:
        return {n for n, a in self.levels[level - 1].items() if a > 0}

    def extension_constants(self) -> set[str]:
        return {n for lvl in self.levels for n, a in lvl.items() if a == 0}

    def declared(self) -> set[str]:
        return set(self.base_functions) | self.extension_symbols() | set(self.free_constants)


class FreshNames:
    """Monotone ``#k`` name supply that never reuses a reserved name."""

    def __init__(self, reserved: Iterable[str] = (), prefix: str = "#"):
        self.reserved = set(reserved)
        self.prefix = prefix
        self._counter = itertools.count(1)
        self.issued: list[str] = []

    def reserve(self, names: Iterable[str]):
        self.reserved |= set(names)

    def __call__(self) -> Const:
        while True:
            name = f"{self.prefix}{next(self._counter)}"
            if name not in self.reserved:
                self.reserved.add(name)
                self.issued.append(name)
                return Const(name)


# --------------------------------------------------------------------------
# structural queries


def est_terms(K: Iterable[Clause], G: Iterable, functions: Iterable[str]) -> set[Term]:
    """Ground terms rooted at one of ``functions`` occurring in ``K`` or ``G``.

    ``G`` may hold clauses or quantifier-free formulas.
    """
    fns = set(functions)
    out = set()
    for item in itertools.chain(K, G):
        terms = item.terms() if isinstance(item, Clause) else formula_terms(item)
        for t in terms:
            for s in subterms(t):
                if isinstance(s, App) and s.fn in fns and is_ground(s):
                    out.add(s)
    return out


@dataclass(frozen=True)
class ClauseShape:
    clause: Clause
    flatness: str  # "flat" | "quasi-flat" | "non-flat"
    linear: bool
    vars_covered: bool

    @property
    def flat(self) -> bool:
        return self.flatness == "flat"


def _sigma_occurrences(c: Clause, fns: set[str]) -> list[App]:
    out = []
    for t in c.terms():
        for s in iter_subterms(t):
            if isinstance(s, App) and s.fn in fns:
                out.append(s)
    return out


def _is_base_ground(t: Term, fns_ext: set[str]) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, App):
        return t.fn not in fns_ext and all(_is_base_ground(a, fns_ext) for a in t.args)
    return True


def check_flat_linear(K: Iterable[Clause], functions: Iterable[str],
                      extension_functions: Iterable[str] = ()) -> list[ClauseShape]:
    """Classify each clause as flat / quasi-flat / non-flat and (non-)linear.

    ``functions`` is the Σ of the level under scrutiny; ``extension_functions``
    lists further symbols that are not base symbols (they disqualify an
    argument from being a ground base term).
    """
    fns = set(functions)
    ext = fns | set(extension_functions)
    report = []
    for c in K:
        ground = c.is_ground()
        occ = _sigma_occurrences(c, fns)
        flatness = "flat"
        for s in occ:
            for a in s.args:
                leaf_ok = isinstance(a, Const) if ground else isinstance(a, Var)
                if leaf_ok:
                    continue
                if _is_base_ground(a, ext):
                    if flatness == "flat":
                        flatness = "quasi-flat"
                else:
                    flatness = "non-flat"
        linear = True
        kind = Const if ground else Var
        owner: dict = {}
        for s in occ:
            leaves = [a for a in s.args if isinstance(a, kind)]
            if len(leaves) != len(set(leaves)):
                linear = False
            for x in set(leaves):
                if x in owner and owner[x] != s:
                    linear = False
                owner.setdefault(x, s)
        covered_vars = set()
        for s in occ:
            covered_vars |= term_vars(s)
        report.append(ClauseShape(c, flatness, linear, c.vars <= covered_vars))
    return report
