"""Instantiation, purification and hierarchical reduction for local extensions.

A problem ``T0 + K1 + ... + Kn`` with ground goal ``G`` is reduced level by
level, top first: instantiate ``K_i`` over the closure of the extension
terms, name every level-``i`` rooted ground term by a fresh constant, add
the congruence instances between same-symbol definitions, and hand the
result to level ``i - 1``.  After the last step only base symbols remain.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .base import BaseTheory, decide_ground_sat
from .core import (ARITH_FUNCTIONS, App, Atom, Clause, Const, Formula,
                   FreshNames, HieraxError, Not, NonGroundInstance,
                   Signature, Term, Var, Verdict, conj, formula_subterms,
                   formula_terms, iter_subterms, map_terms, neg, replace_terms,
                   subterms, term_key, term_vars)
from .base.engine import _unsat


class SpecError(HieraxError):
    """A theory specification violates a structural requirement."""


class LevelViolation(SpecError):
    """A clause uses a symbol of a higher level than the one it belongs to."""


# --------------------------------------------------------------------------
# closures


class IdentityClosure:
    """Subterm closure of a set of ground terms (the default instance set)."""

    name = "identity"

    def __call__(self, terms: Iterable[Term]) -> set[Term]:
        out = set()
        for t in terms:
            out |= subterms(t)
        return out

    def __eq__(self, other):
        return isinstance(other, IdentityClosure)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return "IdentityClosure()"


CLOSURES = {"identity": IdentityClosure}


def closure_by_name(name: str):
    try:
        return CLOSURES[name]()
    except KeyError:
        raise SpecError(f"unknown closure {name!r}; available: {sorted(CLOSURES)}") from None


# --------------------------------------------------------------------------
# specifications


@dataclass
class Level:
    functions: dict  # name -> arity; arity 0 entries are extension constants
    axioms: list = field(default_factory=list)
    closure: object = field(default_factory=IdentityClosure)

    @property
    def function_names(self) -> set[str]:
        return {n for n, a in self.functions.items() if a > 0}


@dataclass
class TheorySpec:
    """Base theory plus an ordered chain of extension levels."""

    base: BaseTheory
    levels: list = field(default_factory=list)
    params: frozenset = frozenset()
    base_functions: dict = field(default_factory=dict)

    def __post_init__(self):
        self.params = frozenset(self.params)
        self.signature = Signature(
            base_functions=dict(self.base_functions),
            levels=[dict(l.functions) for l in self.levels],
            params=self.params,
        )
        for i, lvl in enumerate(self.levels, start=1):
            for c in lvl.axioms:
                self._check_clause(i, c)

    def _check_clause(self, i: int, c: Clause):
        lvl = self.levels[i - 1]
        own = set(lvl.functions)
        used_fns = set()
        used_consts = set()
        for t in c.terms():
            for s in subterms(t):
                if isinstance(s, App):
                    used_fns.add(s.fn)
                elif isinstance(s, Const):
                    used_consts.add(s.name)
        for name in used_fns | used_consts:
            lv = self.signature.level_of(name)
            if lv is not None and lv > i:
                raise LevelViolation(f"clause {c} at level {i} uses {name!r} from level {lv}")
        if not (own & (used_fns | used_consts)):
            raise SpecError(f"clause {c} mentions no symbol of level {i}")
        covered = set()
        for t in c.terms():
            for s in subterms(t):
                if isinstance(s, App) and s.fn in lvl.function_names:
                    covered |= term_vars(s)
        loose = c.vars - covered
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise SpecError(f"variables {names} of {c} occur below no level-{i} function")

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def level_functions(self, i: int) -> set[str]:
        return self.levels[i - 1].function_names

    def extension_functions(self) -> set[str]:
        return set().union(*[l.function_names for l in self.levels]) if self.levels else set()

    def extension_symbols(self) -> set[str]:
        return self.signature.extension_symbols()

    def with_axioms(self, level: int, extra: Sequence[Clause]) -> "TheorySpec":
        """Copy with extra clauses added to one level (checked like the others)."""
        levels = [Level(dict(l.functions), list(l.axioms), l.closure) for l in self.levels]
        levels[level - 1].axioms.extend(extra)
        return TheorySpec(self.base, levels, self.params, dict(self.base_functions))


# --------------------------------------------------------------------------
# instantiation


def _item_terms(item) -> Iterable[Term]:
    return item.terms() if isinstance(item, Clause) else formula_terms(item)


def _map_item(item, fn):
    return item.map(fn) if isinstance(item, Clause) else map_terms(item, fn)


def _occurrences(c: Clause, fns: set[str]) -> list[App]:
    out = []
    for t in c.terms():
        for s in iter_subterms(t):
            if isinstance(s, App) and s.fn in fns and s not in out:
                out.append(s)
    return out


def _match(pattern: Term, t: Term, sigma: dict) -> dict | None:
    if isinstance(pattern, Var):
        bound = sigma.get(pattern)
        if bound is None:
            out = dict(sigma)
            out[pattern] = t
            return out
        return sigma if bound == t else None
    if isinstance(pattern, App):
        if not isinstance(t, App) or t.fn != pattern.fn or len(t.args) != len(pattern.args):
            return None
        for p, s in zip(pattern.args, t.args):
            sigma = _match(p, s, sigma)
            if sigma is None:
                return None
        return sigma
    return sigma if pattern == t else None


def instantiate(K: Iterable[Clause], T: Iterable[Term], functions: Iterable[str]) -> list[Clause]:
    """All ground instances of ``K`` whose ``functions``-rooted terms lie in ``T``."""
    fns = set(functions)
    pool: dict[str, list[Term]] = {}
    for t in sorted(set(T), key=term_key):
        if isinstance(t, App) and t.fn in fns:
            pool.setdefault(t.fn, []).append(t)
    out: list[Clause] = []
    seen = set()
    for c in K:
        occ = _occurrences(c, fns)
        covered = set()
        for o in occ:
            covered |= term_vars(o)
        if c.vars - covered:
            raise NonGroundInstance(f"variables of {c} are not below {sorted(fns)}")
        # fewest candidates first keeps the join small
        occ.sort(key=lambda o: len(pool.get(o.fn, ())))
        for sigma in _join(occ, pool, 0, {}):
            inst = c.map(lambda t, s=sigma: replace_terms(t, s))
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return out


def _join(occ, pool, i, sigma):
    if i == len(occ):
        yield sigma
        return
    for t in pool.get(occ[i].fn, ()):
        s = _match(occ[i], t, sigma)
        if s is not None:
            yield from _join(occ, pool, i + 1, s)


# --------------------------------------------------------------------------
# purification


@dataclass
class PurificationResult:
    """Outcome of one purification round.

    ``purified`` is ``k0 + g0`` (instances first); ``arg_defs`` names
    non-constant arguments of extension terms, its equations are part of
    ``g0``.  ``con0_trivial[i]`` marks congruence instances whose premises
    are reflexive equations.
    """

    level: int
    k0: list
    g0: list
    defs: dict
    arg_defs: dict
    con0: list
    con0_trivial: list
    instances: list = field(default_factory=list)
    instance_terms: list = field(default_factory=list)

    @property
    def purified(self) -> list:
        return self.k0 + self.g0

    def nontrivial_con0(self) -> list[Clause]:
        return [c for c, t in zip(self.con0, self.con0_trivial) if not t]


class _Purifier:
    def __init__(self, functions: set[str], fresh: FreshNames):
        self.fns = functions
        self.fresh = fresh
        self.defs: dict[Const, App] = {}
        self.by_term: dict[Term, Const] = {}
        self.arg_defs: dict[Const, Term] = {}
        self.arg_by_term: dict[Term, Const] = {}

    def term(self, t: Term) -> Term:
        if not isinstance(t, App):
            return t
        args = [self.term(a) for a in t.args]
        if t.fn not in self.fns:
            return App(t.fn, args)
        args = [self._name_arg(a) for a in args]
        flat = App(t.fn, args)
        c = self.by_term.get(flat)
        if c is None:
            c = self.fresh()
            self.by_term[flat] = c
            self.defs[c] = flat
        return c

    def _name_arg(self, a: Term) -> Term:
        if isinstance(a, Const):
            return a
        c = self.arg_by_term.get(a)
        if c is None:
            c = self.fresh()
            self.arg_by_term[a] = c
            self.arg_defs[c] = a
        return c


def flatten_purify(items: Sequence, functions: Iterable[str], fresh: FreshNames | None = None,
                   level: int = 1, n_instances: int = 0) -> PurificationResult:
    """Name every ``functions``-rooted ground subterm by a fresh constant.

    The first ``n_instances`` items are reported as ``k0``, the rest as ``g0``.
    Goal items are purified first so that fresh names follow their order.
    """
    items = list(items)
    if fresh is None:
        fresh = FreshNames(_symbol_names(items))
    p = _Purifier(set(functions), fresh)
    order = list(range(n_instances, len(items))) + list(range(n_instances))
    mapped = {}
    for i in order:
        mapped[i] = _map_item(items[i], p.term)
    k0 = [mapped[i] for i in range(n_instances)]
    g0 = [mapped[i] for i in range(n_instances, len(items))]
    g0 += [Atom("=", c, t) for c, t in p.arg_defs.items()]
    con0, trivial = congruence_instances(p.defs, with_flags=True)
    return PurificationResult(level, k0, g0, dict(p.defs), dict(p.arg_defs), con0, trivial)


def congruence_instances(defs: dict, with_flags: bool = False):
    """One congruence instance per unordered pair of same-symbol definitions.

    The diagonal pairs are included (they are reflexive, hence trivial).
    """
    items = list(defs.items())
    out, flags = [], []
    for i, j in itertools.combinations_with_replacement(range(len(items)), 2):
        (c, s), (d, t) = items[i], items[j]
        if s.fn != t.fn:
            continue
        prem = tuple(Not(Atom("=", a, b)) for a, b in zip(s.args, t.args))
        out.append(Clause(prem + (Atom("=", c, d),)))
        flags.append(i == j)
    return (out, flags) if with_flags else out


def unpurify(items: Sequence, result: PurificationResult) -> list:
    """Replace fresh constants by the terms they name, innermost definitions last."""
    mapping = {**result.defs, **result.arg_defs}

    def expand(t: Term) -> Term:
        prev = None
        while prev != t:
            prev, t = t, replace_terms(t, mapping)
        return t

    return [_map_item(it, expand) for it in items]


# --------------------------------------------------------------------------
# hierarchical reduction


def _symbol_names(items: Iterable) -> set[str]:
    out = set()
    for it in items:
        for t in _item_terms(it):
            for s in subterms(t):
                if isinstance(s, Const):
                    out.add(s.name)
                elif isinstance(s, App):
                    out.add(s.fn)
    return out


def _fresh_for(spec: TheorySpec, items: Iterable) -> FreshNames:
    reserved = set(spec.extension_symbols()) | set(spec.base_functions)
    for lvl in spec.levels:
        reserved |= _symbol_names(lvl.axioms)
    return FreshNames(reserved | _symbol_names(items))


def _est(K, G, fns) -> set[Term]:
    out = set()
    for it in itertools.chain(K, G):
        for t in _item_terms(it):
            for s in subterms(t):
                if isinstance(s, App) and s.fn in fns and not term_vars(s):
                    out.add(s)
    return out


def term_closure(K: Sequence[Clause], T: Iterable[Term], functions: Iterable[str],
                 closure=None) -> set[Term]:
    """``Psi_K(T)``: the closure of the extension terms of ``K`` and ``T``."""
    fns = set(functions)
    base = _est(K, [], fns)
    for t in T:
        base |= {s for s in subterms(t) if isinstance(s, App) and s.fn in fns and not term_vars(s)}
    return (closure or IdentityClosure())(base)


def instance_terms(spec: TheorySpec, level: int, G: Sequence, seeds: Iterable[Term] = ()) -> list[Term]:
    """``Psi(est(K_level, G) + seeds)`` restricted to level-rooted terms, sorted."""
    lvl = spec.levels[level - 1]
    fns = lvl.function_names
    base = _est(lvl.axioms, G, fns) | {s for s in seeds if isinstance(s, App) and s.fn in fns}
    closed = lvl.closure(base)
    return sorted((t for t in closed if isinstance(t, App) and t.fn in fns), key=term_key)


def reduce_step(spec: TheorySpec, level: int, G: Sequence, fresh: FreshNames | None = None,
                seeds: Iterable[Term] = (), terms: Iterable[Term] | None = None):
    """One reduction step; returns ``(k0 + g0 + con0, PurificationResult)``."""
    G = list(G)
    if fresh is None:
        fresh = _fresh_for(spec, G)
    lvl = spec.levels[level - 1]
    fns = lvl.function_names
    T = instance_terms(spec, level, G, seeds) if terms is None else sorted(set(terms), key=term_key)
    inst = instantiate(lvl.axioms, T, fns)
    res = flatten_purify(inst + G, fns, fresh, level=level, n_instances=len(inst))
    res.instances = inst
    res.instance_terms = T
    return res.purified + res.con0, res


def reduce_chain(spec: TheorySpec, G: Sequence, seeds: Iterable[Term] = (),
                 fresh: FreshNames | None = None):
    """Reduce through every level, top first; returns the base set and the step results."""
    G = list(G)
    seeds = list(seeds)
    if fresh is None:
        fresh = _fresh_for(spec, G + [Atom("=", s, s) for s in seeds])
    steps = []
    current = G
    named: dict[Term, Const] = {}
    for level in range(spec.n_levels, 0, -1):
        level_seeds = [_rename(s, named) for s in seeds]
        current, res = reduce_step(spec, level, current, fresh, level_seeds)
        for c, t in res.defs.items():
            named[_expand(t, res, steps)] = c
        steps.append(res)
    return current, steps


def _expand(t: Term, res: PurificationResult, steps) -> Term:
    mapping = {**res.arg_defs}
    for r in steps:
        mapping.update(r.defs)
        mapping.update(r.arg_defs)
    prev = None
    while prev != t:
        prev, t = t, replace_terms(t, mapping)
    return t


def _rename(t: Term, named: dict) -> Term:
    """Rewrite a seed term bottom-up through the definitions of earlier levels."""
    if isinstance(t, App):
        t = App(t.fn, [_rename(a, named) for a in t.args])
    return named.get(t, t)


def all_defs(steps: Sequence[PurificationResult]) -> dict:
    out = {}
    for r in steps:
        out.update(r.defs)
    return out


def decide_sat_extension(spec: TheorySpec, G: Sequence, seeds: Iterable[Term] = (),
                         method: str = "search") -> Verdict:
    """Ground satisfiability of ``G`` modulo the whole chain (locality assumed)."""
    reduced, _ = reduce_chain(spec, G, seeds)
    return decide_ground_sat(spec.base, reduced, method=method)


# --------------------------------------------------------------------------
# entailment with free function symbols


def _abstract_apps(items: Sequence[Formula], fresh: FreshNames, arithmetic: bool):
    fns = set()
    for f in items:
        for t in formula_subterms(f):
            if isinstance(t, App) and not (arithmetic and t.fn in ARITH_FUNCTIONS):
                fns.add(t.fn)
    res = flatten_purify(items, fns, fresh, n_instances=0)
    return res.g0, res.con0


def decide_entails_uif(theory: BaseTheory, phi: Formula, psi: Formula) -> bool:
    """``phi |= psi`` modulo the base theory plus free (uninterpreted) functions.

    Every function application is named by a constant and the congruence
    instances between the names are added before the base check.
    """
    fresh = FreshNames({s.name for s in formula_subterms(conj([phi, psi])) if isinstance(s, Const)},
                       prefix="#u")
    pure, con = _abstract_apps([phi, neg(psi)], fresh, theory.arithmetic)
    return _unsat(theory, conj(pure + [c.to_formula() for c in con]), cap=100_000)
