"""Symbol elimination: weakest universal constraints on parameters.

Given a goal ``G`` and an instance set ``T``, the goal is reduced to the
base theory, every constant that neither names a parameter term nor is an
argument of one is existentially quantified and eliminated, parameter terms
are put back, and the remaining argument constants are generalized to
universally quantified variables.  The result ``forall y. not Gamma2(y)``
mentions only base symbols and parameters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .base import BaseTheory, qe, simplify
from .base.engine import _canonical
from .core import (App, Atom, Clause, Const, DEFAULT_DNF_CAP, Formula, Implies, Not,
                   Quant, Term, Var, FALSE, TRUE, conj, disj, formula_subterms,
                   neg, replace_terms, substitute, subterms, term_key,
                   to_dnf)
from .locality import (TheorySpec, _item_terms,
                       reduce_chain)


@dataclass
class ConstantPartition:
    c_f: list  # constants naming parameter terms, or constant parameters
    c_p: list  # arguments of parameter terms
    c_rest: list  # everything else; existentially quantified

    def all(self) -> list:
        return self.c_f + self.c_p + self.c_rest


@dataclass
class SymElimResult:
    partition: ConstantPartition
    reduced: list
    steps: list
    existential: Formula
    gamma1_raw: Formula
    gamma1: Formula
    gamma2_raw: Formula
    gamma2: Formula
    qe_theory: BaseTheory
    instance_set: list
    ys: list = field(default_factory=list)
    y_constants: list = field(default_factory=list)
    constraint: Formula | None = None
    constraint_clauses: list = field(default_factory=list)
    kept_fresh: list = field(default_factory=list)

    @property
    def defs(self) -> dict:
        out = {}
        for s in self.steps:
            out.update(s.defs)
        return out


def _constants(items) -> list[Const]:
    seen = {}
    for it in items:
        for t in _item_terms(it):
            for s in _walk(t):
                if isinstance(s, Const):
                    seen[s] = None
    return list(seen)


def _walk(t: Term):
    """Pre-order, left to right: constants come out in reading order."""
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _walk(a)


def partition_constants(reduced: Sequence, defs: dict, params: Iterable[str]) -> ConstantPartition:
    """Split the constants of a reduced problem into ``c_f``, ``c_p`` and the rest.

    ``defs`` maps fresh constants to the (flat) extension terms they name,
    in introduction order.
    """
    params = set(params)
    consts = _constants(reduced)
    c_f = [c for c in consts if c.name in params]
    for c, t in defs.items():
        if t.fn in params and c not in c_f:
            c_f.append(c)
    c_p = []
    for c, t in defs.items():
        if t.fn not in params:
            continue
        for a in t.args:
            for s in subterms(a):
                if isinstance(s, Const) and s not in c_f and s not in c_p:
                    c_p.append(s)
    fixed = set(c_f) | set(c_p)
    c_rest = [c for c in consts if c not in fixed]
    return ConstantPartition(c_f, c_p, c_rest)


def _back_substitute(f: Formula, mapping: dict) -> Formula:
    prev = None
    while prev != f:
        prev, f = f, substitute(f, mapping)
    return f


def _symbols(f: Formula) -> tuple[set[str], set[Const]]:
    fns, consts = set(), set()
    for s in formula_subterms(f):
        if isinstance(s, App):
            fns.add(s.fn)
        elif isinstance(s, Const):
            consts.add(s)
    return fns, consts


def steps_1_to_4(spec: TheorySpec, G: Sequence, T: Iterable[Term] = (),
                 simplify_output: bool = True, cap: int = DEFAULT_DNF_CAP) -> SymElimResult:
    """Reduce, eliminate the non-parameter constants, and put parameter terms back.

    ``T`` lists extra instance terms on top of the default extension terms.
    """
    theory = spec.base
    qe_theory = theory.qe_theory
    T = list(T)
    reduced, steps = reduce_chain(spec, G, seeds=T)
    defs, arg_defs = {}, {}
    for s in steps:
        defs.update(s.defs)
        arg_defs.update(s.arg_defs)
    part = partition_constants(reduced, defs, spec.params)
    zs = [Var(f"z{i}") for i in range(1, len(part.c_rest) + 1)]
    body = conj(_as_formula(it) for it in reduced)
    body = substitute(body, dict(zip(part.c_rest, zs)))
    existential = Quant("exists", tuple(zs), body) if zs else body
    gamma1_raw = qe(theory, existential, cap)
    gamma1 = simplify(theory, gamma1_raw, cap=cap) if simplify_output else gamma1_raw

    # parameter terms back in place of their names
    fresh_names = set(defs) | set(arg_defs)
    mapping = {c: defs[c] for c in part.c_f if c in defs}
    ext = spec.extension_symbols()
    kept = []
    # a fresh argument constant is expanded when its definition is over
    # base symbols and parameters only; otherwise it stays and is generalized
    for c in part.c_p:
        if c not in fresh_names:
            continue
        expansion = _back_substitute(Atom("=", c, c), {**defs, **arg_defs}).lhs
        fns = {s.fn for s in subterms(expansion) if isinstance(s, App)}
        if (fns & ext) <= set(spec.params):
            mapping[c] = arg_defs.get(c, defs.get(c))
        else:
            kept.append(c)
    gamma2_raw = _back_substitute(gamma1, mapping)
    gamma2 = simplify(theory, gamma2_raw, cap=cap) if simplify_output else gamma2_raw
    instance_set = []
    for s in steps:
        instance_set.extend(s.instance_terms)
    return SymElimResult(part, reduced, steps, existential, gamma1_raw, gamma1,
                         gamma2_raw, gamma2, qe_theory, instance_set, kept_fresh=kept)


def _as_formula(item) -> Formula:
    return item.to_formula() if isinstance(item, Clause) else item


def symbol_eliminate(spec: TheorySpec, G: Sequence, T: Iterable[Term] = (),
                     simplify_output: bool = True, cap: int = DEFAULT_DNF_CAP) -> SymElimResult:
    """Steps 1-4 followed by generalization and negation: ``forall y. not Gamma2(y)``."""
    res = steps_1_to_4(spec, G, T, simplify_output, cap)
    _, consts = _symbols(res.gamma2)
    params = set(spec.params)
    order = {c: i for i, c in enumerate(res.partition.c_p)}
    free = sorted((c for c in consts if c.name not in params),
                  key=lambda c: (order.get(c, len(order)), term_key(c)))
    ys = [Var("y")] if len(free) == 1 else [Var(f"y{i}") for i in range(1, len(free) + 1)]
    res.ys = ys
    res.y_constants = free
    general = substitute(res.gamma2, dict(zip(free, ys)))
    res.constraint_clauses = constraint_clauses(spec.base, general, params, cap)
    body = conj(clause_implication(c) for c in res.constraint_clauses)
    res.constraint = Quant("forall", tuple(ys), body) if ys and body not in (TRUE, FALSE) else body
    return res


def constraint_clauses(theory: BaseTheory, gamma2: Formula, params: set,
                       cap: int = DEFAULT_DNF_CAP) -> list[Clause]:
    """``not gamma2`` as clauses: guards become premises, parameter literals conclusions."""
    mc = theory.model_completion
    out = []
    for cube in to_dnf(gamma2, cap):
        lits = []
        for lit in cube:
            fns = {s.fn for s in formula_subterms(lit) if isinstance(s, App)}
            if fns & params:
                lits.append(_canonical(mc, neg(lit)))
            else:
                lits.append(neg(lit))
        out.append(Clause(tuple(_premises_first(lits))))
    return out


def clause_implication(c: Clause) -> Formula:
    """``(=> (and premises) conclusion)`` reading of a clause."""
    prem = [l.arg for l in c.literals if isinstance(l, Not)]
    concl = [l for l in c.literals if not isinstance(l, Not)]
    if not prem or not concl:
        return c.to_formula()
    return Implies(conj(prem), disj(concl))


def _premises_first(lits):
    prem = [l for l in lits if isinstance(l, Not)]
    concl = [l for l in lits if not isinstance(l, Not)]
    return prem + concl


def instantiate_constraint(res: SymElimResult, constants: Sequence[Term] | None = None) -> list[Clause]:
    """Ground instances of the constraint over all tuples from ``constants``.

    Defaults to the constants the variables were abstracted from.
    """
    if not res.ys:
        return [c for c in res.constraint_clauses]
    pool = list(res.y_constants if constants is None else constants)
    out = []
    seen = set()
    for tup in itertools.product(pool, repeat=len(res.ys)):
        sigma = dict(zip(res.ys, tup))
        for c in res.constraint_clauses:
            inst = c.map(lambda t, s=sigma: replace_terms(t, s))
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return out


def ground_constraint(res: SymElimResult) -> list[Clause]:
    """The constraint at the parameter tuples of the reduced goal.

    Each variable goes back to the constant it was abstracted from.  These
    constants occur nowhere else in the constraint, so this single instance
    is generic: whatever it entails holds for every ground instance.
    """
    sigma = dict(zip(res.ys, res.y_constants))
    return [c.map(lambda t: replace_terms(t, sigma)) for c in res.constraint_clauses]
