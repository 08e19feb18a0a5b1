"""Quantifier elimination by virtual substitution of test points.

Independent of the DNF/bound-combination engines: it never builds normal
forms.  ``exists x. phi`` becomes a disjunction of ``phi`` evaluated at
finitely many test points (minus infinity, every candidate bound, and every
bound plus an infinitesimal).
"""
from __future__ import annotations

from ..core import (And, Atom, Bool, Formula, HieraxError, Implies, Not, Or,
                    Quant, Var, FALSE, TRUE, conj, disj, neg,
                    replace_terms, term_key, term_vars)
from .linear import LinearAtom, LinearForm, linearize
from .theory import BaseTheory, UnsupportedPredicate

_MINUS_INF = "-inf"


def vs_qe(theory: BaseTheory, phi: Formula) -> Formula:
    theory = theory.qe_theory
    return _qe(theory, phi)


def _qe(theory, f):
    if isinstance(f, Quant):
        body = _qe(theory, f.body)
        if f.kind == "forall":
            body = _qe_neg(body)
        for x in reversed(f.vars):
            body = _exists(theory, x, body)
        if f.kind == "forall":
            body = _qe_neg(body)
        return body
    if isinstance(f, Not):
        return neg(_qe(theory, f.arg))
    if isinstance(f, And):
        return conj(_qe(theory, a) for a in f.args)
    if isinstance(f, Or):
        return disj(_qe(theory, a) for a in f.args)
    if isinstance(f, Implies):
        return disj([neg(_qe(theory, f.lhs)), _qe(theory, f.rhs)])
    return f


def _qe_neg(f):
    return neg(f)


def _atoms(f, out):
    if isinstance(f, Atom):
        out.append(f)
    elif isinstance(f, Not):
        _atoms(f.arg, out)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _atoms(a, out)
    elif isinstance(f, Implies):
        _atoms(f.lhs, out)
        _atoms(f.rhs, out)
    return out


def _map_atoms(f, fn):
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return neg(_map_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(_map_atoms(a, fn) for a in f.args)
    if isinstance(f, Or):
        return disj(_map_atoms(a, fn) for a in f.args)
    if isinstance(f, Implies):
        return disj([neg(_map_atoms(f.lhs, fn)), _map_atoms(f.rhs, fn)])
    return f


def _exists(theory, x: Var, f: Formula) -> Formula:
    if isinstance(f, Bool):
        return f
    if theory is BaseTheory.LRA:
        return _exists_linear(x, f)
    atoms = _atoms(f, [])
    candidates = []
    for a in atoms:
        if theory.family == "equality" and a.pred != "=":
            raise UnsupportedPredicate(f"pure equality has no predicate {a.pred!r}")
        for t in (a.lhs, a.rhs):
            if t != x and x in term_vars(t):
                raise HieraxError(f"cannot eliminate {x}: it occurs inside {t}")
        if a.lhs == x and a.rhs != x:
            candidates.append(a.rhs)
        elif a.rhs == x and a.lhs != x:
            candidates.append(a.lhs)
    candidates = sorted(set(candidates), key=term_key)
    branches = []
    if theory.family == "equality":
        branches.append(_map_atoms(f, lambda a: _at_fresh(a, x)))
        for t in candidates:
            branches.append(_map_atoms(f, lambda a, t=t: _at_point(a, x, t)))
        return disj(branches)
    branches.append(_map_atoms(f, lambda a: _at_minus_inf(a, x)))
    for t in candidates:
        branches.append(_map_atoms(f, lambda a, t=t: _at_point(a, x, t)))
        branches.append(_map_atoms(f, lambda a, t=t: _above(a, x, t)))
    return disj(branches)


def _trivial(a: Atom) -> Formula:
    if a.lhs == a.rhs:
        return FALSE if a.pred == "<" else TRUE
    return a


def _at_point(a: Atom, x, t) -> Formula:
    m = {x: t}
    return _trivial(Atom(a.pred, replace_terms(a.lhs, m), replace_terms(a.rhs, m)))


def _at_fresh(a: Atom, x) -> Formula:
    if a.lhs == a.rhs:
        return TRUE
    if x in (a.lhs, a.rhs):
        return FALSE
    return a


def _at_minus_inf(a: Atom, x) -> Formula:
    if a.lhs == a.rhs:
        return _trivial(a)
    if a.lhs == x:
        return FALSE if a.pred == "=" else TRUE
    if a.rhs == x:
        return FALSE
    return a


def _above(a: Atom, x, t) -> Formula:
    """Value of the atom at the point just above ``t``."""
    if a.lhs == a.rhs:
        return _trivial(a)
    if a.pred == "=" and x in (a.lhs, a.rhs):
        return FALSE
    if a.lhs == x:
        return _trivial(Atom("<", t, a.rhs))
    if a.rhs == x:
        return _trivial(Atom("<=", a.lhs, t))
    return a


# linear arithmetic


def _lin(a: Atom) -> LinearAtom:
    return LinearAtom.make(linearize(a.lhs) - linearize(a.rhs), a.pred)


def _exists_linear(x: Var, f: Formula) -> Formula:
    atoms = [_lin(a) for a in _atoms(f, [])]
    points = []
    for la in atoms:
        form = la.form
        for t in form.coeffs:
            if t != x and x in term_vars(t):
                raise HieraxError(f"cannot eliminate {x}: it occurs inside {t}")
        q = form.coeff(x)
        if q != 0:
            points.append(form.without(x).scale(-1 / q))
    uniq = []
    for p in points:
        if p not in uniq:
            uniq.append(p)
    branches = [_map_atoms(f, lambda a: _lin_minus_inf(_lin(a), x))]
    for p in uniq:
        branches.append(_map_atoms(f, lambda a, p=p: _lin_point(_lin(a), x, p)))
        branches.append(_map_atoms(f, lambda a, p=p: _lin_above(_lin(a), x, p)))
    return disj(branches)


def _lin_point(la: LinearAtom, x, p: LinearForm) -> Formula:
    return LinearAtom.make(la.form.substitute(x, p), la.op).to_formula()


def _lin_minus_inf(la: LinearAtom, x) -> Formula:
    q = la.form.coeff(x)
    if q == 0:
        return la.to_formula()
    if la.op == "=":
        return FALSE
    return TRUE if q > 0 else FALSE


def _lin_above(la: LinearAtom, x, p: LinearForm) -> Formula:
    q = la.form.coeff(x)
    value = la.form.substitute(x, p)
    if q == 0:
        return la.to_formula()
    if la.op == "=":
        return FALSE
    op = "<" if q > 0 else "<="
    return LinearAtom.make(value, op).to_formula()
