"""Pure equality, decided in its model completion (an infinite set)."""
from __future__ import annotations

from ..core import Atom, Formula, HieraxError, Not, Var, FALSE, TRUE, replace_terms, term_key, term_vars
from .order import _UnionFind
from .theory import UnsupportedPredicate


def canonical(lit: Formula) -> Formula:
    atom = lit.arg if isinstance(lit, Not) else lit
    if atom.pred != "=":
        raise UnsupportedPredicate(f"pure equality has no predicate {atom.pred!r}")
    if term_key(atom.rhs) < term_key(atom.lhs):
        atom = Atom("=", atom.rhs, atom.lhs)
    return Not(atom) if isinstance(lit, Not) else atom


def fold(lit: Formula) -> Formula:
    lit = canonical(lit)
    atom = lit.arg if isinstance(lit, Not) else lit
    if atom.lhs != atom.rhs:
        return lit
    return FALSE if isinstance(lit, Not) else TRUE


def conj_sat(lits) -> bool:
    uf = _UnionFind()
    diseq = []
    for lit in lits:
        lit = canonical(lit)
        if isinstance(lit, Not):
            diseq.append((lit.arg.lhs, lit.arg.rhs))
        else:
            uf.union(lit.lhs, lit.rhs)
    return all(uf.find(a) != uf.find(b) for a, b in diseq)


def eliminate(cube: tuple, x: Var) -> list[tuple]:
    """Substitute a defining equation for ``x`` if there is one, else drop ``x``."""
    lits = [canonical(l) for l in cube]
    for lit in lits:
        atom = lit.arg if isinstance(lit, Not) else lit
        for t in (atom.lhs, atom.rhs):
            if t != x and x in term_vars(t):
                raise HieraxError(f"cannot eliminate {x}: it occurs inside {t}")
    for lit in lits:
        if not isinstance(lit, Not) and x in (lit.lhs, lit.rhs) and lit.lhs != lit.rhs:
            t = lit.rhs if lit.lhs == x else lit.lhs
            out = []
            for other in lits:
                r = fold(_subst(other, x, t))
                if r == FALSE:
                    return []
                if r != TRUE:
                    out.append(r)
            return [tuple(dict.fromkeys(out))]
    out = []
    for lit in lits:
        r = fold(lit)
        if r == FALSE:
            return []
        if r == TRUE:
            continue
        atom = lit.arg if isinstance(lit, Not) else lit
        if x in (atom.lhs, atom.rhs):
            continue
        out.append(r)
    return [tuple(dict.fromkeys(out))]


def _subst(lit, x, t):
    m = {x: t}
    atom = lit.arg if isinstance(lit, Not) else lit
    new = Atom("=", replace_terms(atom.lhs, m), replace_terms(atom.rhs, m))
    return Not(new) if isinstance(lit, Not) else new
