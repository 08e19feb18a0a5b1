"""Total orders: literal normalization, conjunction satisfiability, DLO elimination.

Terms are opaque here; two terms are compared only through the literals.
A conjunction of order literals is satisfiable in some total order iff it
is satisfiable in a dense one without endpoints, so one checker serves
both TOrd and DLO.
"""
from __future__ import annotations

from ..core import (Atom, Formula, HieraxError, Not, Term, Var, FALSE, TRUE,
                    replace_terms, term_key, term_vars)


def canonical(lit: Formula) -> Formula:
    """Rewrite a literal into one of ``a<=b``, ``a<b``, ``a=b``, ``not a=b``."""
    if isinstance(lit, Not):
        a = lit.arg
        if a.pred == "<=":
            return Atom("<", a.rhs, a.lhs)
        if a.pred == "<":
            return Atom("<=", a.rhs, a.lhs)
        return Not(_sym(a))
    if lit.pred == "=":
        return _sym(lit)
    return lit


def _sym(a: Atom) -> Atom:
    if term_key(a.rhs) < term_key(a.lhs):
        return Atom("=", a.rhs, a.lhs)
    return a


def fold(lit: Formula) -> Formula:
    """Evaluate literals whose two sides coincide."""
    lit = canonical(lit)
    atom = lit.arg if isinstance(lit, Not) else lit
    if atom.lhs != atom.rhs:
        return lit
    value = atom.pred != "<"
    if isinstance(lit, Not):
        value = not value
    return TRUE if value else FALSE


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def conj_sat(lits) -> bool:
    """Satisfiability of a conjunction of order literals over a total order."""
    uf = _UnionFind()
    edges = []
    diseq = []
    for lit in lits:
        lit = canonical(lit)
        if isinstance(lit, Not):
            diseq.append((lit.arg.lhs, lit.arg.rhs))
        elif lit.pred == "=":
            uf.union(lit.lhs, lit.rhs)
        else:
            edges.append((lit.lhs, lit.rhs, lit.pred == "<"))
    graph: dict = {}
    nodes = set()
    for a, b, strict in edges:
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb and strict:
            return False
        graph.setdefault(ra, []).append(rb)
        nodes |= {ra, rb}
    comp = _scc(nodes, graph)
    for a, b, strict in edges:
        if strict and comp[uf.find(a)] == comp[uf.find(b)]:
            return False
    for a, b in diseq:
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            return False
        if ra in comp and rb in comp and comp[ra] == comp[rb]:
            return False
    return True


def _scc(nodes, graph) -> dict:
    """Tarjan's algorithm, iterative; returns node -> component id."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comp = {}
    counter = 0
    ncomp = 0
    for root in sorted(nodes, key=term_key):
        if root in index:
            continue
        work = [(root, iter(graph.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def _check_opaque(t: Term, x: Var):
    if t != x and x in term_vars(t):
        raise HieraxError(f"cannot eliminate {x}: it occurs inside {t}")


def eliminate(cube: tuple, x: Var) -> list[tuple]:
    """Eliminate ``exists x`` from a conjunction of order literals (DLO).

    Returns a list of cubes whose disjunction is DLO-equivalent.
    """
    lits = [canonical(l) for l in cube]
    for lit in lits:
        atom = lit.arg if isinstance(lit, Not) else lit
        _check_opaque(atom.lhs, x)
        _check_opaque(atom.rhs, x)
    # split disequalities on x into two strict cases
    for i, lit in enumerate(lits):
        if isinstance(lit, Not) and x in (lit.arg.lhs, lit.arg.rhs) and lit.arg.lhs != lit.arg.rhs:
            a, b = lit.arg.lhs, lit.arg.rhs
            rest = tuple(lits[:i] + lits[i + 1:])
            return (eliminate(rest + (Atom("<", a, b),), x)
                    + eliminate(rest + (Atom("<", b, a),), x))
    for lit in lits:
        if not isinstance(lit, Not) and lit.pred == "=" and lit.lhs != lit.rhs and x in (lit.lhs, lit.rhs):
            t = lit.rhs if lit.lhs == x else lit.lhs
            out = []
            for other in lits:
                r = fold(_subst(other, x, t))
                if r == FALSE:
                    return []
                if r != TRUE:
                    out.append(r)
            return [tuple(dict.fromkeys(out))]
    lower, upper, keep = [], [], []
    for lit in lits:
        r = fold(lit)
        if r == FALSE:
            return []
        if r == TRUE:
            continue
        if isinstance(lit, Not) or lit.pred == "=":
            keep.append(lit)
            continue
        strict = lit.pred == "<"
        if lit.rhs == x:
            lower.append((lit.lhs, strict))
        elif lit.lhs == x:
            upper.append((lit.rhs, strict))
        else:
            keep.append(lit)
    for lo, s1 in lower:
        for hi, s2 in upper:
            r = fold(Atom("<" if (s1 or s2) else "<=", lo, hi))
            if r == FALSE:
                return []
            if r != TRUE:
                keep.append(r)
    return [tuple(dict.fromkeys(keep))]


def _subst(lit: Formula, x: Var, t: Term) -> Formula:
    m = {x: t}
    if isinstance(lit, Not):
        a = lit.arg
        return Not(Atom(a.pred, replace_terms(a.lhs, m), replace_terms(a.rhs, m)))
    return Atom(lit.pred, replace_terms(lit.lhs, m), replace_terms(lit.rhs, m))
