"""Public entry points of the base-theory engines.

``qe`` eliminates quantifiers by DNF expansion followed by per-cube bound
combination (DLO), Fourier-Motzkin (LRA) or substitute-or-drop (pure
equality).  Ground satisfiability is decided by case splitting over the
clauses with a theory check on every partial assignment; ``method="qe"``
takes the textbook route instead (close every constant existentially,
eliminate, evaluate).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable

from ..core import (ARITH_FUNCTIONS, App, And, Atom, Bool, Clause,
                    DEFAULT_DNF_CAP, DNFLimitError, Formula, HieraxError,
                    Implies, Not, Num, Or, Quant, Term, Var, Verdict, FALSE,
                    TRUE, conj, disj, free_vars, is_quantifier_free, neg,
                    is_literal, nnf, subterms, term_key, to_dnf)
from . import arith, equality, order
from .theory import BaseTheory, UnsupportedPredicate

_FAMILIES = {"order": order, "linear": arith, "equality": equality}


def _engine(theory: BaseTheory):
    return _FAMILIES[theory.family]


def _canonical(theory: BaseTheory, lit: Formula) -> Formula:
    """Fold and normalize a literal; may return TRUE or FALSE."""
    return _engine(theory).fold(lit)


def _check_symbols(theory: BaseTheory, f: Formula):
    """Reject predicates and arithmetic the theory does not interpret."""
    for a in _atoms(f):
        if a.pred not in theory.predicates:
            raise UnsupportedPredicate(f"{theory.value} has no predicate {a.pred!r}")
        if theory.arithmetic:
            continue
        for t in (a.lhs, a.rhs):
            for s in subterms(t):
                if isinstance(s, Num) or (isinstance(s, App) and s.fn in ARITH_FUNCTIONS):
                    raise UnsupportedPredicate(f"{theory.value} does not interpret {s}")


def _atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from _atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _atoms(a)
    elif isinstance(f, Implies):
        yield from _atoms(f.lhs)
        yield from _atoms(f.rhs)
    elif isinstance(f, Quant):
        yield from _atoms(f.body)


def conj_sat(theory: BaseTheory, lits: Iterable[Formula]) -> bool:
    """Satisfiability of a conjunction of literals."""
    out = []
    for lit in lits:
        r = _canonical(theory, lit)
        if r == FALSE:
            return False
        if r != TRUE:
            out.append(r)
    return _engine(theory).conj_sat(out)


# --------------------------------------------------------------------------
# cube enumeration


class _Branch:
    """A consistent set of literals plus the disjunctions still to satisfy."""

    __slots__ = ("lits", "ors")

    def __init__(self, lits, ors):
        self.lits = lits
        self.ors = ors


def _expand(theory, f, lits: dict, ors: list) -> bool:
    """Add an NNF formula to a branch; False when a literal folds to false."""
    stack = [f]
    while stack:
        g = stack.pop()
        if g == TRUE:
            continue
        if g == FALSE:
            return False
        if isinstance(g, And):
            stack.extend(reversed(g.args))
        elif isinstance(g, Or):
            ors.append(g.args)
        else:
            r = _canonical(theory, g)
            if r == FALSE:
                return False
            if r != TRUE:
                lits[r] = None
    return True


def iter_cubes(theory: BaseTheory, formulas: Iterable[Formula], cap: int = DEFAULT_DNF_CAP,
               first_only: bool = False):
    """Enumerate pairwise disjoint, theory-consistent cubes of a conjunction.

    Depth-first case splitting with unit propagation; the union of the cubes
    is equivalent to the conjunction.  Raises DNFLimitError beyond ``cap``.
    """
    eng = _engine(theory)
    lits: dict = {}
    ors: list = []
    for f in formulas:
        if not _expand(theory, nnf(f), lits, ors):
            return
    if not eng.conj_sat(list(lits)):
        return
    count = 0
    stack = [_Branch(lits, ors)]
    while stack:
        br = stack.pop()
        res = _propagate(theory, eng, br)
        if res is None:
            continue
        lits, ors = res
        if not ors:
            count += 1
            if count > cap:
                raise DNFLimitError(f"more than {cap} cubes")
            yield tuple(lits)
            if first_only:
                return
            continue
        pick = min(range(len(ors)), key=lambda i: len(ors[i]))
        rest = ors[:pick] + ors[pick + 1:]
        blocked: list = []
        children = []
        for d in ors[pick]:
            nl = dict(lits)
            for b in blocked:
                nl[b] = None
            nors = list(rest)
            if _expand(theory, d, nl, nors):
                children.append(_Branch(nl, nors))
            if is_literal(d):
                b = _canonical(theory, neg(d))
                if b == FALSE:
                    break
                if b != TRUE:
                    blocked.append(b)
        stack.extend(reversed(children))


def _propagate(theory, eng, br):
    lits = dict(br.lits)
    ors = list(br.ors)
    while True:
        if not eng.conj_sat(list(lits)):
            return None
        changed = False
        keep = []
        for alts in ors:
            live = []
            done = False
            for d in alts:
                if is_literal(d):
                    r = _canonical(theory, d)
                    if r == TRUE or r in lits:
                        done = True
                        break
                    if r == FALSE or _canonical(theory, neg(r)) in lits:
                        continue
                live.append(d)
            if done:
                continue
            if not live:
                return None
            if len(live) == 1:
                if not _expand(theory, live[0], lits, keep):
                    return None
                changed = True
                continue
            keep.append(tuple(live))
        ors = keep
        if not changed:
            return lits, ors


def _sat(theory, formulas, cap=DEFAULT_DNF_CAP) -> bool:
    theory = theory.model_completion
    for _ in iter_cubes(theory, formulas, cap, first_only=True):
        return True
    return False


# --------------------------------------------------------------------------
# quantifier elimination


def qe(theory: BaseTheory, phi: Formula, cap: int = DEFAULT_DNF_CAP) -> Formula:
    """Quantifier-free equivalent of ``phi`` in ``theory`` (or its model completion)."""
    _check_symbols(theory, phi)
    return _qe(theory.qe_theory, phi, cap)


def _qe(theory, f, cap):
    if isinstance(f, Quant):
        body = _qe(theory, f.body, cap)
        if f.kind == "forall":
            body = neg(body)
        body = _exists(theory, f.vars, body, cap)
        return neg(body) if f.kind == "forall" else body
    if isinstance(f, Not):
        return neg(_qe(theory, f.arg, cap))
    if isinstance(f, And):
        return conj(_qe(theory, a, cap) for a in f.args)
    if isinstance(f, Or):
        return disj(_qe(theory, a, cap) for a in f.args)
    if isinstance(f, Implies):
        return disj([neg(_qe(theory, f.lhs, cap)), _qe(theory, f.rhs, cap)])
    return f


def _exists(theory, xs, body, cap):
    """``exists xs. body`` with miniscoping over the top-level conjuncts."""
    xs = [x for x in xs if x in free_vars(body)]
    if not xs:
        return body
    parts = list(body.args) if isinstance(body, And) else [body]
    outside = []
    groups: list[tuple[set, list]] = []
    for p in parts:
        vs = free_vars(p) & set(xs)
        if not vs:
            outside.append(p)
            continue
        merged = [g for g in groups if g[0] & vs]
        for g in merged:
            groups.remove(g)
            vs |= g[0]
        groups.append((vs, [q for g in merged for q in g[1]] + [p]))
    out = list(outside)
    for vs, fs in groups:
        order = [x for x in xs if x in vs]
        out.append(_exists_block(theory, order, fs, cap))
    return conj(out)


def _exists_block(theory, xs, fs, cap):
    eng = _engine(theory)
    cubes = list(iter_cubes(theory, fs, cap))
    for x in reversed(xs):
        nxt = []
        for cube in cubes:
            if not any(x in free_vars(l) for l in cube):
                nxt.append(cube)
                continue
            nxt.extend(eng.eliminate(cube, x))
            if len(nxt) > cap:
                raise DNFLimitError(f"quantifier elimination exceeds {cap} disjuncts")
        cubes = _fold_cubes(theory, nxt)
    return disj(conj(c) for c in cubes)


def _fold_cubes(theory, cubes):
    out = []
    seen = set()
    for cube in cubes:
        lits = []
        dead = False
        for lit in cube:
            r = _canonical(theory, lit)
            if r == FALSE:
                dead = True
                break
            if r != TRUE:
                lits.append(r)
        if dead:
            continue
        lits = tuple(dict.fromkeys(lits))
        key = frozenset(lits)
        if key in seen or not _engine(theory).conj_sat(lits):
            continue
        seen.add(key)
        out.append(lits)
    return out


# --------------------------------------------------------------------------
# ground satisfiability


def _as_formula(item) -> Formula:
    return item.to_formula() if isinstance(item, Clause) else item


def decide_ground_sat(theory: BaseTheory, G: Iterable, method: str = "search",
                      cap: int = DEFAULT_DNF_CAP) -> Verdict:
    """SAT/UNSAT of a set of ground clauses or quantifier-free ground formulas."""
    fs = [_as_formula(g) for g in G]
    for f in fs:
        if not is_quantifier_free(f) or free_vars(f):
            raise HieraxError(f"expected a ground quantifier-free formula, got {f}")
        _check_symbols(theory, f)
    if method == "search":
        return _search_sat(theory, fs, cap)
    if method == "qe":
        return _qe_sat(theory, fs, cap)
    raise ValueError(f"unknown method {method!r}")


def _search_sat(theory, fs, cap) -> Verdict:
    return Verdict.SAT if _sat(theory, fs, cap) else Verdict.UNSAT


def _qe_sat(theory, fs, cap) -> Verdict:
    phi = conj(fs)
    names = {}

    def abstract(t: Term) -> Term:
        if isinstance(t, Num):
            return t
        if isinstance(t, App) and t.fn in ARITH_FUNCTIONS and theory.arithmetic:
            return App(t.fn, [abstract(a) for a in t.args])
        if t not in names:
            names[t] = Var(f"_v{len(names)}")
        return names[t]

    body = _map_atom_terms(phi, abstract)
    closed = Quant("exists", tuple(names.values()), body) if names else body
    res = qe(theory, closed, cap)
    if not isinstance(res, Bool):
        res = _evaluate_closed(theory, res)
    return Verdict.SAT if res == TRUE else Verdict.UNSAT


def _map_atom_terms(f, fn):
    if isinstance(f, Atom):
        return Atom(f.pred, fn(f.lhs), fn(f.rhs))
    if isinstance(f, Not):
        return Not(_map_atom_terms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(_map_atom_terms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_map_atom_terms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_map_atom_terms(f.lhs, fn), _map_atom_terms(f.rhs, fn))
    return f


def _evaluate_closed(theory, f) -> Bool:
    for cube in to_dnf(f):
        if all(_canonical(theory, l) == TRUE for l in cube):
            return TRUE
    return FALSE


# --------------------------------------------------------------------------
# entailment and simplification


def _unsat(theory, f, cap) -> bool:
    """Unsatisfiability of a quantifier-free formula; free variables act as constants."""
    return not _sat(theory, [f], cap)


def decide_entails(theory: BaseTheory, phi: Formula, psi: Formula,
                   cap: int = DEFAULT_DNF_CAP) -> bool:
    """Whether ``theory`` proves the universal closure of ``phi -> psi``."""
    _check_symbols(theory, phi)
    _check_symbols(theory, psi)
    if not is_quantifier_free(phi):
        phi = qe(theory, phi, cap)
    if not is_quantifier_free(psi):
        psi = qe(theory, psi, cap)
    return _unsat(theory, conj([phi, neg(psi)]), cap)


def decide_equivalent(theory: BaseTheory, phi: Formula, psi: Formula,
                      cap: int = DEFAULT_DNF_CAP) -> bool:
    return decide_entails(theory, phi, psi, cap) and decide_entails(theory, psi, phi, cap)


def simplify(theory: BaseTheory, phi: Formula, check: bool = False,
             cap: int = DEFAULT_DNF_CAP) -> Formula:
    """Equivalent DNF with unsat cubes, redundant literals and subsumed cubes removed."""
    if not is_quantifier_free(phi):
        raise HieraxError("simplify expects a quantifier-free formula")
    theory_c = theory.model_completion
    folded = _map_literals(phi, lambda l: _canonical(theory_c, l))
    try:
        cubes = _fold_cubes(theory_c, list(iter_cubes(theory_c, [folded], cap)))
    except DNFLimitError:
        return folded
    eng = _engine(theory_c)
    cubes = [_tighten(theory_c, c) for c in cubes]
    cubes = [_irredundant(theory_c, eng, c) for c in cubes]
    cubes = _merge_complementary(theory_c, cubes)
    cubes = _drop_subsumed(theory_c, eng, cubes)
    out = disj(conj(c) for c in cubes)
    if check and not decide_equivalent(theory, phi, out, cap):
        raise AssertionError(f"simplify changed meaning of {phi}")
    return out


def _map_literals(f, fn):
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        if isinstance(f.arg, Atom):
            return fn(f)
        return neg(_map_literals(f.arg, fn))
    if isinstance(f, And):
        return conj(_map_literals(a, fn) for a in f.args)
    if isinstance(f, Or):
        return disj(_map_literals(a, fn) for a in f.args)
    if isinstance(f, Implies):
        return disj([neg(_map_literals(f.lhs, fn)), _map_literals(f.rhs, fn)])
    return f


def _tighten(theory, cube):
    """``s <= t`` together with ``s != t`` becomes ``s < t`` (order theories)."""
    if theory.family != "order":
        return cube
    lits = list(cube)
    diseq = {frozenset((l.arg.lhs, l.arg.rhs)) for l in lits
             if isinstance(l, Not) and l.arg.pred == "="}
    out = []
    used = set()
    for l in lits:
        if isinstance(l, Atom) and l.pred == "<=":
            key = frozenset((l.lhs, l.rhs))
            if key in diseq:
                out.append(Atom("<", l.lhs, l.rhs))
                used.add(key)
                continue
        out.append(l)
    out = [l for l in out if not (isinstance(l, Not) and frozenset((l.arg.lhs, l.arg.rhs)) in used)]
    return tuple(dict.fromkeys(out))


def _irredundant(theory, eng, cube):
    lits = list(cube)
    i = 0
    while i < len(lits):
        rest = lits[:i] + lits[i + 1:]
        nl = _canonical(theory, neg(lits[i]))
        if nl == FALSE or not _conj_with(eng, rest, nl):
            lits = rest
        else:
            i += 1
    return tuple(lits)


def _conj_with(eng, lits, extra):
    if extra == TRUE:
        return eng.conj_sat(lits)
    return eng.conj_sat(list(lits) + [extra])


def _cube_entails(theory, eng, c1, c2) -> bool:
    for l in c2:
        nl = _canonical(theory, neg(l))
        if nl == FALSE:
            continue
        if _conj_with(eng, c1, nl):
            return False
    return True


def _merge_complementary(theory, cubes):
    """Resolve ``(X and l) or (X and not l)`` into ``X`` until no pair is left."""
    cubes = list(cubes)
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(cubes)), 2):
            a, b = set(cubes[i]), set(cubes[j])
            da, db = a - b, b - a
            if len(da) == 1 and len(db) == 1:
                (la,), (lb,) = da, db
                if _canonical(theory, neg(la)) == lb:
                    merged = tuple(l for l in cubes[i] if l != la)
                    cubes = [c for k, c in enumerate(cubes) if k not in (i, j)] + [merged]
                    changed = True
                    break
    return cubes


def _drop_subsumed(theory, eng, cubes):
    keep = list(cubes)
    # a cube cannot entail a literal about a term it leaves unconstrained
    # (no endpoints, infinite domain); arithmetic cubes are always checked
    terms = [_cube_terms(c) if theory.family != "linear" else None for c in keep]
    i = 0
    while i < len(keep):
        if any(j != i and (terms[i] is None or terms[j] <= terms[i])
               and _cube_entails(theory, eng, keep[i], keep[j]) for j in range(len(keep))):
            del terms[i]
            del keep[i]
        else:
            i += 1
    return keep


def _cube_terms(cube) -> frozenset:
    return frozenset(t for l in cube for a in _atoms(l) for t in (a.lhs, a.rhs))


# --------------------------------------------------------------------------
# finite-model oracle


def _order_terms(fs) -> list[Term]:
    out = set()
    for f in fs:
        for a in _atoms(f):
            out |= {a.lhs, a.rhs}
    return sorted(out, key=term_key)


def finite_order_oracle(G: Iterable, bound: int | None = None) -> Verdict:
    """Brute-force satisfiability of ground order constraints in finite chains.

    Every maximal term is an opaque point.  All placements of the ``k``
    terms into a chain of at most ``bound`` elements (collisions allowed)
    are enumerated, one term at a time: a term joins an existing point or
    opens a new one in some gap.  A branch is cut as soon as a constraint
    is already false.
    """
    fs = _split_conjuncts(_as_formula(g) for g in G)
    if any(f == FALSE for f in fs):
        return Verdict.UNSAT
    terms = _order_terms(fs)
    n = len(terms) if bound is None else bound
    if n < len(terms):
        raise ValueError(f"bound {n} is below the number of terms ({len(terms)})")
    terms = _placement_order(fs, terms)
    rank = {t: i for i, t in enumerate(terms)}
    due: list[list] = [[] for _ in terms]  # constraints decided once term i is placed
    for f in fs:
        ts = _order_terms([f])
        if ts:
            due[max(rank[t] for t in ts)].append(f)
    val: dict = {}

    def candidates(points: list):
        yield from points
        if len(points) < max(n, 1):
            if not points:
                yield Fraction(0)
                return
            yield points[0] - 1
            for lo, hi in zip(points, points[1:]):
                yield (lo + hi) / 2
            yield points[-1] + 1

    def search(i: int, points: list) -> bool:
        if i == len(terms):
            return True
        for v in list(candidates(points)):
            val[terms[i]] = v
            if all(_peval(f, val) for f in due[i]):
                if search(i + 1, points if v in points else sorted(points + [v])):
                    return True
        del val[terms[i]]
        return False

    return Verdict.SAT if search(0, []) else Verdict.UNSAT


def _split_conjuncts(fs) -> list:
    out = []
    for f in fs:
        if isinstance(f, And):
            out.extend(_split_conjuncts(f.args))
        elif f != TRUE:
            out.append(f)
    return out


def _placement_order(fs, terms) -> list:
    """Greedy order: next is the term that completes the most constraints."""
    sets = [set(_order_terms([f])) for f in fs]
    freq = {t: sum(t in ts for ts in sets) for t in terms}
    placed: set = set()
    out = []
    while len(out) < len(terms):
        def score(t):
            done = sum(1 for ts in sets if t in ts and ts - placed <= {t})
            return (-done, -freq[t], term_key(t))
        best = min((t for t in terms if t not in placed), key=score)
        placed.add(best)
        out.append(best)
    return out


def _peval(f, val):
    """Three-valued evaluation under a partial assignment (None = unknown)."""
    if isinstance(f, Bool):
        return f.value
    if isinstance(f, Atom):
        if f.lhs not in val or f.rhs not in val:
            return None
        x, y = val[f.lhs], val[f.rhs]
        return x == y if f.pred == "=" else (x <= y if f.pred == "<=" else x < y)
    if isinstance(f, Not):
        r = _peval(f.arg, val)
        return None if r is None else not r
    if isinstance(f, Implies):
        return _peval(Or((Not(f.lhs), f.rhs)), val)
    if isinstance(f, (And, Or)):
        unknown = False
        stop = isinstance(f, Or)  # value that decides the connective
        for a in f.args:
            r = _peval(a, val)
            if r is stop:
                return stop
            unknown |= r is None
        return None if unknown else not stop
    raise TypeError(f"cannot evaluate {f}")
