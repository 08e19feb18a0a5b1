"""Ground interpolation for extensions that are separable under a closure ``W``.

Both sides are instantiated separately (``K[W(A, B)] + A`` and
``K[W(B, A)] + B``).  The A-side is then purified and every constant that
cannot be expressed over the shared signature is eliminated by quantifier
elimination; putting the shared terms back gives the interpolant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .base import BaseTheory, qe, simplify
from .core import (App, Clause, Const, DEFAULT_DNF_CAP, Formula,
                   HieraxError, Quant, Term, Var, Verdict, conj,
                   formula_subterms, neg, nnf, substitute, subterms, term_key)
from .locality import (Level, TheorySpec, _item_terms, decide_sat_extension,
                       instantiate, reduce_chain)
from .symelim import ConstantPartition, _as_formula, _back_substitute, _constants


class NotUnsat(HieraxError):
    """A and B are jointly satisfiable, so no interpolant exists."""


class SharingError(HieraxError):
    """The requested parameter set cannot be honoured by the separation."""


# --------------------------------------------------------------------------
# amalgamation closures


def ground_subterms(items: Iterable) -> set[Term]:
    """Ground subterms of clauses, formulas or terms."""
    out = set()
    for it in items:
        terms = [it] if isinstance(it, Term) else _item_terms(it)
        for t in terms:
            for s in subterms(t):
                if not _has_var(s):
                    out.add(s)
    return out


def _has_var(t: Term) -> bool:
    return any(isinstance(s, Var) for s in subterms(t))


def _consts(terms: Iterable[Term]) -> set[Const]:
    return {s for t in terms for s in subterms(t) if isinstance(s, Const)}


@dataclass(frozen=True)
class SharedConstants:
    """``st(K) + st(T_A) + { f(c..) | f in F, c.. shared }``.

    Shared constants are those of both ``T_A`` and ``T_B`` plus the ground
    constants of ``K`` (signature constants).  ``constants`` replaces the
    computed shared set by an explicit one (restricted to constants of
    ``T_A``), for hand-tuned closures.
    """

    functions: tuple  # (name, arity) pairs
    constants: tuple | None = None

    name = "shared-constants"

    def __call__(self, K, T_A, T_B) -> set[Term]:
        st_k = ground_subterms(K)
        st_a = ground_subterms(T_A)
        st_b = ground_subterms(T_B)
        kc = _consts(st_k)
        if self.constants is None:
            shared = (_consts(st_a) & _consts(st_b)) | kc
        else:
            shared = {Const(c) for c in self.constants} & (_consts(st_a) | kc)
        out = st_k | st_a
        pool = sorted(shared, key=term_key)
        for fn, arity in self.functions:
            for args in itertools.product(pool, repeat=arity):
                out.add(App(fn, args))
        return out


@dataclass(frozen=True)
class SubtermOnly:
    """``st(K) + st(T_A)``."""

    name = "subterm-only"

    def __call__(self, K, T_A, T_B) -> set[Term]:
        return ground_subterms(K) | ground_subterms(T_A)


def closure_apply(W, K: Sequence[Clause], T_A: Iterable, T_B: Iterable) -> list[Term]:
    """``W(T_A, T_B)`` as a sorted list."""
    return sorted(W(list(K), list(T_A), list(T_B)), key=term_key)


# --------------------------------------------------------------------------
# sharing


def _functions(items) -> set[str]:
    out = set()
    for it in items:
        for t in _item_terms(it):
            for s in subterms(t):
                if isinstance(s, App):
                    out.add(s.fn)
    return out


def related_functions(spec: TheorySpec) -> list[set[str]]:
    """Classes of the transitive closure of "occur in a common axiom"."""
    ext = spec.extension_functions()
    parent = {f: f for f in ext}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lvl in spec.levels:
        for c in lvl.axioms:
            fs = sorted(_functions([c]) & ext)
            for a, b in zip(fs, fs[1:]):
                parent[find(a)] = find(b)
    classes: dict = {}
    for f in ext:
        classes.setdefault(find(f), set()).add(f)
    return sorted(classes.values(), key=lambda s: sorted(s))


def shared_functions(spec: TheorySpec, A: Sequence, B: Sequence) -> set[str]:
    """Extension functions whose class meets both the A-side and the B-side."""
    fa, fb = _functions(A), _functions(B)
    out = set()
    for cls in related_functions(spec):
        if cls & fa and cls & fb:
            out |= cls
    return out


def shared_constants(spec: TheorySpec, A: Sequence, B: Sequence) -> set[Const]:
    ca, cb = set(_constants(A)), set(_constants(B))
    sig = {Const(n) for n in spec.signature.extension_constants()}
    for lvl in spec.levels:
        sig |= set(_constants(lvl.axioms))
    return (ca & cb) | sig


# --------------------------------------------------------------------------
# separation


def separate_instantiate(spec: TheorySpec, A: Sequence, B: Sequence, W) -> tuple[list, list]:
    """``(K[W(A, B)] + A, K[W(B, A)] + B)``, levels processed top first."""
    return _side(spec, list(A), list(B), W), _side(spec, list(B), list(A), W)


def _side(spec, own, other, W) -> list:
    current = list(own)
    K_all = [c for lvl in spec.levels for c in lvl.axioms]
    for level in range(spec.n_levels, 0, -1):
        lvl = spec.levels[level - 1]
        if not lvl.axioms:
            continue
        terms = W(K_all, current, other)
        for inst in instantiate(lvl.axioms, terms, lvl.function_names):
            if inst not in current:
                current.append(inst)
    return current


# --------------------------------------------------------------------------
# interpolants


@dataclass
class InterpolantReport:
    interpolant: Formula
    raw: Formula
    shared_functions: list
    shared_constants: list
    params: list
    side_a: list
    side_b: list
    partition: ConstantPartition
    reduced: list
    steps: list
    qe_theory: BaseTheory
    a_entails_i: bool | None = None
    b_and_i_unsat: bool | None = None
    audit: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def audit_ok(self) -> bool:
        return not self.audit

    @property
    def verified(self) -> bool:
        return bool(self.a_entails_i and self.b_and_i_unsat and self.audit_ok)


def _free_spec(spec: TheorySpec) -> TheorySpec:
    """Same signature, no axioms: purification and congruence only."""
    return TheorySpec(spec.base, [Level(dict(l.functions), [], l.closure) for l in spec.levels],
                      spec.params, dict(spec.base_functions))


def _interp_partition(reduced, defs, arg_defs, fns: set[str], consts: set[Const]) -> ConstantPartition:
    """Names of shared-expressible terms are kept, shared constants stay, the rest goes."""
    all_consts = _constants(reduced)
    expressible: dict[Const, bool] = {}

    def ok(c: Const, seen=()) -> bool:
        if c in consts:
            return True
        if c in expressible:
            return expressible[c]
        if c in seen:
            return False
        if c in defs:
            t = defs[c]
            res = t.fn in fns and all(_term_ok(a, seen + (c,)) for a in t.args)
        elif c in arg_defs:
            res = _term_ok(arg_defs[c], seen + (c,))
        else:
            res = False
        expressible[c] = res
        return res

    def _term_ok(t: Term, seen) -> bool:
        for s in subterms(t):
            if isinstance(s, App) and s.fn not in fns and s.fn not in ("+", "-", "*"):
                return False
            if isinstance(s, Const) and not ok(s, seen):
                return False
        return True

    c_f = [c for c in list(defs) + list(arg_defs) if ok(c)]
    c_p = [c for c in all_consts if c in consts]
    c_rest = [c for c in all_consts if c not in set(c_f) | set(c_p)]
    return ConstantPartition(c_f, c_p, c_rest)


def compute_interpolant(spec: TheorySpec, A: Sequence, B: Sequence, W=None,
                        params: Iterable[str] | None = None, flip: bool = False,
                        verify: bool = True, cap: int = DEFAULT_DNF_CAP) -> InterpolantReport:
    """Interpolant of ``A`` and ``B`` modulo the extension.

    ``params`` narrows the shared extension functions that may remain in the
    interpolant; eliminating a function that the B-side needs is an error.
    With ``flip`` the interpolant of ``(B, A)`` is computed and negated.
    """
    A, B = list(A), list(B)
    if W is None:
        fns = shared_functions(spec, A, B) or spec.extension_functions()
        arity = {n: a for lvl in spec.levels for n, a in lvl.functions.items()}
        W = SharedConstants(tuple(sorted((f, arity[f]) for f in fns)))
    if decide_sat_extension(spec, A + B) is Verdict.SAT:
        raise NotUnsat("A and B are satisfiable together; no interpolant exists")
    if flip:
        rep = compute_interpolant(spec, B, A, W, params, flip=False, verify=False, cap=cap)
        rep.interpolant = simplify(spec.base, neg(rep.interpolant))
        rep.raw = neg(rep.raw)
        rep.side_a, rep.side_b = rep.side_b, rep.side_a
        rep.notes.append("computed from the B-side and negated")
        if verify:
            _verify_into(rep, spec, A, B)
        return rep

    s_a, s_b = separate_instantiate(spec, A, B, W)
    sh_fns = shared_functions(spec, A, B)
    sh_consts = shared_constants(spec, A, B)
    keep_fns = set(sh_fns)
    notes = []
    if params is not None:
        keep_fns = sh_fns & set(params)
        dropped = sh_fns - keep_fns
        needed = dropped & _functions(s_b)
        if needed:
            raise SharingError(f"functions {sorted(needed)} occur on the B-side and cannot be eliminated")
        if dropped:
            notes.append(f"shared functions eliminated on request: {sorted(dropped)}")
    reduced, steps = reduce_chain(_free_spec(spec), s_a)
    defs, arg_defs = {}, {}
    for st in steps:
        defs.update(st.defs)
        arg_defs.update(st.arg_defs)
    part = _interp_partition(reduced, defs, arg_defs, keep_fns, sh_consts)
    zs = [Var(f"z{i}") for i in range(1, len(part.c_rest) + 1)]
    body = substitute(conj(_as_formula(it) for it in reduced), dict(zip(part.c_rest, zs)))
    existential = Quant("exists", tuple(zs), body) if zs else body
    gamma1 = qe(spec.base, existential, cap)
    mapping = {c: defs.get(c, arg_defs.get(c)) for c in part.c_f}
    raw = _back_substitute(gamma1, mapping)
    interp = simplify(spec.base, raw, cap=cap)
    rep = InterpolantReport(interp, raw, sorted(sh_fns), sorted(sh_consts, key=term_key),
                            sorted(keep_fns), s_a, s_b, part, reduced, steps,
                            spec.base.qe_theory, notes=notes)
    rep.notes.append("separability under the chosen closure is assumed, not proved")
    K_all = [c for lvl in spec.levels for c in lvl.axioms]
    if set(W(K_all, A, B)) - ground_subterms(K_all) - ground_subterms(A):
        rep.notes.append("shared function terms over shared constants are treated as A-pure")
    if verify:
        _verify_into(rep, spec, A, B)
    return rep


def _verify_into(rep: InterpolantReport, spec, A, B):
    rep.a_entails_i, rep.b_and_i_unsat, rep.audit = verify_interpolant(spec, A, B, rep.interpolant)


def audit_symbols(spec: TheorySpec, A: Sequence, B: Sequence, I: Formula) -> list[str]:
    """Symbols of ``I`` that are not shared between ``A`` and ``B``."""
    fns = shared_functions(spec, A, B) | set(spec.base_functions)
    consts = shared_constants(spec, A, B)
    problems = []
    for s in sorted(formula_subterms(I), key=term_key):
        if isinstance(s, Const) and s not in consts:
            problems.append(f"constant {s} is not shared")
        elif isinstance(s, App) and s.fn not in fns and s.fn not in ("+", "-", "*"):
            problems.append(f"function {s.fn} is not shared")
        elif isinstance(s, Var):
            problems.append(f"variable {s} in interpolant")
    return list(dict.fromkeys(problems))


def verify_interpolant(spec: TheorySpec, A: Sequence, B: Sequence, I: Formula):
    """``(A and not I unsat, B and I unsat, audit problems)``."""
    A, B = list(A), list(B)
    a_ok = decide_sat_extension(spec, A + [nnf(neg(I))]) is Verdict.UNSAT
    b_ok = decide_sat_extension(spec, B + [I]) is Verdict.UNSAT
    return a_ok, b_ok, audit_symbols(spec, A, B, I)
