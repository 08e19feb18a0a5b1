"""Exact linear forms over rationals and their atoms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..core import (App, Atom, Formula, HieraxError, Not, Num, Term, Var,
                    TRUE, FALSE, term_key, term_vars)


class NonLinearAtom(HieraxError):
    """A product of two non-constant terms reached the arithmetic engine."""


class LinearForm:
    """``sum(coeff * atom) + const`` with exact rational coefficients."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: Mapping[Term, Fraction] | None = None, const=0):
        self.coeffs = {t: Fraction(q) for t, q in (coeffs or {}).items() if q != 0}
        self.const = Fraction(const)

    @classmethod
    def of_term(cls, t: Term) -> "LinearForm":
        return cls({t: 1})

    def __add__(self, other: "LinearForm") -> "LinearForm":
        c = dict(self.coeffs)
        for t, q in other.coeffs.items():
            c[t] = c.get(t, 0) + q
        return LinearForm(c, self.const + other.const)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scale(self, q) -> "LinearForm":
        q = Fraction(q)
        return LinearForm({t: c * q for t, c in self.coeffs.items()}, self.const * q)

    def coeff(self, t: Term) -> Fraction:
        return self.coeffs.get(t, Fraction(0))

    def without(self, t: Term) -> "LinearForm":
        return LinearForm({s: q for s, q in self.coeffs.items() if s != t}, self.const)

    def substitute(self, t: Term, value: "LinearForm") -> "LinearForm":
        q = self.coeff(t)
        if q == 0:
            return self
        return self.without(t) + value.scale(q)

    def is_constant(self) -> bool:
        return not self.coeffs

    def atoms(self) -> set[Term]:
        return set(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, LinearForm) and self.coeffs == other.coeffs
                and self.const == other.const)

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.const))

    def __repr__(self):
        parts = [f"{q}*{t}" for t, q in sorted(self.coeffs.items(), key=lambda p: term_key(p[0]))]
        return " + ".join(parts + [str(self.const)])


def linearize(t: Term) -> LinearForm:
    if isinstance(t, Num):
        return LinearForm({}, t.value)
    if isinstance(t, App) and t.fn == "+":
        out = LinearForm()
        for a in t.args:
            out = out + linearize(a)
        return out
    if isinstance(t, App) and t.fn == "-":
        if len(t.args) == 1:
            return -linearize(t.args[0])
        out = linearize(t.args[0])
        for a in t.args[1:]:
            out = out - linearize(a)
        return out
    if isinstance(t, App) and t.fn == "*":
        out = LinearForm({}, 1)
        for a in t.args:
            la = linearize(a)
            if la.is_constant():
                out = out.scale(la.const)
            elif out.is_constant():
                out = la.scale(out.const)
            else:
                raise NonLinearAtom(f"non-linear product {t}")
        return out
    return LinearForm.of_term(t)


@dataclass(frozen=True)
class LinearAtom:
    """``sum(q_i * t_i) op rhs`` with op in {'=', '<=', '<'}.

    Normalized: the leading coefficient (by term order) has absolute value
    one, and is +1 for equalities.
    """

    coeffs: tuple  # ((term, Fraction), ...) sorted by term key
    op: str
    rhs: Fraction

    @classmethod
    def make(cls, form: LinearForm, op: str) -> "LinearAtom":
        """Build ``form op 0``."""
        items = sorted(form.coeffs.items(), key=lambda p: term_key(p[0]))
        rhs = -form.const
        if items:
            lead = items[0][1]
            k = abs(lead) if op != "=" else lead
            items = [(t, q / k) for t, q in items]
            rhs = rhs / k
        return cls(tuple(items), op, rhs)

    @property
    def form(self) -> LinearForm:
        """The left-hand side minus the right-hand side."""
        return LinearForm(dict(self.coeffs), -self.rhs)

    def is_ground(self) -> bool:
        return not self.coeffs

    def evaluate(self) -> bool:
        if self.op == "=":
            return 0 == self.rhs
        if self.op == "<=":
            return 0 <= self.rhs
        return 0 < self.rhs

    def to_formula(self) -> Formula:
        if self.is_ground():
            return TRUE if self.evaluate() else FALSE
        pos = [(t, q) for t, q in self.coeffs if q > 0]
        negs = [(t, -q) for t, q in self.coeffs if q < 0]
        rhs_const = self.rhs
        lhs = _sum_term(pos)
        rhs = _sum_term(negs)
        if lhs is None:
            lhs, rhs_const = Num(-rhs_const), Fraction(0)
            return Atom(self.op, lhs, rhs)
        if rhs is None:
            rhs = Num(rhs_const)
        elif rhs_const != 0:
            rhs = App("+", (rhs, Num(rhs_const))) if not _is_sum(rhs) else App("+", rhs.args + (Num(rhs_const),))
        return Atom(self.op, lhs, rhs)


def _sum_term(parts):
    if not parts:
        return None
    terms = [t if q == 1 else App("*", (Num(q), t)) for t, q in parts]
    return terms[0] if len(terms) == 1 else App("+", tuple(terms))


def _is_sum(t: Term) -> bool:
    return isinstance(t, App) and t.fn == "+"


def literal_to_linear(lit: Formula) -> list[list[LinearAtom]]:
    """A literal as a disjunction (outer list) of conjunctions of linear atoms."""
    positive = not isinstance(lit, Not)
    atom = lit if positive else lit.arg
    form = linearize(atom.lhs) - linearize(atom.rhs)
    if positive:
        return [[LinearAtom.make(form, atom.pred)]]
    if atom.pred == "<=":
        return [[LinearAtom.make(-form, "<")]]
    if atom.pred == "<":
        return [[LinearAtom.make(-form, "<=")]]
    return [[LinearAtom.make(form, "<")], [LinearAtom.make(-form, "<")]]


def atom_mentions(a: LinearAtom, x: Term) -> bool:
    return any(t == x for t, _ in a.coeffs)


def check_opaque(a: LinearAtom, x: Var):
    for t, _ in a.coeffs:
        if t != x and x in term_vars(t):
            raise HieraxError(f"cannot eliminate {x}: it occurs inside {t}")
