"""Rational linear arithmetic: Fourier-Motzkin elimination over exact rationals."""
from __future__ import annotations

from ..core import Atom, Formula, Not, Var, FALSE, TRUE
from .linear import LinearAtom, atom_mentions, check_opaque, literal_to_linear


def to_linear_cubes(cube) -> list[list[LinearAtom]]:
    """Expand a cube of literals into cubes of linear atoms (splitting ``!=``)."""
    cubes = [[]]
    for lit in cube:
        alts = literal_to_linear(lit)
        cubes = [c + alt for c in cubes for alt in alts]
    return cubes


def _fold(atoms):
    out = []
    for a in atoms:
        if a.is_ground():
            if not a.evaluate():
                return None
            continue
        out.append(a)
    return list(dict.fromkeys(out))


def eliminate_linear(atoms: list[LinearAtom], x: Var) -> list[LinearAtom] | None:
    """Fourier-Motzkin step for one variable on ``=``/``<=``/``<`` atoms.

    Returns the projected conjunction or None when it is inconsistent.
    """
    atoms = _fold(atoms)
    if atoms is None:
        return None
    for a in atoms:
        check_opaque(a, x)
    for a in atoms:
        if a.op == "=" and atom_mentions(a, x):
            form = a.form
            q = form.coeff(x)
            # x = -(form - q*x) / q
            value = form.without(x).scale(-1 / q)
            out = [LinearAtom.make(b.form.substitute(x, value), b.op) for b in atoms if b is not a]
            return _fold(out)
    lower, upper, keep = [], [], []
    for a in atoms:
        q = a.form.coeff(x)
        if q == 0:
            keep.append(a)
        elif q > 0:
            upper.append(a)
        else:
            lower.append(a)
    for lo in lower:
        for hi in upper:
            f_lo, f_hi = lo.form, hi.form
            q_lo, q_hi = f_lo.coeff(x), f_hi.coeff(x)
            # positive combination cancelling x
            combined = f_lo.scale(q_hi) + f_hi.scale(-q_lo)
            op = "<" if "<" in (lo.op, hi.op) else "<="
            keep.append(LinearAtom.make(combined, op))
    return _fold(keep)


def conj_sat_linear(atoms: list[LinearAtom]) -> bool:
    atoms = _fold(atoms)
    if atoms is None:
        return False
    while atoms:
        x = atoms[0].coeffs[0][0]
        atoms = eliminate_linear(atoms, x)
        if atoms is None:
            return False
    return True


def conj_sat(lits) -> bool:
    return any(conj_sat_linear(c) for c in to_linear_cubes(lits))


def eliminate(cube: tuple, x: Var) -> list[tuple]:
    """``exists x`` over a cube of literals, as a list of literal cubes."""
    out = []
    for lc in to_linear_cubes(cube):
        res = eliminate_linear(lc, x)
        if res is None:
            continue
        lits = [a.to_formula() for a in res]
        if FALSE in lits:
            continue
        out.append(tuple(dict.fromkeys(l for l in lits if l != TRUE)))
    return out


def fold(lit: Formula) -> Formula:
    """Normalize a literal through its linear form (ground ones are evaluated)."""
    alts = literal_to_linear(lit)
    if len(alts) == 1:
        a = alts[0][0]
        if a.is_ground():
            return TRUE if a.evaluate() else FALSE
        return a.to_formula()
    a, b = alts[0][0], alts[1][0]
    if a.is_ground():
        return TRUE if (a.evaluate() or b.evaluate()) else FALSE
    eq = LinearAtom.make(a.form, "=").to_formula()
    return Not(eq) if isinstance(eq, Atom) else eq
