import itertools
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import c, c1, c2, f, g, x, y
from hierax.core import (And, App, Atom, Clause, Const, DNFLimitError, Exists,
                         FALSE, Forall, FreshNames, Implies, Not, Num, Or,
                         Signature, TermTable, TRUE, check_flat_linear,
                         clause_sexpr, clauses_of, conj, disj, est_terms,
                         free_vars, is_ground, neg, nnf, replace_terms,
                         substitute, subterms, to_cnf, to_dnf)

consts = st.sampled_from([Const(n) for n in "abcd"])


def terms(depth=2):
    return st.recursive(consts, lambda sub: st.builds(lambda fn, a: App(fn, [a]), st.sampled_from("fg"), sub),
                        max_leaves=depth + 2)


def atoms():
    return st.builds(Atom, st.sampled_from(["=", "<=", "<"]), terms(), terms())


def formulas():
    lit = st.one_of(atoms(), atoms().map(Not))
    return st.recursive(lit, lambda sub: st.one_of(
        st.lists(sub, min_size=1, max_size=3).map(conj),
        st.lists(sub, min_size=1, max_size=3).map(disj),
        sub.map(neg)), max_leaves=6)


def _eval(fm, val):
    """Truth value under an assignment of atoms to booleans."""
    if isinstance(fm, Atom):
        return val[fm]
    if isinstance(fm, Not):
        return not _eval(fm.arg, val)
    if isinstance(fm, And):
        return all(_eval(a, val) for a in fm.args)
    if isinstance(fm, Or):
        return any(_eval(a, val) for a in fm.args)
    if isinstance(fm, Implies):
        return not _eval(fm.lhs, val) or _eval(fm.rhs, val)
    return fm.value


def _atoms_of(fm, out):
    if isinstance(fm, Atom):
        out.add(fm)
    elif isinstance(fm, Not):
        _atoms_of(fm.arg, out)
    elif isinstance(fm, (And, Or)):
        for a in fm.args:
            _atoms_of(a, out)
    return out


def _assignments(fm):
    ats = sorted(_atoms_of(fm, set()), key=str)
    for bits in itertools.product([False, True], repeat=len(ats)):
        yield dict(zip(ats, bits))


def test_terms_are_immutable_and_hashable():
    t = f(c)
    with pytest.raises(AttributeError):
        t.fn = "g"
    assert {f(c), f(Const("c"))} == {t}
    assert str(App("p", [c, f(x)])) == "(p c (f x))"


def test_num_normalizes_to_fractions():
    assert Num("1/2") == Num(0.5)
    assert str(Num(3)) == "3"


def test_term_table_shares_structure():
    table = TermTable()
    a = table.intern(f(g(c)))
    b = table.intern(App("f", [App("g", [Const("c")])]))
    assert a is b
    assert a.args[0] is table.intern(g(c))


def test_term_table_concurrent_interning():
    table = TermTable()
    out = []

    def work():
        out.append(table.intern(f(g(c1))))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o is out[0] for o in out)


def test_subterms_and_replacement():
    t = App("p", [f(c), g(f(c))])
    assert subterms(t) == {t, f(c), c, g(f(c))}
    assert replace_terms(t, {f(c): c1}) == App("p", [c1, g(c1)])
    assert is_ground(t) and not is_ground(f(x))


def test_substitute_respects_binders():
    fm = And((Atom("<=", x, c), Exists([x], Atom("<", x, y))))
    out = substitute(fm, {x: c1, y: c2})
    assert out == And((Atom("<=", c1, c), Exists([x], Atom("<", x, c2))))
    assert free_vars(Forall([x], Atom("=", x, y))) == {y}


def test_conj_disj_flatten_and_absorb():
    a, b = Atom("<=", c, c1), Atom("<", c1, c2)
    assert conj([a, TRUE, conj([b])]) == And((a, b))
    assert conj([a, FALSE]) == FALSE
    assert disj([a, TRUE]) == TRUE
    assert conj([]) == TRUE and disj([]) == FALSE


def test_neg_and_nnf():
    a, b = Atom("<=", c, c1), Atom("<", c1, c2)
    assert neg(Not(a)) == a
    assert nnf(Not(And((a, b)))) == Or((Not(a), Not(b)))
    assert nnf(Implies(a, b)) == Or((Not(a), b))


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_dnf_and_cnf_preserve_truth_tables(fm):
    d = disj(conj(cube) for cube in to_dnf(fm))
    k = conj(disj(cl) for cl in to_cnf(fm))
    for val in _assignments(fm):
        assert _eval(d, val) == _eval(fm, val) == _eval(k, val)


def test_dnf_cap():
    fm = conj(disj([Atom("<", Const(f"a{i}"), Const(f"b{i}")), Atom("<", Const(f"b{i}"), Const(f"a{i}"))])
              for i in range(12))
    with pytest.raises(DNFLimitError):
        to_dnf(fm, cap=100)


def test_clause_rendering_is_implication_style():
    cl = clauses_of(Forall([x, y], Implies(Atom("<=", x, y), Atom("<=", f(x), f(y)))))[0]
    assert clause_sexpr(cl) == "(=> (<= x y) (<= (f x) (f y)))"
    assert cl.vars == {x, y}
    assert clause_sexpr(Clause(())) == "false"


def test_clauses_of_drops_tautologies():
    a = Atom("<=", c, c1)
    assert clauses_of(Implies(a, a)) == []


def test_signature_rejects_clashes():
    with pytest.raises(ValueError):
        Signature(levels=[{"f": 1}, {"f": 1}])
    with pytest.raises(ValueError):
        Signature(levels=[{"f": 1}], params=frozenset({"g"}))
    sig = Signature(levels=[{"f": 1}, {"g": 1, "k": 0}], params=frozenset({"f"}))
    assert sig.level_of("g") == 2 and sig.arity("f") == 1
    assert sig.extension_constants() == {"k"}


def test_fresh_names_avoid_reserved():
    fresh = FreshNames({"#1", "#3"})
    assert [fresh().name for _ in range(3)] == ["#2", "#4", "#5"]


def test_est_terms_only_ground_extension_terms():
    K = clauses_of(Forall([x], Atom("<=", f(x), g(c))))
    G = [Atom("<", f(f(c1)), c)]
    assert est_terms(K, G, {"f"}) == {f(f(c1)), f(c1)}


def test_flatness_and_linearity():
    mon = clauses_of(Forall([x, y], Implies(Atom("<=", x, y), Atom("<=", f(x), f(y)))))
    nonflat = clauses_of(Forall([x], Atom("<=", f(g(x)), x)))
    quasi = clauses_of(Forall([x], Atom("<=", App("p", [x, c]), x)))
    nonlin = clauses_of(Forall([x], Atom("<=", App("p", [x, x]), x)))
    shapes = check_flat_linear(mon + nonflat + quasi + nonlin, {"f", "p"}, {"g"})
    assert [s.flatness for s in shapes] == ["flat", "non-flat", "quasi-flat", "flat"]
    assert [s.linear for s in shapes] == [True, True, True, False]
