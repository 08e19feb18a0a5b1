import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import c, c1, c2, case_split_spec, f, fixture, g, h, sgc_spec, x, y
from hierax.base import BaseTheory, decide_ground_sat
from hierax.core import (App, Atom, Clause, Const, Forall, Implies, Not,
                         NonGroundInstance, Verdict, clauses_of, formula_subterms)
from hierax.locality import (Level, LevelViolation, SpecError, TheorySpec,
                             congruence_instances, decide_entails_uif,
                             decide_sat_extension, flatten_purify,
                             instance_terms, instantiate, reduce_chain,
                             term_closure, unpurify)

DLO = BaseTheory.DLO
MON_F = clauses_of(Forall([x, y], Implies(Atom("<=", x, y), Atom("<=", f(x), f(y)))))
consts = [Const(n) for n in "abcd"]


def _terms(rng, k):
    out = set()
    for _ in range(k):
        t = rng.choice(consts)
        for _ in range(rng.randint(1, 2)):
            t = App(rng.choice("fg"), [t])
        out.add(t)
    return out


def test_instantiate_monotonicity_axiom():
    a, b = Const("a"), Const("b")
    inst = instantiate(MON_F, [f(a), f(b)], {"f"})
    assert len(inst) == 4
    assert Clause((Not(Atom("<=", a, b)), Atom("<=", f(a), f(b)))) in inst


def test_instantiate_ignores_foreign_terms():
    assert instantiate(MON_F, [g(c), c], {"f"}) == []


def test_instantiate_rejects_uncovered_variables():
    loose = [Clause((Atom("<=", x, y), Atom("<=", f(x), c)))]
    with pytest.raises(NonGroundInstance):
        instantiate(loose, [f(c)], {"f"})


def test_instantiate_matches_nested_patterns():
    K = clauses_of(Forall([x], Atom("<=", f(g(x)), x)))
    inst = instantiate(K, [f(g(c1)), f(c2)], {"f"})
    assert inst == [Clause((Atom("<=", f(g(c1)), c1),))]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_instantiation_is_monotone_in_the_term_set(seed):
    rng = random.Random(seed)
    T1 = _terms(rng, 3)
    T2 = T1 | _terms(rng, 3)
    K = MON_F + clauses_of(Forall([x], Atom("<=", f(x), g(x))))
    assert set(instantiate(K, T1, {"f", "g"})) <= set(instantiate(K, T2, {"f", "g"}))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_purification_round_trip(seed):
    rng = random.Random(seed)
    ts = sorted(_terms(rng, 4), key=str)
    G = [Atom(rng.choice(["<=", "<", "="]), rng.choice(ts), rng.choice(ts + consts)) for _ in range(3)]
    res = flatten_purify(G, {"f", "g"})
    for lit in res.g0:
        for s in formula_subterms(lit):
            assert not isinstance(s, App) or all(isinstance(a, Const) for a in s.args)
    assert unpurify(res.g0[:len(G)], res) == G


def test_purification_names_nonconstant_arguments():
    G = [Atom("<", f(App("+", [c1, c2])), c)]
    res = flatten_purify(G, {"f"})
    assert list(res.arg_defs.values()) == [App("+", [c1, c2])]
    assert unpurify(res.g0[:1], res) == G


def test_congruence_instances_cover_unordered_pairs():
    defs = {Const("#1"): f(c1), Const("#2"): f(c2), Const("#3"): g(c1), Const("#4"): f(c)}
    con, trivial = congruence_instances(defs, with_flags=True)
    # three f-names give 6 unordered pairs with the diagonal, one g-name gives 1
    assert len(con) == 7
    assert sum(trivial) == 4
    heads = {(cl.literals[-1].lhs, cl.literals[-1].rhs) for cl in con}
    for (a, b) in heads:
        assert (b, a) not in heads or a == b


def test_spec_checks_levels_and_coverage():
    with pytest.raises(LevelViolation):
        TheorySpec(DLO, [Level({"f": 1}, clauses_of(Forall([x], Atom("<=", f(x), g(x))))),
                         Level({"g": 1})])
    with pytest.raises(SpecError):
        TheorySpec(DLO, [Level({"f": 1}, [Clause((Atom("<=", x, c),))])])
    with pytest.raises(SpecError):
        TheorySpec(DLO, [Level({"f": 1}, [Clause((Atom("<=", x, y), Atom("<=", f(x), c)))])])


def test_instance_terms_include_seeds_of_the_level():
    spec = case_split_spec()
    G = [Atom("<", g(c1), c)]
    assert instance_terms(spec, 2, G) == [g(c1)]
    assert instance_terms(spec, 2, G, [g(c2), f(c2)]) == [g(c1), g(c2)]


def test_semi_galois_chain_is_unsat_and_pure():
    spec = sgc_spec()
    G = fixture("sgc_tord.hx").goal
    reduced, steps = reduce_chain(spec, G)
    assert len(steps) == 1
    for item in reduced:
        terms = item.subterms() if isinstance(item, Clause) else formula_subterms(item)
        assert not any(isinstance(s, App) for s in terms)
    assert decide_ground_sat(spec.base, reduced) is Verdict.UNSAT


def test_semi_galois_dropping_a_goal_literal_is_sat():
    spec = sgc_spec()
    a, b, d = Const("a"), Const("b"), Const("d")
    G = [Atom("<=", d, g(a)), Atom("<=", b, d), Not(Atom("<=", f(b), c))]
    assert decide_sat_extension(spec, G) is Verdict.SAT


def test_case_split_chain_reduces_level_by_level():
    spec = case_split_spec()
    G = fixture("monotone_g.hx").goal
    reduced, steps = reduce_chain(spec, G)
    assert [s.level for s in steps] == [2, 1]
    assert len(steps[0].instances) == 4
    assert set(steps[1].defs.values()) == {f(c1), f(c2), h(c1), h(c2)}
    # f and h are free: the decreasing g is satisfiable
    assert decide_ground_sat(spec.base, reduced) is Verdict.SAT


def test_seed_terms_are_renamed_through_earlier_levels():
    spec = case_split_spec()
    G = fixture("monotone_g.hx").goal
    _, steps = reduce_chain(spec, G, seeds=[g(c)])
    assert g(c) in steps[0].instance_terms
    assert any(t == f(c) for t in steps[1].defs.values())


def test_term_closure_is_subterm_closed():
    K = clauses_of(Forall([x], Atom("<=", f(x), f(c))))
    out = term_closure(K, [g(f(f(c1)))], {"f"})
    assert out >= {f(c), f(f(c1)), f(c1)}


def test_entailment_with_free_functions():
    assert decide_entails_uif(DLO, Atom("=", c1, c2), Atom("=", f(c1), f(c2)))
    assert not decide_entails_uif(DLO, Atom("<=", c1, c2), Atom("<=", f(c1), f(c2)))
    assert decide_entails_uif(DLO, Atom("<", f(c1), f(c2)), Not(Atom("=", c1, c2)))


def test_locality_against_full_instantiation():
    """Instances over est(K, G) decide the same as instances over a larger term set."""
    spec = sgc_spec(BaseTheory.DLO)
    rng = random.Random(3)
    pool = [Const(n) for n in "abcd"]
    for _ in range(40):
        lits = []
        for _ in range(rng.randint(2, 4)):
            s = rng.choice(pool + [f(rng.choice(pool)), g(rng.choice(pool))])
            t = rng.choice(pool + [f(rng.choice(pool)), g(rng.choice(pool))])
            a = Atom(rng.choice(["<=", "<"]), s, t)
            lits.append(a if rng.random() < 0.7 else Not(a))
        extra = [App(fn, [p]) for fn in "fg" for p in pool]
        assert decide_sat_extension(spec, lits) is decide_sat_extension(spec, lits, seeds=extra)
