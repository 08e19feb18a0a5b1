import random

import pytest

from gen import c, c1, c2, f, fixture, g
from hierax.base import BaseTheory
from hierax.core import Atom, Clause, Const, Not, Verdict
from hierax.interpolation import (NotUnsat, SharedConstants, SharingError,
                                  SubtermOnly, audit_symbols, closure_apply,
                                  ground_subterms, separate_instantiate,
                                  compute_interpolant, related_functions,
                                  shared_constants, shared_functions,
                                  verify_interpolant)
from hierax.locality import Level, TheorySpec, decide_entails_uif, decide_sat_extension

DLO = BaseTheory.DLO
a, b, d = Const("a"), Const("b"), Const("d")


def _free(base=DLO, fns=("f",)):
    return TheorySpec(base, [Level({fn: 1 for fn in fns})])


def test_sharing_follows_axiom_links():
    prob = fixture("case_split_interp.hx")
    groups = related_functions(prob.spec)
    assert {"g", "f", "h"} in groups
    assert shared_functions(prob.spec, prob.goal_a, prob.goal_b) == {"f", "g", "h"}


def test_shared_constants_include_axiom_and_signature_constants():
    prob = fixture("case_split_interp.hx")
    assert shared_constants(prob.spec, prob.goal_a, prob.goal_b) == {c, c1, c2}


def test_semi_galois_interpolant_is_verified():
    prob = fixture("sgc_interp.hx")
    rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure)
    assert rep.verified
    assert decide_entails_uif(DLO, rep.interpolant, Atom("<=", f(d), c))
    assert decide_entails_uif(DLO, Atom("<=", f(d), c), rep.interpolant)


def test_flip_gives_a_verified_interpolant():
    prob = fixture("sgc_interp.hx")
    rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure, flip=True)
    assert rep.verified
    assert "computed from the B-side and negated" in rep.notes


def test_satisfiable_pair_raises():
    spec = _free()
    with pytest.raises(NotUnsat):
        compute_interpolant(spec, [Atom("<", c1, c2)], [Atom("<", c2, c)])


def test_eliminating_a_function_the_b_side_needs_is_an_error():
    prob = fixture("case_split_interp.hx")
    with pytest.raises(SharingError):
        compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, SubtermOnly(), params=["g"])


def test_audit_flags_private_symbols():
    spec = _free(fns=("f", "g"))
    A = [Atom("<", f(c1), a)]
    B = [Atom("<", a, f(c1)), Atom("=", g(b), b)]
    problems = audit_symbols(spec, A, B, Atom("<", f(c1), b))
    assert problems == ["constant b is not shared"]
    assert audit_symbols(spec, A, B, Atom("<", g(c1), a)) == ["function g is not shared"]


def test_verify_rejects_a_wrong_interpolant():
    spec = _free()
    A = [Atom("<", f(c1), a)]
    B = [Atom("<", a, f(c1))]
    assert verify_interpolant(spec, A, B, Atom("<", f(c1), a)) == (True, True, [])
    a_ok, b_ok, _ = verify_interpolant(spec, A, B, Atom("<=", a, f(c1)))
    assert not a_ok


def test_interpolants_for_random_free_function_problems():
    spec = _free(fns=("f", "g"))
    rng = random.Random(31)
    shared = [c1, c2]
    only_a, only_b = [a, f(a)], [b, g(b)]
    done = 0
    for _ in range(200):
        def lits(private, k):
            pool = shared + [f(c1), f(c2)] + private
            out = []
            for _ in range(k):
                at = Atom(rng.choice(["<", "<=", "="]), rng.choice(pool), rng.choice(pool))
                out.append(at if rng.random() < 0.75 else Not(at))
            return out
        A, B = lits(only_a, rng.randint(1, 3)), lits(only_b, rng.randint(1, 3))
        if decide_sat_extension(spec, A + B) is Verdict.SAT:
            continue
        rep = compute_interpolant(spec, A, B)
        assert rep.a_entails_i and rep.b_and_i_unsat, (A, B, rep.interpolant)
        assert rep.audit_ok, rep.audit
        done += 1
    assert done >= 20


def test_equality_base_interpolant():
    spec = _free(BaseTheory.EQ)
    A = [Atom("=", c1, a), Atom("=", a, c2)]
    B = [Not(Atom("=", f(c1), f(c2)))]
    rep = compute_interpolant(spec, A, B)
    assert rep.verified


def test_closure_notes():
    prob = fixture("sgc_interp.hx")
    rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, SharedConstants((("f", 1),), ("d",)))
    assert any("treated as A-pure" in n for n in rep.notes)
    prob = fixture("case_split_interp.hx")
    rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure, params=prob.spec.params)
    assert not any("treated as A-pure" in n for n in rep.notes)
    assert rep.verified


def test_report_keeps_both_sides():
    prob = fixture("sgc_interp.hx")
    rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure)
    assert rep.side_a and rep.side_b
    assert g(a) in ground_subterms(rep.side_a)
    assert g(a) not in ground_subterms(rep.side_b)


def test_shared_constant_closure_on_the_semi_galois_pair():
    prob = fixture("sgc_interp.hx")
    W = SharedConstants((("f", 1), ("g", 1)))
    got = set(closure_apply(W, [], prob.goal_a, prob.goal_b))
    st_a = ground_subterms(prob.goal_a)
    assert got == st_a | {f(c), f(d), g(c), g(d)}


def test_semi_galois_sides_separate_the_mixed_instance():
    prob = fixture("sgc_interp.hx")
    side_a, side_b = separate_instantiate(prob.spec, prob.goal_a, prob.goal_b, prob.closure)
    leq = lambda s, t: Atom("<=", s, t)  # noqa: E731
    assert Clause((Not(leq(d, g(a))), leq(f(d), a))) in side_a
    assert Clause((Not(leq(b, d)), leq(f(b), f(d)))) in side_b
