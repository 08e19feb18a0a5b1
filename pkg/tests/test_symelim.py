import random

from gen import c, c1, c2, case_split_goal, case_split_spec, f, fixture, g, h
from hierax.base import BaseTheory, decide_equivalent
from hierax.core import (App, Atom, Const, Not, Or, Quant, TRUE, Var, Verdict, conj,
                         formula_subterms)
from hierax.locality import decide_entails_uif, decide_sat_extension
from hierax.problem import parse_formula
from hierax.symelim import (ground_constraint, instantiate_constraint,
                            steps_1_to_4, symbol_eliminate)

DLO = BaseTheory.DLO


def _only_params_and_base(res, params):
    body = res.constraint.body if isinstance(res.constraint, Quant) else res.constraint
    for s in formula_subterms(body):
        if isinstance(s, App) and s.fn not in params:
            return False
        if isinstance(s, Const) and s.name not in params:
            return False
    return True


def test_partition_of_the_case_split_goal():
    spec = case_split_spec()
    res = steps_1_to_4(spec, fixture("monotone_g.hx").goal)
    defs = res.defs
    named = {defs[k] for k in res.partition.c_f if k in defs}
    assert named == {f(c1), f(c2), h(c1), h(c2)}
    assert set(res.partition.c_p) == {c1, c2}
    assert {defs[k] for k in res.partition.c_rest} == {g(c1), g(c2)}


def test_case_split_constraint_shape():
    spec = case_split_spec()
    res = symbol_eliminate(spec, fixture("monotone_g.hx").goal)
    assert res.ys == [Var("y1"), Var("y2")]
    assert res.y_constants == [c1, c2]
    assert _only_params_and_base(res, {"f", "h", "c"})
    assert len(res.constraint_clauses) == 3


def test_free_parameter_constraint():
    prob = fixture("bounded_h.hx")
    res = symbol_eliminate(prob.spec, prob.goal)
    a = Const("a")
    expected = Atom("<=", h(a), a)
    assert decide_entails_uif(DLO, _ground(res), expected)
    assert decide_entails_uif(DLO, expected, _ground(res))


def _ground(res):
    return conj(cl.to_formula() for cl in ground_constraint(res))


def test_unsat_goal_gives_trivial_constraint():
    spec = case_split_spec()
    G = [Atom("<", g(c1), g(c1))]
    res = symbol_eliminate(spec, G)
    assert res.constraint == TRUE


def test_raw_and_simplified_forms_agree():
    spec = case_split_spec()
    rng = random.Random(21)
    for _ in range(15):
        G = case_split_goal(rng, max_consts=3)
        raw = steps_1_to_4(spec, G, simplify_output=False)
        res = steps_1_to_4(spec, G)
        assert decide_equivalent(DLO, raw.gamma1, res.gamma1)


def test_constraints_only_mention_parameters():
    spec = case_split_spec()
    rng = random.Random(22)
    for _ in range(25):
        res = symbol_eliminate(spec, case_split_goal(rng, max_consts=3))
        assert _only_params_and_base(res, {"f", "h", "c"})


def test_constraint_blocks_goal_and_is_consistent_with_monotone_parameters():
    spec = case_split_spec()
    prob = fixture("monotone_g.hx")
    res = symbol_eliminate(spec, prob.goal)
    G = list(prob.goal)
    assert decide_sat_extension(spec, G + ground_constraint(res)) is Verdict.UNSAT
    # f = h = identity satisfies the constraint
    ident = [Atom("=", App(fn, [k]), k) for fn in "fh" for k in (c1, c2)]
    assert decide_sat_extension(spec, ident + ground_constraint(res)) is Verdict.SAT


def test_ground_constraint_is_one_of_the_instances():
    spec = case_split_spec()
    res = symbol_eliminate(spec, fixture("monotone_g.hx").goal)
    assert set(ground_constraint(res)) <= set(instantiate_constraint(res))
    assert len(instantiate_constraint(res)) <= 4 * len(res.constraint_clauses)


def test_extra_instances_weaken_the_constraint():
    spec = case_split_spec()
    prob = fixture("monotone_g.hx")
    seed = parse_formula("(= (g c) (g c))", prob).lhs
    base = symbol_eliminate(spec, prob.goal)
    more = symbol_eliminate(spec, prob.goal, [seed])
    g1 = conj(cl.to_formula() for cl in ground_constraint(base))
    assert all(decide_entails_uif(DLO, g1, cl.to_formula()) for cl in ground_constraint(more))


def test_negated_goal_literal_keeps_parameters():
    spec = case_split_spec()
    G = [Not(Atom("<=", g(c1), c)), Atom("<=", c1, c)]
    res = symbol_eliminate(spec, G)
    expected = Or((Not(Atom("<=", c1, c)), Atom("<=", f(c1), c)))
    assert decide_entails_uif(DLO, _ground(res), expected)
    assert decide_entails_uif(DLO, expected, _ground(res))


def test_total_order_base_eliminates_in_the_dense_completion():
    dense = symbol_eliminate(case_split_spec(), fixture("monotone_g.hx").goal)
    prob = fixture("monotone_g_tord.hx")
    res = symbol_eliminate(prob.spec, prob.goal)
    assert res.qe_theory is DLO
    assert decide_entails_uif(DLO, _ground(res), _ground(dense))
    assert decide_entails_uif(DLO, _ground(dense), _ground(res))


def test_free_parameter_constraint_over_total_orders():
    prob = fixture("bounded_h.hx")
    spec = prob.spec.__class__(BaseTheory.TORD, prob.spec.levels, prob.spec.params)
    res = symbol_eliminate(spec, prob.goal)
    assert res.qe_theory is DLO
    a = Const("a")
    assert decide_entails_uif(DLO, _ground(res), Atom("<=", h(a), a))
