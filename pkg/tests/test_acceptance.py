"""Acceptance suite: one test per criterion, summarized at the end of the run."""
import random

from gen import (PROBLEMS, case_split_goal, case_split_spec, fixture,
                 instances_over, order_clauses, qe_formula)
from hierax.base import (BaseTheory, decide_entails, decide_ground_sat,
                         finite_order_oracle, qe, vs_qe)
from hierax.core import (And, App, Atom, Const, Implies, Var, Verdict,
                         clauses_of, conj, replace_terms, substitute, subterms)
from hierax.interpolation import (SharedConstants, SubtermOnly,
                                  closure_apply, ground_subterms)
from hierax.cli import run_cli
from hierax.locality import (decide_entails_uif, decide_sat_extension,
                             term_closure)
from hierax.problem import parse_formula
from hierax.report import read_trace
from hierax.symelim import ground_constraint, symbol_eliminate

DLO = BaseTheory.DLO
FRESH = [Const("k1"), Const("k2")]


def _result_line(report: str) -> str:
    lines = [l for l in report.splitlines() if l and not l.startswith(";")]
    return lines[-1]


def _equivalent_instances(phi, psi, pool=FRESH) -> bool:
    a = conj(instances_over(phi, pool))
    b = conj(instances_over(psi, pool))
    return decide_entails_uif(DLO, a, b) and decide_entails_uif(DLO, b, a)


def _literals(fs):
    out = set()
    for f in fs:
        out |= set(f.args) if isinstance(f, And) else {f}
    return out


def test_semi_galois_refutation_matches_reduction_tables(criterion):
    path = str(PROBLEMS / "sgc_tord.hx")
    prob = fixture("sgc_tord.hx")
    with criterion("1. semi-Galois goal is UNSAT with the expected Def, K0, G0, Con0", limit=1.0) as clock:
        res = clock(run_cli, ["--task", "sat", "--trace", "2", path])
        assert res.code == 0
        assert _result_line(res.report) == "UNSAT"
        blocks = read_trace(res.report, prob)
        rename = {}
        for d in blocks["defs"]:
            rename[d.lhs] = {"(g a)": Const("a1"), "(f b)": Const("b1")}[str(d.rhs)]
        got = {k: [substitute(f, rename) for f in v] for k, v in blocks.items()}
        p = lambda s: parse_formula(s, prob)  # noqa: E731
        assert set(got["defs"]) == {p("(= a1 (g a))"), p("(= b1 (f b))")}
        assert _literals(got["g0"]) == {p("(<= d a1)"), p("(<= a c)"), p("(<= b d)"), p("(not (<= b1 c))")}
        clauses = lambda fs: {cl for f in fs for cl in clauses_of(f)}  # noqa: E731
        assert clauses(got["k0"]) == clauses([p("(=> (<= b a1) (<= b1 a))"),
                                              p("(=> (<= a a) (<= a1 a1))"),
                                              p("(=> (<= b b) (<= b1 b1))")])
        assert clauses(got["con0"]) == clauses([p("(=> (= a a) (= a1 a1))"),
                                                p("(=> (= b b) (= b1 b1))")])


def test_monotonicity_constraint_for_case_split_function(criterion):
    path = str(PROBLEMS / "monotone_g.hx")
    prob = fixture("monotone_g.hx")
    expected = parse_formula(
        "(forall (z1 z2) (and (=> (and (< z1 z2) (<= z2 c)) (<= (f z1) (f z2)))"
        " (=> (and (<= z1 c) (< c z2)) (<= (f z1) (h z2)))"
        " (=> (and (< c z1) (< z1 z2)) (<= (h z1) (h z2)))))", prob)
    with criterion("2. case-split monotonicity constraint is equivalent to the reference", limit=2.0) as clock:
        res = clock(run_cli, ["--task", "symelim", path])
        assert res.code == 0
        got = parse_formula(_result_line(res.report), prob)
        assert _equivalent_instances(got, expected)


def test_constraint_with_free_functions(criterion):
    prob = fixture("bounded_h.hx")
    expected = parse_formula("(forall (y) (<= (h y) y))", prob)
    with criterion("3. free g, parameter h: constraint equivalent to h(y) <= y", limit=1.0) as clock:
        res = clock(run_cli, ["--task", "symelim", str(PROBLEMS / "bounded_h.hx")])
        assert res.code == 0
        got = parse_formula(_result_line(res.report), prob)
        assert _equivalent_instances(got, expected)


def test_semi_galois_interpolant(criterion):
    prob = fixture("sgc_interp.hx")
    with criterion("4. semi-Galois interpolant verified and equivalent to f(d) <= c", limit=1.0) as clock:
        res = clock(run_cli, ["--task", "interpolate", str(PROBLEMS / "sgc_interp.hx")])
        assert res.code == 0
        assert "A and not I unsat PASS, B and I unsat PASS, shared symbols PASS" in res.report
        got = parse_formula(_result_line(res.report), prob)
        assert _equivalent_instances(got, parse_formula("(<= (f d) c)", prob))


def test_case_split_interpolant(criterion):
    prob = fixture("case_split_interp.hx")
    expected = parse_formula(
        "(or (and (< c1 c2) (<= c2 c) (> (f c1) (f c2)))"
        " (and (<= c1 c) (< c c2) (> (f c1) (h c2)))"
        " (and (< c c1) (< c1 c2) (> (h c1) (h c2))))", prob)
    with criterion("5. case-split interpolant verified and equivalent to the three-case formula", limit=2.0) as clock:
        res = clock(run_cli, ["--task", "interpolate", str(PROBLEMS / "case_split_interp.hx")])
        assert res.code == 0
        assert "A and not I unsat PASS, B and I unsat PASS, shared symbols PASS" in res.report
        got = parse_formula(_result_line(res.report), prob)
        assert _equivalent_instances(got, expected)


def _constraint_blocks_goal(spec, G) -> bool:
    insts = ground_constraint(symbol_eliminate(spec, G))
    return decide_sat_extension(spec, list(G) + insts) is Verdict.UNSAT


def test_constraint_makes_goal_unsat(criterion):
    with criterion("6. adding the constraint makes the goal UNSAT (fixtures + 100 random)"):
        failures = []
        for name in sorted(p.name for p in PROBLEMS.glob("*.hx")):
            prob = fixture(name)
            if prob.task == "symelim" and not _constraint_blocks_goal(prob.spec, prob.goal):
                failures.append(name)
        spec = case_split_spec()
        rng = random.Random(6)
        for _ in range(100):
            G = case_split_goal(rng)
            if not _constraint_blocks_goal(spec, G):
                failures.append(G)
        assert failures == []


def test_larger_instance_sets_give_weaker_constraints(criterion):
    spec = case_split_spec()
    prob = fixture("monotone_g.hx")
    pool = [parse_formula(f"(= {t} {t})", prob).lhs for t in ["(g c3)", "(g c)", "(g (h c2))"]]
    rng = random.Random(7)
    cache = {}

    def constraint(T):
        key = tuple(t for t in pool if t in T)
        if key not in cache:
            cache[key] = ground_constraint(symbol_eliminate(spec, prob.goal, list(key)))
        return cache[key]

    with criterion("7. T1 subset of T2: constraint instances for T1 entail those for T2"):
        failures = []
        for _ in range(50):
            t2 = [t for t in pool if rng.random() < 0.6]
            t1 = [t for t in t2 if rng.random() < 0.5]
            g1 = conj(cl.to_formula() for cl in constraint(t1))
            if not all(decide_entails_uif(DLO, g1, cl.to_formula()) for cl in constraint(t2)):
                failures.append((t1, t2))
        assert failures == []


def test_quantifier_elimination_and_order_oracles(criterion):
    with criterion("8. QE agrees with virtual substitution; TOrd agrees with enumeration", limit=30.0) as clock:
        bad = []

        def run():
            rng = random.Random(8)
            for th in (BaseTheory.DLO, BaseTheory.LRA, BaseTheory.EQ):
                for _ in range(500):
                    phi = qe_formula(rng, th)
                    a, b = qe(th, phi), vs_qe(th, phi)
                    if not (decide_entails(th, a, b) and decide_entails(th, b, a)):
                        bad.append((th, phi))
            for _ in range(500):
                G = order_clauses(rng)
                if decide_ground_sat(BaseTheory.TORD, G) is not finite_order_oracle(G):
                    bad.append(G)

        clock(run)
        assert bad == []


def _random_terms(rng, consts, k):
    fns = [("f", 1), ("g", 1), ("p", 2)]
    out = set()
    for _ in range(k):
        t = rng.choice(consts)
        for _ in range(rng.randint(0, 2)):
            name, n = rng.choice(fns)
            t = App(name, [t] + [rng.choice(consts) for _ in range(n - 1)])
        out.add(t)
    return out


def _closure_axioms():
    """Clauses with a signature constant and a ground function term."""
    x, k0 = Var("x"), Const("k0")
    return (clauses_of(Implies(Atom("<=", x, k0), Atom("=", App("g", [x]), App("f", [x]))))
            + clauses_of(Implies(Atom("<=", x, App("f", [k0])), Atom("<=", App("p", [x, x]), x))))


def _consts(terms):
    return {s for t in terms for s in subterms(t) if isinstance(s, Const)}


def _apply(h, terms):
    return {replace_terms(t, h) for t in terms}


def _amalgamation_violations(W, K, rng, pool):
    TA = _random_terms(rng, pool[: rng.randint(2, len(pool))], rng.randint(1, 4))
    TB = _random_terms(rng, pool[rng.randint(0, 2):], rng.randint(1, 4))
    w = set(closure_apply(W, K, TA, TB))
    bad = []
    if not ground_subterms(K) | ground_subterms(TA) <= w:
        bad.append("contains st(K) and st(T_A)")
    TA2 = TA | _random_terms(rng, pool, 2)
    TB2 = TB | _random_terms(rng, pool, 2)
    if not w <= set(closure_apply(W, K, TA2, TB2)):
        bad.append("monotone")
    wb = set(closure_apply(W, K, TB, TA))
    if not set(closure_apply(W, K, w, wb)) <= w:
        bad.append("closure")
    ca, cb = _consts(ground_subterms(TA)), _consts(ground_subterms(TB))
    while True:
        h = {a: rng.choice(pool) for a in pool}
        if all(h[a] != h[b] for a in ca - cb for b in cb - ca):
            break
    if set(closure_apply(W, K, _apply(h, TA), _apply(h, TB))) != _apply(h, w):
        bad.append("compatible with constant maps")
    if not _consts(w) - _consts(ground_subterms(K)) <= ca:
        bad.append("T_A-pure")
    return bad


def _identity_violations(K, rng, pool):
    fns = {"f", "g", "p"}
    T = _random_terms(rng, pool, rng.randint(1, 4))
    psi = term_closure(K, T, fns)
    bad = []
    est = {s for t in ground_subterms(K) | ground_subterms(T)
           for s in [t] if isinstance(s, App) and s.fn in fns}
    if not est <= psi:
        bad.append("contains est")
    if not psi <= term_closure(K, T | _random_terms(rng, pool, 2), fns):
        bad.append("monotone")
    if not term_closure(K, psi, fns) <= psi:
        bad.append("idempotent")
    h = {a: rng.choice(pool) for a in pool + [Const("k0")]}
    hK = [cl.map(lambda t: replace_terms(t, h)) for cl in K]
    if _apply(h, psi) != term_closure(hK, _apply(h, T), fns):
        bad.append("compatible with constant maps")
    return bad


def test_closure_operator_axioms(criterion):
    K = _closure_axioms()
    pool = [Const(n) for n in "abcde"]
    closures = [SharedConstants((("f", 1), ("g", 1))), SharedConstants((("p", 2),)), SubtermOnly()]
    rng = random.Random(9)
    with criterion("9. built-in amalgamation closures and the identity term closure satisfy their axioms"):
        failures = []
        for W in closures:
            for _ in range(200):
                failures += [(W, v) for v in _amalgamation_violations(W, K, rng, pool)]
        for _ in range(200):
            failures += [("identity", v) for v in _identity_violations(K, rng, pool)]
        assert failures == []
