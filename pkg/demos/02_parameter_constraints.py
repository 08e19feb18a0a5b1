# %% [markdown]
# # Which parameters make a case-split function monotone?
#
# `g` equals `f` below the threshold `c` and `h` above it.  Asking for a
# decreasing pair `c1 <= c2`, `g(c1) > g(c2)` and eliminating everything
# except `f`, `h` and `c` yields the weakest universal condition that rules
# the goal out.

# %%
from pathlib import Path

from hierax.core import Atom, App, conj
from hierax.locality import decide_sat_extension
from hierax.problem import load_problem
from hierax.symelim import ground_constraint, symbol_eliminate

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path("demos")
prob = load_problem(HERE / "problems" / "monotone_g.hx")
res = symbol_eliminate(prob.spec, prob.goal)

# %% [markdown]
# The constants are split into parameter-term names, their arguments and
# the rest; the rest is eliminated.

# %%
p = res.partition
print("kept:", *p.c_f)
print("arguments:", *p.c_p)
print("eliminated:", *p.c_rest)

# %%
print(res.gamma2)
print(res.constraint)

# %% [markdown]
# With the constraint added the goal is refuted.  Identity functions
# satisfy the constraint, so it is not trivially false.

# %%
G = list(prob.goal)
print(decide_sat_extension(prob.spec, G + ground_constraint(res)))
c1, c2 = p.c_p
ident = [Atom("=", App(fn, [k]), k) for fn in "fh" for k in (c1, c2)]
print(decide_sat_extension(prob.spec, ident + ground_constraint(res)))

# %% [markdown]
# Free functions: with `g` unconstrained and only `h` kept, the goal
# `a < g(a) < h(a)` leads to `h(y) <= y`.

# %%
prob = load_problem(HERE / "problems" / "bounded_h.hx")
res = symbol_eliminate(prob.spec, prob.goal)
print(res.constraint)
print(conj(cl.to_formula() for cl in ground_constraint(res)))
