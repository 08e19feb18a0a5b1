# %% [markdown]
# # Refuting a goal in a chain of function axioms
#
# Two monotone functions `f` and `g` over a total order, linked by
# `x <= g(y) -> f(x) <= y`.  The goal asks for `d <= g(a)`, `a <= c`,
# `b <= d` and `f(b) > c` at once.  Locality lets us replace the axioms by
# their instances over the terms of the goal, purify, and ask a plain
# order-theory question.

# %%
from pathlib import Path

from hierax.base import decide_ground_sat, finite_order_oracle
from hierax.cli import run_cli
from hierax.locality import reduce_chain
from hierax.problem import load_problem

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path("demos")
path = HERE / "problems" / "sgc_tord.hx"
prob = load_problem(path)
print(path.read_text())

# %% [markdown]
# One reduction step: instances of the three axioms, names for `g(a)` and
# `f(b)`, and the congruence instances between same-symbol names.

# %%
reduced, steps = reduce_chain(prob.spec, prob.goal)
step = steps[0]
for c, t in step.defs.items():
    print(f"{c} := {t}")
print(len(step.instances), "instances,", len(step.con0), "congruence instances")

# %% [markdown]
# The base problem is unsatisfiable; enumerating all finite chains agrees.

# %%
print(decide_ground_sat(prob.spec.base, reduced), finite_order_oracle(reduced))

# %% [markdown]
# The command line shows the same sets, one block per line group.

# %%
print(run_cli(["--trace", "1", str(path)]).report)
