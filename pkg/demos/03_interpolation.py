# %% [markdown]
# # Ground interpolants in a theory extension
#
# Split an unsatisfiable goal into an `A` part and a `B` part.  The
# interpolant is implied by `A`, inconsistent with `B`, and uses only the
# symbols they share.

# %%
from pathlib import Path

from hierax.interpolation import compute_interpolant, verify_interpolant
from hierax.problem import load_problem

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path("demos")

# %% [markdown]
# The semi-Galois problem: `A` talks about `g`, `a`, `c`, `d`; `B` about
# `f`, `b`, `c`, `d`.  The closure adds `f(d)` to the A-side instances.

# %%
prob = load_problem(HERE / "problems" / "sgc_interp.hx")
rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure)
print(rep.interpolant)
print(verify_interpolant(prob.spec, prob.goal_a, prob.goal_b, rep.interpolant))
for note in rep.notes:
    print("note:", note)

# %% [markdown]
# The case-split problem: `A` has a decreasing pair for `g`; `B` fixes the
# pair on both sides of `c`.  The interpolant enumerates the three ways a
# decreasing pair can arise from `f` and `h`.

# %%
prob = load_problem(HERE / "problems" / "case_split_interp.hx")
rep = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure, params=prob.spec.params)
print(rep.interpolant)
print("verified:", rep.verified)

# %% [markdown]
# Computing from the B-side and negating gives another valid interpolant.
# Here that needs `g`, which the kept symbols exclude, so it is refused;
# on the semi-Galois problem it goes through.

# %%
from hierax.interpolation import SharingError

try:
    compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure,
                        params=prob.spec.params, flip=True)
except SharingError as e:
    print("refused:", e)
prob = load_problem(HERE / "problems" / "sgc_interp.hx")
flipped = compute_interpolant(prob.spec, prob.goal_a, prob.goal_b, prob.closure, flip=True)
print(flipped.interpolant, flipped.verified)
