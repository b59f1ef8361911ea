"""Build arcs that lift to chosen divisors and read their FIM off a Newton polygon."""

# %%
from fractions import Fraction

from embedded_nash import (
    classify,
    construct_arc,
    contact_order,
    defining_polynomial,
    derive_invariants,
    essential_set,
    fim_formula,
    fim_newton,
    separating_graph,
    validate_branch,
)

br = validate_branch(2, [3])
f = defining_polynomial(br)
print("f =", f)

# %%
inv = derive_invariants(br)
m = 12
g = separating_graph(br, m)
for vid in g.sorted_ids(essential_set(g, m)):
    loc = classify(inv, g.vertices[vid])
    arc = construct_arc(br, loc, Fraction(2), Fraction(-3), m)
    newton = fim_newton(f, arc, br.nu)
    formula = fim_formula(inv, loc, m)
    show = lambda fim: " ".join(f"{v}x{k}" for v, k in fim.entries)
    print(f"{vid:8} {loc.region:9} ord={contact_order(f, arc)}  newton: {show(newton):10} formula: {show(formula)}")

# %% [markdown]
# The same check with a parametrisation that has random coefficients and extra terms.

# %%
import random

from embedded_nash import cross_validate
from embedded_nash.oracle import perturbed_phi

phi = perturbed_phi(br, random.Random(5))
print("phi terms:", [(e, str(c)) for e, c in phi])
print("pass:", cross_validate(br, 24, trials=2, seed=1, phi=phi)["pass"])
