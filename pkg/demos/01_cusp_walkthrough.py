"""The cusp y^2 = x^3 from its resolution graph to its contact loci."""

# %%
from embedded_nash import (
    build_minimal_graph,
    contact_components,
    dlt_set,
    essential_set,
    lct_m,
    separating_graph,
    validate_branch,
)

cusp = validate_branch(2, [3])
gamma = build_minimal_graph(cusp)
for vid in gamma.sorted_ids():
    v = gamma.vertices[vid]
    print(f"{vid:8} N={v.N:<3} nu={v.nu:<3} {' '.join(v.aliases)}")
print("edges:", gamma.sorted_edges())

# %% [markdown]
# Refining to m = 12 inserts a vertex on every edge whose labels sum to at most 12.

# %%
g12 = separating_graph(cusp, 12)
print(len(g12.vertices), "vertices after refinement")
print("essential:", g12.sorted_ids(essential_set(g12, 12)))
print("dlt:      ", g12.sorted_ids(dlt_set(g12, 12)))
print("lct_12 =", lct_m(g12, 12))

# %% [markdown]
# Components of the contact locus for a range of m. An empty row means no arc
# has contact order exactly m with the cusp.

# %%
for m in range(1, 19):
    comps = contact_components(cusp, m)
    row = ", ".join(f"{c.label}@{c.representative} codim {c.codim}" for c in comps)
    print(f"m={m:2d}  {row or '(empty)'}")
