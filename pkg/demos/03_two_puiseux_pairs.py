"""Vertical groups, trunk and approximate roots for x = t^4, y = t^6 + t^7."""

# %%
from embedded_nash import (
    approximate_root,
    build_minimal_graph,
    contact_components,
    derive_invariants,
    separating_graph,
    validate_branch,
)
from embedded_nash.contact import classify

br = validate_branch(4, [6, 7])
inv = derive_invariants(br)
print("r =", inv.r, " kappa =", inv.kappa, " N_R =", inv.rupture_N, " nu_R =", inv.rupture_nu)

gamma = build_minimal_graph(br)
for vid in gamma.sorted_ids():
    v = gamma.vertices[vid]
    where = classify(inv, v).region if v.is_exceptional else "-"
    print(f"{vid:8} N={v.N:<3} nu={v.nu:<3} {where}")

# %% [markdown]
# Contact loci at a few orders. Group 2 collapses onto its rupture divisor when
# that divisor is essential.

# %%
for m in (12, 24, 26, 36, 39, 52):
    for c in contact_components(br, m):
        fim = " ".join(f"{v}x{k}" for v, k in c.fim.entries)
        print(f"m={m:2d} {c.label:18} rep={c.representative:8} codim={c.codim:<3} fim={fim}")

# %% [markdown]
# Below the second level, the graph of the branch is the graph of its first
# approximate root (the cusp) with every N scaled by r_2 = 2.

# %%
root = approximate_root(br, 1)
big, small = separating_graph(br, 24), separating_graph(root, 12)
for vid in big.sorted_ids():
    v = big.vertices[vid]
    if v.is_exceptional and v.level == 0:
        w = small.vertices[vid]
        print(f"{vid:8} N={v.N:<3} = 2 x {w.N:<3} nu={v.nu} = {w.nu}")
