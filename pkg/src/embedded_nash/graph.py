"""Dual graphs of the minimal log resolution and their m-separating refinements.

Branch-mode vertices carry Stern-Brocot coordinates ``(r, s)`` at a level
``j``: the divisor with monomial valuation ``v(x_j) = s``, ``v(y_j - psi_j) = r``
in the level-j chart.  Level ``j`` is bounded by the divisor anchor
``E_{R_j}`` (coordinates ``(0, 1)``) and the curve anchor (coordinates
``(1, 0)``): the x-axis at level 0, the approximate root ``C_j`` for
``0 < j < g`` and the strict transform at level ``g``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Any, Iterable, Mapping, Optional

import networkx as nx
from networkx.algorithms.connectivity import build_auxiliary_node_connectivity, local_node_connectivity
from networkx.algorithms.flow import build_residual_network

from .branch import DerivedInvariants, PlaneBranch, derive_invariants, euclid_trace
from .errors import (
    CriteriaDisagree,
    DanglingEdge,
    LabelMismatch,
    LevelOutOfRange,
    MalformedDocument,
    NonPositiveLabel,
    NotCoprime,
    SeparationMismatch,
    UnknownVertex,
)

EXCEPTIONAL = "exceptional"
STRICT = "strict_transform"
ST_ID = "ST"


@dataclass(frozen=True)
class GraphVertex:
    id: str
    kind: str
    N: int
    nu: int
    level: Optional[int] = None
    coords: Optional[tuple[int, int]] = None
    is_rupture: bool = False
    over_sigma: bool = True
    rupture_index: Optional[int] = None
    # generic mode: (u, v, a, b) meaning N = a*N_u + b*N_v along the original edge u-v
    basis: Optional[tuple[str, str, int, int]] = None

    @property
    def aliases(self) -> tuple[str, ...]:
        return (f"R{self.rupture_index}",) if self.rupture_index else ()

    @property
    def is_exceptional(self) -> bool:
        return self.kind == EXCEPTIONAL


@dataclass(frozen=True)
class DualGraph:
    vertices: Mapping[str, GraphVertex]
    edges: frozenset
    separation: int = 1
    source: Optional[PlaneBranch] = None
    _nx: Any = field(default=None, compare=False, repr=False)

    @property
    def is_branch(self) -> bool:
        return self.source is not None

    def nx_graph(self) -> nx.Graph:
        if self._nx is None:
            g = nx.Graph()
            g.add_nodes_from(self.vertices)
            g.add_edges_from(tuple(e) for e in self.edges)
            object.__setattr__(self, "_nx", g)
        return self._nx

    def neighbors(self, vid: str) -> list[str]:
        return sorted(self.nx_graph().neighbors(vid), key=self.sort_key)

    def degree(self, vid: str) -> int:
        return self.nx_graph().degree(vid)

    def sort_key(self, vid: str) -> tuple:
        v = self.vertices[vid]
        if v.kind == STRICT and self.is_branch:
            return (1, 0, Fraction(0), vid)
        if v.level is not None and v.coords is not None:
            return (0, v.level, Fraction(v.coords[0], v.coords[1]), vid)
        return (2, 0, Fraction(0), vid)

    def sorted_ids(self, ids: Optional[Iterable[str]] = None) -> list[str]:
        return sorted(self.vertices if ids is None else ids, key=self.sort_key)

    def sorted_edges(self) -> list[tuple[str, str]]:
        out = []
        for e in self.edges:
            a, b = sorted(e, key=self.sort_key)
            out.append((a, b))
        return sorted(out, key=lambda p: (self.sort_key(p[0]), self.sort_key(p[1])))

    def resolve_id(self, name: str) -> str:
        """Accept a vertex id, an R<j> alias or the short form ``j:r/s``."""
        if name in self.vertices:
            return name
        for v in self.vertices.values():
            if name in v.aliases:
                return v.id
        if not name.startswith("L") and ":" in name and f"L{name}" in self.vertices:
            return f"L{name}"
        raise UnknownVertex(f"no vertex {name!r} in the graph")

    def label_multiset(self) -> list[tuple[int, int]]:
        return sorted((v.N, v.nu) for v in self.vertices.values())


def _edge(a: str, b: str) -> frozenset:
    return frozenset((a, b))


def vertex_id(level: int, r: int, s: int) -> str:
    return f"L{level}:{r}/{s}"


# -- labels -----------------------------------------------------------------


def divisor_label(inv: DerivedInvariants, level: int, r: int, s: int) -> tuple[int, int]:
    """Closed form (N, nu) of the divisor E_(r,s) at the given level."""
    if not 0 <= level <= inv.g:
        raise LevelOutOfRange(f"level {level} outside 0..{inv.g}")
    if r < 0 or s < 0 or gcd(r, s) != 1:
        raise NotCoprime(f"coordinates ({r},{s}) are not a coprime pair")
    n_r, nu_r = inv.rupture_N[level], inv.rupture_nu[level]
    if level < inv.g:
        big_n = min(r * inv.r[level], s * inv.kappa[level]) + s * n_r
    else:
        big_n = r + s * n_r
    return big_n, r + s * nu_r


def stern_brocot_path(p: int, q: int) -> list[tuple[int, int]]:
    """Nodes (r, s) from 1/1 down to p/q in the Stern-Brocot tree."""
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise NotCoprime(f"({p},{q}) is not a coprime pair of positive integers")
    lo, hi = (0, 1), (1, 0)
    path = []
    target = Fraction(p, q)
    while True:
        node = (lo[0] + hi[0], lo[1] + hi[1])
        path.append(node)
        val = Fraction(*node)
        if val == target:
            return path
        if target > val:
            lo = node
        else:
            hi = node


def euclid_chain_label(inv: DerivedInvariants, level: int, a: int, b: int) -> int:
    """N of the divisor E_{a,b} at a level below g, chunked by the Euclidean trace."""
    c0, c1 = inv.kappa[level], inv.r[level]
    tr = euclid_trace(c0, c1)
    path = stern_brocot_path(inv.kappa_hat[level], inv.r_hat[level])
    idx = sum(tr.eta[: a - 1]) + b - 1
    s = path[idx][1]
    base = s * (c0 + inv.rupture_N[level])
    if a % 2 == 0:
        return base
    c = tr.c
    extra = sum(tr.eta[i - 1] * c[i] for i in range(1, a - 1, 2)) + b * c[a] - c0
    return base + extra


def level_chunks(inv: DerivedInvariants, level: int) -> list[tuple[int, int, tuple[int, int]]]:
    """(a, b, coords) of the divisors created at a level below g, in order of appearance."""
    tr = euclid_trace(inv.kappa[level], inv.r[level])
    path = stern_brocot_path(inv.kappa_hat[level], inv.r_hat[level])
    out = []
    it = iter(path)
    for a, eta in enumerate(tr.eta, start=1):
        for b in range(1, eta + 1):
            out.append((a, b, next(it)))
    return out


# -- minimal resolution -----------------------------------------------------


@lru_cache(maxsize=None)
def build_minimal_graph(branch: PlaneBranch) -> DualGraph:
    """Dual graph of the minimal log resolution of the branch."""
    inv = derive_invariants(branch)
    g = inv.g
    verts: dict[str, GraphVertex] = {}
    edges: set[frozenset] = set()
    ruptures = {0: None}

    def add(level: int, rs: tuple[int, int], rupture: Optional[int] = None) -> str:
        big_n, nu = divisor_label(inv, level, *rs)
        vid = vertex_id(level, *rs)
        verts[vid] = GraphVertex(
            id=vid, kind=EXCEPTIONAL, N=big_n, nu=nu, level=level, coords=rs,
            is_rupture=rupture is not None, over_sigma=True, rupture_index=rupture,
        )
        return vid

    for j in range(g):
        target = (inv.kappa_hat[j], inv.r_hat[j])
        path = stern_brocot_path(*target)
        ids = [add(j, rs, j + 1 if rs == target else None) for rs in path]
        ruptures[j + 1] = vertex_id(j, *target)
        chain = sorted(ids, key=lambda v: Fraction(*verts[v].coords))
        for a, b in zip(chain, chain[1:]):
            edges.add(_edge(a, b))
        if j >= 1:
            edges.add(_edge(ruptures[j], chain[0]))
    if g == 0:
        last = add(0, (1, 1))
    else:
        last = ruptures[g]
    verts[ST_ID] = GraphVertex(id=ST_ID, kind=STRICT, N=1, nu=1, level=g, over_sigma=False)
    edges.add(_edge(last, ST_ID))
    return DualGraph(verts, frozenset(edges), 1, branch)


def rupture_id(graph: DualGraph, j: int) -> str:
    for v in graph.vertices.values():
        if v.rupture_index == j:
            return v.id
    raise UnknownVertex(f"no rupture divisor R{j}")


# -- refinement -------------------------------------------------------------


def _frame_coords(v: GraphVertex, level: int) -> tuple[int, int]:
    if v.kind == STRICT:
        return (1, 0)
    if v.level == level:
        return v.coords  # type: ignore[return-value]
    if v.rupture_index == level:
        return (0, 1)
    raise MalformedDocument(f"vertex {v.id} has no coordinates in the level-{level} frame")


def _insert_branch(inv: DerivedInvariants, u: GraphVertex, w: GraphVertex) -> GraphVertex:
    level = max(u.level, w.level)  # type: ignore[type-var]
    cu, cw = _frame_coords(u, level), _frame_coords(w, level)
    rs = (cu[0] + cw[0], cu[1] + cw[1])
    big_n, nu = u.N + w.N, u.nu + w.nu
    if (big_n, nu) != divisor_label(inv, level, *rs):
        raise LabelMismatch(
            f"insertion between {u.id} and {w.id} gives (N,nu)=({big_n},{nu}) "
            f"but the closed form at level {level}, {rs} is {divisor_label(inv, level, *rs)}"
        )
    return GraphVertex(id=vertex_id(level, *rs), kind=EXCEPTIONAL, N=big_n, nu=nu, level=level, coords=rs)


def _generic_frame(v: GraphVertex, base: tuple[str, str]) -> tuple[int, int]:
    if v.basis is not None:
        return v.basis[2], v.basis[3]
    return (1, 0) if v.id == base[0] else (0, 1)


def _insert_generic(u: GraphVertex, w: GraphVertex) -> GraphVertex:
    if u.basis is not None:
        base = u.basis[:2]
    elif w.basis is not None:
        base = w.basis[:2]
    else:
        base = tuple(sorted((u.id, w.id)))
    cu, cw = _generic_frame(u, base), _generic_frame(w, base)
    a, b = cu[0] + cw[0], cu[1] + cw[1]
    return GraphVertex(
        id=f"{base[0]}~{base[1]}:{a}/{b}", kind=EXCEPTIONAL, N=u.N + w.N, nu=u.nu + w.nu,
        over_sigma=u.over_sigma or w.over_sigma, basis=(base[0], base[1], a, b),
    )


def refine_m_separating(graph: DualGraph, m: int, rng: Optional[random.Random] = None) -> DualGraph:
    """Insert N_i + N_j on every edge with N_i + N_j <= m until none is left.

    ``rng`` picks the next edge at random, which exercises confluence.
    """
    if m < graph.separation:
        raise SeparationMismatch(f"graph is already {graph.separation}-separating, cannot refine to {m}")
    inv = derive_invariants(graph.source) if graph.is_branch else None
    verts = dict(graph.vertices)
    edges = set(graph.edges)
    pending = [e for e in edges if sum(verts[x].N for x in e) <= m]
    while pending:
        if rng is None:
            e = pending.pop()
        else:
            e = pending.pop(rng.randrange(len(pending)))
        u, w = sorted(e)
        vu, vw = verts[u], verts[w]
        new = _insert_branch(inv, vu, vw) if inv is not None else _insert_generic(vu, vw)
        if new.id in verts:
            raise MalformedDocument(f"refinement produced duplicate vertex {new.id}")
        verts[new.id] = new
        edges.discard(e)
        for x in (u, w):
            ne = _edge(x, new.id)
            edges.add(ne)
            if verts[x].N + new.N <= m:
                pending.append(ne)
    return DualGraph(verts, frozenset(edges), m, graph.source)


@lru_cache(maxsize=None)
def separating_graph(branch: PlaneBranch, m: int) -> DualGraph:
    """Gamma_m of a branch (cached)."""
    return refine_m_separating(build_minimal_graph(branch), m)


# -- valuation sets ---------------------------------------------------------


def _check_sep(graph: DualGraph, m: int) -> None:
    if graph.separation != m:
        raise SeparationMismatch(f"graph is {graph.separation}-separating, not {m}-separating")


def essential_set(graph: DualGraph, m: int) -> set[str]:
    _check_sep(graph, m)
    return {v.id for v in graph.vertices.values() if v.is_exceptional and v.over_sigma and m % v.N == 0}


def distinguished_vertices(graph: DualGraph) -> set[str]:
    """Strict transforms and vertices of valence at least three."""
    return {v.id for v in graph.vertices.values() if v.kind == STRICT or graph.degree(v.id) >= 3}


def _dlt_by_paths(graph: DualGraph, cand: Iterable[str]) -> set[str]:
    g = graph.nx_graph()
    dist = distinguished_vertices(graph)
    sink = object()
    h = g.copy()
    h.add_node(sink)
    h.add_edges_from((d, sink) for d in dist)
    aux = build_auxiliary_node_connectivity(h)
    residual = build_residual_network(aux, "capacity")
    out = set()
    for v in cand:
        if v in dist:
            comp = nx.node_connected_component(g, v)
            if len(comp & dist) >= 2:
                out.add(v)
        elif nx.has_path(h, v, sink) and local_node_connectivity(h, v, sink, auxiliary=aux, residual=residual) >= 2:
            out.add(v)
    return out


def _dlt_by_chains(graph: DualGraph, cand: Iterable[str]) -> set[str]:
    def anchored(x: str) -> bool:
        return graph.vertices[x].kind == STRICT or graph.degree(x) >= 3

    out = set()
    for v in cand:
        if anchored(v):
            out.add(v)
            continue
        if graph.degree(v) != 2:
            continue
        ends = []
        for start in graph.neighbors(v):
            prev, cur = v, start
            while not anchored(cur) and graph.degree(cur) == 2 and cur != v:
                nxt = [y for y in graph.neighbors(cur) if y != prev]
                prev, cur = cur, nxt[0]
            ends.append(cur)
        if all(e != v and anchored(e) for e in ends):
            out.add(v)
    return out


def dlt_set(graph: DualGraph, m: int) -> set[str]:
    """S_m vertices on paths between distinguished vertices, checked two ways."""
    ess = essential_set(graph, m)
    a = _dlt_by_paths(graph, ess)
    b = _dlt_by_chains(graph, ess)
    if a != b:
        raise CriteriaDisagree(f"path criterion gives {sorted(a)}, chain criterion gives {sorted(b)}")
    return a


def lct_m(graph: DualGraph, m: int) -> Optional[Fraction]:
    ess = essential_set(graph, m)
    if not ess:
        return None
    return min(Fraction(graph.vertices[v].nu, graph.vertices[v].N) for v in ess)


def contact_codim(graph: DualGraph, m: int) -> Optional[int]:
    lct = lct_m(graph, m)
    if lct is None:
        return None
    c = m * lct
    assert c.denominator == 1
    return int(c)


def top_contact_set(graph: DualGraph, m: int) -> set[str]:
    lct = lct_m(graph, m)
    if lct is None:
        return set()
    return {v for v in essential_set(graph, m) if Fraction(graph.vertices[v].nu, graph.vertices[v].N) == lct}


# -- generic graphs and export ----------------------------------------------


def load_generic_graph(doc: Mapping[str, Any]) -> DualGraph:
    """Build a graph from ``{"vertices": [...], "edges": [[u, v], ...]}``."""
    if not isinstance(doc, Mapping) or not isinstance(doc.get("vertices"), list) or not isinstance(doc.get("edges"), list):
        raise MalformedDocument("graph document needs arrays 'vertices' and 'edges'")
    verts: dict[str, GraphVertex] = {}
    for item in doc["vertices"]:
        if not isinstance(item, Mapping):
            raise MalformedDocument("vertex entries must be objects")
        try:
            vid, big_n, nu = item["id"], item["N"], item["nu"]
        except KeyError as exc:
            raise MalformedDocument(f"vertex entry missing key {exc}") from None
        kind = item.get("kind", EXCEPTIONAL)
        if not isinstance(vid, str) or not vid:
            raise MalformedDocument("vertex id must be a non-empty string")
        if vid in verts:
            raise MalformedDocument(f"duplicate vertex id {vid!r}")
        if kind not in (EXCEPTIONAL, STRICT):
            raise MalformedDocument(f"vertex {vid!r} has unknown kind {kind!r}")
        for name, val in (("N", big_n), ("nu", nu)):
            if isinstance(val, bool) or not isinstance(val, int):
                raise MalformedDocument(f"vertex {vid!r}: {name} must be an integer")
            if val <= 0:
                raise NonPositiveLabel(f"vertex {vid!r}: {name} = {val} is not positive")
        over = item.get("over_sigma", kind == EXCEPTIONAL)
        if not isinstance(over, bool):
            raise MalformedDocument(f"vertex {vid!r}: over_sigma must be a boolean")
        verts[vid] = GraphVertex(id=vid, kind=kind, N=big_n, nu=nu, over_sigma=over)
    edges = set()
    for item in doc["edges"]:
        if not isinstance(item, (list, tuple)) or len(item) != 2 or not all(isinstance(x, str) for x in item):
            raise MalformedDocument(f"edge {item!r} must be a pair of vertex ids")
        a, b = item
        for x in (a, b):
            if x not in verts:
                raise DanglingEdge(f"edge {item!r} references unknown vertex {x!r}")
        if a == b:
            raise MalformedDocument(f"self-loop at {a!r}")
        edges.add(_edge(a, b))
    sep = doc.get("separation", 1)
    if isinstance(sep, bool) or not isinstance(sep, int) or sep < 1:
        raise MalformedDocument("separation must be a positive integer")
    for e in edges:
        if sum(verts[x].N for x in e) <= sep:
            raise MalformedDocument(f"edge {sorted(e)} violates the declared {sep}-separation")
    return DualGraph(verts, frozenset(edges), sep, None)


def graph_document(graph: DualGraph) -> dict[str, Any]:
    """Serializable description, loadable again by :func:`load_generic_graph`."""
    vs = []
    for vid in graph.sorted_ids():
        v = graph.vertices[vid]
        item: dict[str, Any] = {"id": v.id, "kind": v.kind, "N": v.N, "nu": v.nu, "over_sigma": v.over_sigma}
        if v.level is not None:
            item["level"] = v.level
        if v.coords is not None:
            item["coords"] = list(v.coords)
        if v.is_rupture:
            item["is_rupture"] = True
            item["aliases"] = list(v.aliases)
        vs.append(item)
    return {
        "separation": graph.separation,
        "vertices": vs,
        "edges": [list(e) for e in graph.sorted_edges()],
    }


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: DualGraph, highlight: Iterable[str] = ()) -> str:
    """DOT text; highlighted vertices are filled, the strict transform is a box."""
    hl = set(highlight)
    lines = ["graph dual {"]
    for vid in graph.sorted_ids():
        v = graph.vertices[vid]
        attrs = [f"label={_dot_quote(f'{vid} / N={v.N} ν={v.nu}')}"]
        if v.kind == STRICT:
            attrs.append("shape=box")
        if vid in hl:
            attrs.append("style=filled")
            attrs.append('fillcolor="lightgray"')
        lines.append(f"  {_dot_quote(vid)} [{', '.join(attrs)}];")
    for a, b in graph.sorted_edges():
        lines.append(f"  {_dot_quote(a)} -- {_dot_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

