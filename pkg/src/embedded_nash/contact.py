"""Vertical groups, trunk, FIM formula and components of the contact locus."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import networkx as nx

from .branch import DerivedInvariants, PlaneBranch, derive_invariants
from .errors import (
    AmbiguousClosestVertex,
    GenericGraphUnsupported,
    InclusionViolated,
    MonotonicityViolated,
    NotDivisible,
    SumInvariantViolated,
    TwoSidedGroupOne,
)
from .graph import (
    DualGraph,
    GraphVertex,
    divisor_label,
    dlt_set,
    essential_set,
    rupture_id,
    separating_graph,
)

TRUNK = "trunk"


@dataclass(frozen=True)
class Location:
    level: int
    coords: tuple[int, int]
    group: Optional[int] = None  # None means trunk

    @property
    def region(self) -> str:
        return TRUNK if self.group is None else f"group({self.group})"


@dataclass(frozen=True)
class FimMultiset:
    entries: tuple[tuple[Fraction, int], ...]
    m: Fraction
    rho: Fraction

    @classmethod
    def from_values(cls, values: list[tuple[Fraction, int]], m, rho) -> "FimMultiset":
        acc: dict[Fraction, int] = defaultdict(int)
        for v, k in values:
            if k:
                acc[Fraction(v)] += k
        return cls(tuple(sorted(acc.items())), Fraction(m), Fraction(rho))

    @property
    def total(self) -> Fraction:
        return sum((v * k for v, k in self.entries), Fraction(0))

    @property
    def count(self) -> int:
        return sum(k for _, k in self.entries)

    @property
    def minimum(self) -> Fraction:
        return self.entries[0][0]

    def same_values(self, other: "FimMultiset") -> bool:
        return self.entries == other.entries


@dataclass(frozen=True)
class ContactComponent:
    kind: str  # "vertical_group", "trunk_singleton" or "smooth_germ"
    group: Optional[int]
    representative: str
    codim: int
    fim: FimMultiset
    members: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"vertical_group({self.group})" if self.kind == "vertical_group" else self.kind


def classify(inv: DerivedInvariants, vertex: GraphVertex) -> Location:
    if vertex.level is None or vertex.coords is None:
        raise GenericGraphUnsupported(f"vertex {vertex.id} carries no level/coordinates")
    j, (r, s) = vertex.level, vertex.coords
    g = inv.g
    if j == g:
        return Location(j, (r, s), None)
    if j == 0:
        return Location(0, (r, s), 1)
    if r * inv.r[j] >= s * inv.kappa[j]:
        return Location(j, (r, s), j + 1)
    return Location(j, (r, s), None)


def _fim_values(inv: DerivedInvariants, level: int, r: int, s: int, rho: Fraction, literal_kappa: bool = False) -> list[tuple[Fraction, int]]:
    j = level
    rr = inv.r  # rr[i - 1] = r_i
    d = rr[j]  # r_{j+1}
    out = []
    for i in range(1, j + 1):
        out.append((Fraction(inv.k_(i) * s) * rho / d, rr[i - 1] - rr[i]))
    base = Fraction(inv.k_(j) * s) * rho / d
    if j < inv.g:
        tail = min(r * rho, Fraction(inv.kappa[j] * s) * rho / d)
    elif literal_kappa:
        tail = min(r * rho, Fraction(s) * rho / d)
    else:
        tail = r * rho
    out.append((base + tail, d))
    return out


def fim_formula(inv: DerivedInvariants, location: Location, m: int, literal_kappa: bool = False) -> FimMultiset:
    """FIM of arcs with contact order m lifting to the divisor at ``location``.

    ``literal_kappa`` evaluates the level-g tail with kappa_{g+1} = 1; the
    result then need not sum to m and is not checked.
    """
    r, s = location.coords
    big_n, _ = divisor_label(inv, location.level, r, s)
    if m % big_n:
        raise NotDivisible(f"N = {big_n} does not divide m = {m}")
    rho = Fraction(m, big_n)
    fim = FimMultiset.from_values(_fim_values(inv, location.level, r, s, rho, literal_kappa), m, rho)
    if not literal_kappa and (fim.total != m or fim.count != inv.branch.nu):
        raise SumInvariantViolated(f"FIM {fim.entries} at {location} sums to {fim.total}, not {m}")
    return fim


def vertex_fim(graph: DualGraph, vid: str, m: int, literal_kappa: bool = False) -> FimMultiset:
    inv = derive_invariants(graph.source)
    return fim_formula(inv, classify(inv, graph.vertices[vid]), m, literal_kappa)


def _closest(graph: DualGraph, target: str, members: list[str]) -> str:
    dist = nx.single_source_shortest_path_length(graph.nx_graph(), target)
    best = min(dist[v] for v in members)
    winners = [v for v in members if dist[v] == best]
    if len(winners) > 1:
        raise AmbiguousClosestVertex(f"{winners} are all at distance {best} from {target}")
    return winners[0]


def contact_components(branch: PlaneBranch, m: int) -> list[ContactComponent]:
    """Irreducible components of the m-contact locus, in canonical order."""
    graph = separating_graph(branch, m)
    inv = derive_invariants(branch)
    ess = essential_set(graph, m)
    if not ess:
        return []

    def codim(vid: str) -> int:
        v = graph.vertices[vid]
        c = Fraction(m * v.nu, v.N)
        assert c.denominator == 1
        return int(c)

    if inv.g == 0:
        members = graph.sorted_ids(ess)
        rep = _closest(graph, "ST", members)
        return [ContactComponent("smooth_germ", None, rep, codim(rep), vertex_fim(graph, rep, m), tuple(members))]

    groups: dict[int, list[str]] = defaultdict(list)
    trunk: list[str] = []
    for vid in ess:
        loc = classify(inv, graph.vertices[vid])
        if loc.group is None:
            trunk.append(vid)
        else:
            groups[loc.group].append(vid)
    out = []
    for j in sorted(groups):
        members = graph.sorted_ids(groups[j])
        rj = rupture_id(graph, j)
        if j == 1 and rj not in ess:
            kh, rh = inv.kappa_hat[0], inv.r_hat[0]
            sides = {(graph.vertices[v].coords[0] * rh > graph.vertices[v].coords[1] * kh) for v in members}
            if len(sides) > 1:
                raise TwoSidedGroupOne(f"S_{m} meets both legs of R1: {members}")
        rep = _closest(graph, rj, members)
        out.append(ContactComponent("vertical_group", j, rep, codim(rep), vertex_fim(graph, rep, m), tuple(members)))

    def trunk_key(vid: str) -> tuple:
        v = graph.vertices[vid]
        return (v.level, Fraction(v.coords[1], v.coords[0]))

    for vid in sorted(trunk, key=trunk_key):
        out.append(ContactComponent("trunk_singleton", None, vid, codim(vid), vertex_fim(graph, vid, m), (vid,)))
    return out


def verify_inclusions(branch: PlaneBranch, m: int) -> dict:
    """dlt, contact and essential m-valuations with the inclusion chain checked."""
    graph = separating_graph(branch, m)
    ess = essential_set(graph, m)
    dlt = dlt_set(graph, m)
    contact = {c.representative for c in contact_components(branch, m)}
    if not dlt <= contact:
        raise InclusionViolated(f"dlt {sorted(dlt - contact)} not among contact valuations")
    if not contact <= ess:
        raise InclusionViolated(f"contact {sorted(contact - ess)} not essential")
    return {
        "dlt": graph.sorted_ids(dlt),
        "contact": graph.sorted_ids(contact),
        "essential": graph.sorted_ids(ess),
        "dlt_strict": dlt < contact,
        "contact_strict": contact < ess,
    }


def fim_monotonicity_check(branch: PlaneBranch, m: int) -> dict:
    """Check the shape of FIM along each level of Gamma_m (vertices with N | m)."""
    graph = separating_graph(branch, m)
    inv = derive_invariants(branch)
    g = inv.g
    by_level: dict[int, list[str]] = defaultdict(list)
    for v in graph.vertices.values():
        if v.is_exceptional and m % v.N == 0:
            by_level[v.level].append(v.id)
    fims = {vid: vertex_fim(graph, vid, m) for ids in by_level.values() for vid in ids}
    checked = 0
    for j, ids in sorted(by_level.items()):
        if j == 0:
            expect = FimMultiset.from_values([(Fraction(m, inv.branch.nu), inv.branch.nu)], m, 0)
            for vid in ids:
                if fims[vid].entries != expect.entries:
                    raise MonotonicityViolated(f"level-0 FIM at {vid} is {fims[vid].entries}")
                checked += 1
            continue
        if j == g:
            seen: dict[tuple, str] = {}
            for vid in ids:
                key = fims[vid].entries
                if key in seen:
                    raise MonotonicityViolated(f"level-{g} vertices {seen[key]} and {vid} share FIM {key}")
                seen[key] = vid
                checked += 1
            continue
        trunk, branch_side = [], []
        for vid in ids:
            (trunk if classify(inv, graph.vertices[vid]).group is None else branch_side).append(vid)
        trunk.sort(key=lambda v: Fraction(*graph.vertices[v].coords))
        mins = [fims[v].minimum for v in trunk]
        if any(b >= a for a, b in zip(mins, mins[1:])):
            raise MonotonicityViolated(f"trunk minima at level {j} are not strictly decreasing: {mins}")
        checked += len(trunk)
        kh, rh = inv.kappa_hat[j], inv.r_hat[j]
        n_r = divisor_label(inv, j, kh, rh)[0]
        at_rupture = FimMultiset.from_values(_fim_values(inv, j, kh, rh, Fraction(m, n_r)), m, Fraction(m, n_r))
        for vid in branch_side:
            if fims[vid].entries != at_rupture.entries:
                raise MonotonicityViolated(f"branch vertex {vid} FIM {fims[vid].entries} differs from R{j + 1}")
            checked += 1
    return {"checked": checked, "ok": True}
