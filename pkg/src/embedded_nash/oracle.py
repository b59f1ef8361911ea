"""Independent checks by explicit series computation.

The curve ``x = t**nu, y = phi(t)`` is pushed through the toric blow-up tower
to find the constants ``B_i`` and the flattening series ``psi_i``; arcs are
then built in the chart of a chosen divisor and pulled back down.  The FIM
of an arc is read off the Newton polygon of ``f(g1, g2 + Z)`` in ``Z``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional

import sympy

from .branch import DerivedInvariants, PlaneBranch, derive_invariants, euclid_trace
from .contact import FimMultiset, Location, classify, fim_formula
from .errors import ForbiddenCoefficient, NotDivisible, PrecisionExhausted, ValidationFailed
from .graph import divisor_label, essential_set, separating_graph, stern_brocot_path
from .series import TruncSeries

Phi = tuple[tuple[int, Fraction], ...]

MAX_DOUBLINGS = 4


# -- parametrizations and defining polynomials --------------------------------


def canonical_phi(branch: PlaneBranch) -> Phi:
    return tuple((k, Fraction(1)) for k in branch.char_exponents)


def perturbed_phi(branch: PlaneBranch, rng: random.Random, extra: int = 2, span: int = 12) -> Phi:
    """Random coefficients at the characteristic exponents plus a few admissible extra terms."""
    inv = derive_invariants(branch)
    ks = branch.char_exponents
    terms = {k: _rand_rational(rng) for k in ks}
    if not ks:
        cands = list(range(2, span + 2))
    else:
        cands = []
        for e in range(ks[0] + 1, ks[-1] + span):
            i = sum(1 for k in ks if k <= e)  # e lies after k_i
            if e not in terms and e % inv.r[i] == 0:
                cands.append(e)
    for e in rng.sample(cands, min(extra, len(cands))):
        terms[e] = _rand_rational(rng)
    return tuple(sorted(terms.items()))


@dataclass(frozen=True)
class BivariatePolynomial:
    """``{(i, j): c}`` standing for sum c x^i y^j."""

    coeffs: tuple[tuple[tuple[int, int], Fraction], ...]

    @property
    def as_dict(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.coeffs)

    @property
    def degree_y(self) -> int:
        return max((j for (_, j), _ in self.coeffs), default=0)

    def y_coefficients(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.degree_y + 1)]
        for (i, j), c in self.coeffs:
            out[j][i] = c
        return out

    def __str__(self) -> str:
        x, y = sympy.symbols("x y")
        return str(sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * x**i * y**j for (i, j), c in self.coeffs)))


@lru_cache(maxsize=None)
def defining_polynomial(branch: PlaneBranch, phi: Optional[Phi] = None) -> BivariatePolynomial:
    """Monic-in-y equation of the branch, as the resultant eliminating t."""
    phi = canonical_phi(branch) if phi is None else phi
    t, x, y = sympy.symbols("t x y")
    phi_expr = sum((sympy.Rational(c.numerator, c.denominator) * t**e for e, c in phi), sympy.Integer(0))
    res = sympy.Poly(sympy.resultant(t**branch.nu - x, y - phi_expr, t), x, y)
    lead = res.coeff_monomial(y**branch.nu)
    if lead == 0 or res.degree(y) != branch.nu:
        raise ValidationFailed("resultant does not have y-degree nu")
    coeffs = []
    for (i, j), c in res.terms():
        q = sympy.Rational(c) / lead
        coeffs.append(((int(i), int(j)), Fraction(int(q.p), int(q.q))))
    poly = BivariatePolynomial(tuple(sorted(coeffs)))
    check = sympy.expand(res.as_expr().subs({x: t**branch.nu, y: phi_expr}))
    if check != 0:
        raise ValidationFailed("resultant does not vanish on the parametrization")
    return poly


# -- tower ----------------------------------------------------------------------


def chart_exponents(r: int, s: int) -> tuple[int, int, int]:
    """(a, b, sign) with a*r - b*s = sign = (-1)**ell for the chart of E_(r,s)."""
    tr = euclid_trace(r, s)
    m11, m12, m21, m22 = 1, 0, 0, 1
    for eta in tr.eta:
        m11, m12, m21, m22 = eta * m11 + m21, eta * m12 + m22, m11, m12
    assert (m11, m12) == (r, s), (r, s, m11, m12)
    b, a = m21, m22
    sign = a * r - b * s
    assert sign == tr.parity
    return a, b, sign


@dataclass(frozen=True)
class LevelData:
    r_hat: int
    kappa_hat: int
    a: int
    b: int
    eps: int
    B: Fraction


@dataclass(frozen=True)
class TowerData:
    levels: tuple[LevelData, ...]
    psis: tuple[TruncSeries, ...]  # psi_0, ..., psi_j
    prec: int = field(default=0)

    @property
    def psi(self) -> TruncSeries:
        return self.psis[-1]


def _descend_step(x: TruncSeries, y: TruncSeries, psi_prev: TruncSeries, lv_rh: int, lv_kh: int, a: int, b: int, eps: int, cap: int):
    v = y - _apply(psi_prev, x, cap)
    if v.is_zero():
        raise PrecisionExhausted("curve coincides with the anchor up to the working precision")
    xk, vr = x ** lv_kh, v ** lv_rh
    w = xk.divide(vr, cap=cap) if eps > 0 else vr.divide(xk, cap=cap)
    va, xb = v ** a, x ** b
    xn = va.divide(xb, cap=cap) if eps > 0 else xb.divide(va, cap=cap)
    return xn, w


def _apply(psi: TruncSeries, x: TruncSeries, cap: Optional[int] = None) -> TruncSeries:
    if psi.is_zero() and psi.prec is None:
        return TruncSeries({})
    if not psi.coeffs:
        return TruncSeries.zero(Fraction(psi.prec) * x.order if x.order is not None else cap)
    # monomial arguments are substituted term by term
    if len(x.coeffs) == 1 and x.prec is None:
        (e, c), = x.coeffs.items()
        cs = {}
        for k, ck in psi.coeffs.items():
            cs[k * e] = ck * c**k
        prec = None if psi.prec is None else psi.prec * e
        out = TruncSeries(cs, prec, x.denom)
        return out if cap is None else out.truncate(cap)
    out = psi.compose(x if cap is None else x.truncate(cap))
    return out if cap is None else out.truncate(cap)


def _anchor(branch: PlaneBranch, inv: DerivedInvariants, level: int, phi: Phi) -> tuple[TruncSeries, TruncSeries]:
    if level < inv.g:
        d = inv.r[level]
        bound = branch.char_exponents[level]
    else:
        d, bound = 1, None
    terms = {e // d: c for e, c in phi if bound is None or e < bound}
    return TruncSeries({branch.nu // d: 1}), TruncSeries(terms)


@lru_cache(maxsize=None)
def compute_tower(branch: PlaneBranch, j: int, prec: int = 12, phi: Optional[Phi] = None) -> TowerData:
    """Constants B_1..B_j, chart pairs and flattening series psi_0..psi_j.

    Each ``psi_l`` is known modulo ``x_l**prec``.
    """
    inv = derive_invariants(branch)
    if not 0 <= j <= inv.g:
        raise ValueError(f"level {j} outside 0..{inv.g}")
    phi = canonical_phi(branch) if phi is None else phi
    if inv.g == 0:
        return TowerData((), (TruncSeries({e: c for e, c in phi}).truncate(prec),), prec)
    if j == 0:
        return TowerData((), (TruncSeries({}),), prec)
    below = compute_tower(branch, j - 1, prec, phi)
    kh, rh = inv.kappa_hat[j - 1], inv.r_hat[j - 1]
    a, b, eps = chart_exponents(kh, rh)
    work = 2 * prec + 4
    for _ in range(MAX_DOUBLINGS + 3):
        try:
            x, y = _anchor(branch, inv, j, phi)
            lv_B = []
            for lvl, psi_prev in enumerate(below.psis, start=1):
                if lvl <= len(below.levels):
                    ld = below.levels[lvl - 1]
                    x, w = _descend_step(x, y, psi_prev, ld.r_hat, ld.kappa_hat, ld.a, ld.b, ld.eps, work)
                    y = w - ld.B
                else:
                    x, w = _descend_step(x, y, psi_prev, rh, kh, a, b, eps, work)
                    B = w.constant_term()
                    if w.order is None or w.order != 0 or B == 0:
                        raise PrecisionExhausted(f"cannot certify B_{j} != 0")
                    y = w - B
                    lv_B.append(B)
            xo = x.order
            if xo != 1 or x.prec is None or y.prec is None:
                raise PrecisionExhausted(f"level-{j} x coordinate of the anchor has order {xo}")
            p_avail = min(x.prec // x.denom, y.prec // y.denom)
            if p_avail < prec or x.denom != 1 or y.denom != 1:
                raise PrecisionExhausted("working precision too small for the flattening series")
            psi = y.truncate(prec).compose(x.truncate(prec).reversion()).truncate(prec)
            level = LevelData(rh, kh, a, b, eps, lv_B[0])
            return TowerData(below.levels + (level,), below.psis + (psi,), prec)
        except PrecisionExhausted:
            work *= 2
    raise PrecisionExhausted(f"tower level {j} did not stabilise up to working precision {work}")


# -- arcs -------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcPair:
    gamma1: TruncSeries
    gamma2: TruncSeries


def construct_arc(
    branch: PlaneBranch,
    location: Location,
    alpha: Fraction,
    beta: Fraction,
    m: int,
    trunc: Optional[int] = None,
    phi: Optional[Phi] = None,
) -> ArcPair:
    """An arc of contact order m lifting to the divisor at ``location``.

    Its lift meets the divisor at the chart point ``y~ = beta``, transversally.
    """
    inv = derive_invariants(branch)
    j, (r, s) = location.level, location.coords
    big_n, _ = divisor_label(inv, j, r, s)
    if m % big_n:
        raise NotDivisible(f"N = {big_n} does not divide m = {m}")
    alpha, beta = Fraction(alpha), Fraction(beta)
    if alpha == 0 or beta == 0:
        raise ForbiddenCoefficient("alpha and beta must be nonzero")
    rho = m // big_n
    T = trunc if trunc is not None else m + 2
    tower = compute_tower(branch, j, T, phi)
    if j < inv.g and (r, s) == (inv.kappa_hat[j], inv.r_hat[j]):
        nxt = compute_tower(branch, j + 1, T, phi)
        if beta == nxt.levels[j].B:
            raise ForbiddenCoefficient(f"beta = B_{j + 1} = {beta} puts the arc on the next branch point")
    a, b, _ = chart_exponents(r, s)
    u = TruncSeries({s * rho: alpha**s * beta**a}, T)
    v = TruncSeries({r * rho: alpha**r * beta**b}, T)
    x, y = u, v + _apply(tower.psis[j], u, T)
    for i in range(j, 0, -1):
        ld = tower.levels[i - 1]
        unit = y + ld.B
        x, vv = (x ** ld.r_hat) * (unit ** ld.a), (x ** ld.kappa_hat) * (unit ** ld.b)
        x, vv = x.truncate(T), vv.truncate(T)
        y = vv + _apply(tower.psis[i - 1], x, T)
    return ArcPair(x.truncate(T), y.truncate(T))


def _substitute(f: BivariatePolynomial, arc: ArcPair) -> list[TruncSeries]:
    """Coefficients c_k of Q(Z) = f(g1, g2 + Z)."""
    ys = f.y_coefficients()
    nu = len(ys) - 1
    g1, g2 = arc.gamma1, arc.gamma2
    T = min(p for p in (g1.trunc, g2.trunc) if p is not None) if (g1.prec is not None or g2.prec is not None) else None
    max_i = max((i for col in ys for i in col), default=0)
    pw1 = [TruncSeries({0: 1})]
    for _ in range(max_i):
        nxt = pw1[-1] * g1
        pw1.append(nxt if T is None else nxt.truncate(T))
    pw2 = [TruncSeries({0: 1})]
    for _ in range(nu):
        nxt = pw2[-1] * g2
        pw2.append(nxt if T is None else nxt.truncate(T))
    fj = []
    for col in ys:
        acc = TruncSeries({})
        for i, c in col.items():
            acc = acc + pw1[i] * c
        fj.append(acc)
    out = []
    for k in range(nu + 1):
        acc = TruncSeries({})
        for jj in range(k, nu + 1):
            if fj[jj].is_zero() and fj[jj].prec is None:
                continue
            acc = acc + fj[jj] * pw2[jj - k] * comb(jj, k)
        out.append(acc)
    return out


def contact_order(f: BivariatePolynomial, arc: ArcPair) -> Fraction:
    c0 = _substitute(f, arc)[0]
    if c0.is_zero():
        raise PrecisionExhausted(f"f vanishes on the arc up to order {c0.trunc}")
    return c0.order


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def fim_newton(f: BivariatePolynomial, arc: ArcPair, nu: int) -> FimMultiset:
    """Valuations of the roots Z of f(g1, g2 + Z), with multiplicities."""
    cs = _substitute(f, arc)
    if len(cs) - 1 != nu:
        raise ValueError(f"polynomial has y-degree {len(cs) - 1}, expected {nu}")
    c0 = cs[0]
    if c0.is_zero():
        raise PrecisionExhausted(f"f vanishes on the arc up to order {c0.trunc}")
    top = c0.order
    pts = []
    for k, c in enumerate(cs):
        if c.is_zero():
            if c.prec is not None and c.trunc < top:
                raise PrecisionExhausted(f"coefficient of Z^{k} unknown below order {top}")
            continue
        pts.append((k, c.order))
    if pts[-1] != (nu, 0):
        raise ValidationFailed("polynomial is not monic in y")
    hull = _lower_hull(pts)
    vals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        vals.append(((y1 - y2) / (x2 - x1), x2 - x1))
    return FimMultiset.from_values(vals, top, 0)


def _rand_rational(rng: random.Random, bound: int = 100) -> Fraction:
    while True:
        q = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if q:
            return q


def arc_fim(branch: PlaneBranch, location: Location, alpha, beta, m: int, phi: Optional[Phi] = None) -> tuple[Fraction, FimMultiset]:
    """(contact order, Newton FIM) of a constructed arc, doubling the truncation on demand."""
    f = defining_polynomial(branch, phi)
    t0 = m + 2
    T = t0
    while True:
        try:
            arc = construct_arc(branch, location, alpha, beta, m, T, phi)
            return contact_order(f, arc), fim_newton(f, arc, branch.nu)
        except PrecisionExhausted:
            if T >= t0 * 2**MAX_DOUBLINGS:
                raise
            T *= 2


def cross_validate(branch: PlaneBranch, m: int, trials: int = 2, seed: int = 0, phi: Optional[Phi] = None) -> dict:
    """Compare formula and oracle at every essential vertex of Gamma_m."""
    graph = separating_graph(branch, m)
    inv = derive_invariants(branch)
    results = []
    ok = True
    for vid in graph.sorted_ids(essential_set(graph, m)):
        loc = classify(inv, graph.vertices[vid])
        expect = fim_formula(inv, loc, m)
        forbidden = {Fraction(0)}
        if loc.level < inv.g and loc.coords == (inv.kappa_hat[loc.level], inv.r_hat[loc.level]):
            T = m + 2
            forbidden.add(compute_tower(branch, loc.level + 1, T, phi).levels[loc.level].B)
        rec = {"vertex": vid, "expected": expect, "trials": []}
        for t in range(trials):
            rng = random.Random(f"{seed}:{vid}:{t}")
            alpha = _rand_rational(rng)
            beta = _rand_rational(rng)
            while beta in forbidden:
                beta = _rand_rational(rng)
            order, fim = arc_fim(branch, loc, alpha, beta, m, phi)
            passed = order == m and fim.entries == expect.entries
            ok &= passed
            rec["trials"].append({"alpha": alpha, "beta": beta, "order": order, "fim": fim, "pass": passed})
        rec["pass"] = all(tr["pass"] for tr in rec["trials"])
        results.append(rec)
    report = {"branch": str(branch), "m": m, "vertices": results, "pass": ok}
    if not ok:
        err = ValidationFailed(f"oracle disagrees with the FIM formula for {branch} at m={m}")
        err.report = report  # type: ignore[attr-defined]
        raise err
    return report


# -- blow-up label simulation -------------------------------------------------------


def blowup_labels(branch: PlaneBranch) -> dict[tuple[int, tuple[int, int]], tuple[int, int]]:
    """(N, nu) of every exceptional divisor of the minimal resolution by point blow-ups.

    Each level starts at the point where the curve meets the previous rupture
    divisor, with the curve's local orders (r_{j+1}, kappa_{j+1}).
    """
    inv = derive_invariants(branch)
    out = {}
    if inv.g == 0:
        return {(0, (1, 1)): (1, 2)}
    for j in range(inv.g):
        big_r, big_k = inv.r[j], inv.kappa[j]
        gp = ((0, 1), inv.rupture_N[j], inv.rupture_nu[j])
        gg = ((1, 0), 0, 1)
        while True:
            coords = (gp[0][0] + gg[0][0], gp[0][1] + gg[0][1])
            e = (coords, gp[1] + gg[1] + min(big_r, big_k), gp[2] + gg[2])
            out[(j, coords)] = (e[1], e[2])
            if big_r == big_k:
                break
            if big_k > big_r:
                big_k -= big_r
                gp = e
            else:
                big_r -= big_k
                gg = e
    return out


__all__ = [
    "ArcPair",
    "BivariatePolynomial",
    "LevelData",
    "TowerData",
    "arc_fim",
    "blowup_labels",
    "canonical_phi",
    "chart_exponents",
    "compute_tower",
    "construct_arc",
    "contact_order",
    "cross_validate",
    "defining_polynomial",
    "fim_newton",
    "perturbed_phi",
    "stern_brocot_path",
]
