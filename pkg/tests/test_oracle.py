import random
from fractions import Fraction

import pytest

from embedded_nash import (
    TruncSeries,
    classify,
    compute_tower,
    construct_arc,
    contact_order,
    cross_validate,
    defining_polynomial,
    derive_invariants,
    essential_set,
    fim_formula,
    fim_newton,
    separating_graph,
    validate_branch,
)
from embedded_nash.contact import Location
from embedded_nash.errors import ForbiddenCoefficient, NotDivisible, PrecisionExhausted, ValidationFailed
from embedded_nash.oracle import ArcPair, BivariatePolynomial, blowup_labels, chart_exponents, perturbed_phi

F = Fraction


def poly(d):
    return BivariatePolynomial(tuple(sorted((k, F(v)) for k, v in d.items())))


CUSP_F = poly({(0, 2): 1, (3, 0): -1})
Y = poly({(0, 1): 1})


def arc(g1, g2, T=20):
    return ArcPair(TruncSeries(g1, T), TruncSeries(g2, T))


# -- defining polynomials -----------------------------------------------------


@pytest.mark.parametrize(
    "nu, exps, expected",
    [(2, [3], {(0, 2): 1, (3, 0): -1}), (1, [], {(0, 1): 1}), (2, [5], {(0, 2): 1, (5, 0): -1})],
)
def test_defining_polynomial(nu, exps, expected):
    assert defining_polynomial(validate_branch(nu, exps)) == poly(expected)


def test_defining_polynomial_degree():
    f = defining_polynomial(validate_branch(4, [6, 7]))
    assert f.degree_y == 4 and f.as_dict[(0, 4)] == 1


# -- towers -------------------------------------------------------------------


@pytest.mark.parametrize("r, s", [(3, 2), (2, 1), (1, 1), (7, 2), (5, 3), (13, 8)])
def test_chart_exponents_determinant(r, s):
    a, b, sign = chart_exponents(r, s)
    assert a * r - b * s == sign in (1, -1)
    assert 0 <= a <= s and 0 <= b <= r


def test_cusp_tower(cusp):
    t = compute_tower(cusp, 1)
    (lv,) = t.levels
    assert lv.B == 1 and (lv.a, lv.b) == (1, 1)
    assert t.psi.is_zero()


def test_perturbed_tower(cusp):
    t = compute_tower(cusp, 1, phi=((3, F(1)), (4, F(1))))
    assert t.levels[0].B == 1
    assert t.psi.order == 1 and t.psi.coefficient(1) == -2


def test_smooth_tower(smooth):
    t = compute_tower(smooth, 0)
    assert t.levels == () and t.psi.is_zero()


def test_two_level_tower_constants():
    t = compute_tower(validate_branch(4, [6, 7]), 2)
    assert [lv.B for lv in t.levels] == [1, F(1, 4)]
    for lv in t.levels:
        assert lv.a * lv.kappa_hat - lv.b * lv.r_hat == lv.eps


# -- arcs ---------------------------------------------------------------------


def test_arc_first_trunk_divisor(cusp):
    a = construct_arc(cusp, Location(1, (1, 1)), 1, 1, 7)
    assert a.gamma1.terms() == [(2, 1), (3, 1)]
    assert a.gamma2.terms() == [(3, 1), (4, 1)]


def test_arc_rupture_orders(cusp):
    a = construct_arc(cusp, Location(0, (3, 2), 1), 1, 2, 6)
    assert (a.gamma1.order, a.gamma2.order) == (2, 3)
    assert contact_order(CUSP_F, a) == 6


def test_arc_forbidden_coefficients(cusp):
    with pytest.raises(ForbiddenCoefficient):
        construct_arc(cusp, Location(1, (1, 1)), 1, 0, 7)
    # beta = B_1 would follow the curve through the rupture point
    with pytest.raises(ForbiddenCoefficient):
        construct_arc(cusp, Location(0, (3, 2), 1), 1, 1, 6)
    with pytest.raises(NotDivisible):
        construct_arc(cusp, Location(0, (3, 2), 1), 1, 2, 7)


# -- contact order and Newton polygons -----------------------------------------


def test_contact_order_examples():
    assert contact_order(CUSP_F, arc({2: 1, 3: 1}, {3: 1, 4: 1})) == 7
    assert contact_order(Y, arc({1: 1}, {5: 1})) == 5
    with pytest.raises(PrecisionExhausted):
        contact_order(CUSP_F, arc({2: 1}, {3: 1}))


def test_fim_newton_examples():
    assert fim_newton(CUSP_F, arc({2: 1}, {3: 1, 4: 1}), 2).entries == ((3, 1), (4, 1))
    assert fim_newton(CUSP_F, arc({2: 1, 3: 1}, {3: 1, 4: 1}), 2).entries == ((3, 1), (4, 1))
    assert fim_newton(Y, arc({1: 3, 2: 1}, {5: 7}), 1).entries == ((5, 1),)


def test_fim_newton_sums_to_order():
    f = defining_polynomial(validate_branch(4, [6, 7]))
    a = construct_arc(validate_branch(4, [6, 7]), Location(1, (1, 2), 2), 3, 5, 26)
    assert fim_newton(f, a, 4).total == contact_order(f, a) == 26


# -- cross validation ----------------------------------------------------------


def test_cross_validate_cusp_12(cusp):
    rep = cross_validate(cusp, 12, trials=3)
    assert rep["pass"] and len(rep["vertices"]) == 6
    trunk = [v for v in rep["vertices"] if v["vertex"] == "L1:6/1"][0]
    assert all(t["fim"].entries == ((3, 1), (9, 1)) for t in trunk["trials"])


def test_cross_validate_vacuous(cusp):
    rep = cross_validate(cusp, 5)
    assert rep["pass"] and rep["vertices"] == []


def test_cross_validate_second_rupture():
    rep = cross_validate(validate_branch(4, [6, 7]), 26, trials=2)
    r2 = [v for v in rep["vertices"] if v["vertex"] == "L1:1/2"][0]
    assert r2["pass"] and r2["expected"].entries == ((6, 2), (7, 2))


def test_cross_validate_reports_mismatch(cusp, monkeypatch):
    from embedded_nash import oracle

    monkeypatch.setattr(oracle, "fim_formula", lambda *a, **k: fim_formula(*a, **k).__class__((), 0, 0))
    with pytest.raises(ValidationFailed) as info:
        cross_validate(cusp, 6)
    assert info.value.report["pass"] is False
    assert info.value.exit_status == 2


@pytest.mark.parametrize("nu, exps, m", [(2, [3], 12), (3, [4], 24), (4, [6, 7], 26), (4, [6, 13], 38), (2, [5], 20)])
def test_perturbed_parametrisation(nu, exps, m):
    br = validate_branch(nu, exps)
    phi = perturbed_phi(br, random.Random(f"{nu}:{exps}"))
    assert cross_validate(br, m, trials=2, seed=7, phi=phi)["pass"]


@pytest.mark.parametrize("m", [2, 4, 6, 7, 12, 18])
def test_reparametrisation_invariance(cusp, m):
    f = defining_polynomial(cusp)
    inv = derive_invariants(cusp)
    g = separating_graph(cusp, m)
    inner = TruncSeries({1: 1, 2: 1})
    for vid in essential_set(g, m):
        loc = classify(inv, g.vertices[vid])
        a = construct_arc(cusp, loc, F(2, 3), F(-5, 2), m, trunc=3 * m)
        b = ArcPair(a.gamma1.compose(inner), a.gamma2.compose(inner))
        assert contact_order(f, a) == contact_order(f, b) == m
        assert fim_newton(f, a, 2).entries == fim_newton(f, b, 2).entries


BATTERY_SMALL = [(2, [3]), (2, [5]), (3, [4]), (2, [7]), (4, [6, 7]), (4, [6, 13]), (6, [9, 22]), (1, [])]


@pytest.mark.parametrize("nu, exps", BATTERY_SMALL)
def test_truncation_needs_few_doublings(nu, exps):
    br = validate_branch(nu, exps)
    inv = derive_invariants(br)
    f = defining_polynomial(br)
    for m in range(1, 41):
        g = separating_graph(br, m)
        for vid in essential_set(g, m):
            loc = classify(inv, g.vertices[vid])
            for d in range(4):
                try:
                    a = construct_arc(br, loc, F(3, 7), F(-11, 5), m, trunc=(m + 2) * 2**d)
                    fim_newton(f, a, br.nu)
                    break
                except PrecisionExhausted:
                    continue
            else:
                pytest.fail(f"{br} m={m} {vid} needs more than 3 doublings")


@pytest.mark.parametrize("nu, exps", BATTERY_SMALL)
def test_blowup_simulation_matches_graph(nu, exps):
    from embedded_nash import build_minimal_graph

    br = validate_branch(nu, exps)
    g = build_minimal_graph(br)
    sim = blowup_labels(br)
    for (level, rs), lab in sim.items():
        v = g.vertices[f"L{level}:{rs[0]}/{rs[1]}"]
        assert (v.N, v.nu) == lab
    assert len(sim) == sum(v.is_exceptional for v in g.vertices.values())
