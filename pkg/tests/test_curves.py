"""Curves against orbits: classification, intersections, commuting maps, nu."""

import random
from fractions import Fraction as F

import pytest

from orbitforge.curves import (NotSpecialUpTo, PlaneCurve,
                               SpecialDiagonal, SpecialVertical,
                               build_nu, commuting_linear, intersect_small_orbit,
                               is_special_curve, nu_estimates)
from orbitforge.dynamics import PolyDS
from orbitforge.errors import DomainError
from orbitforge.exact import BiPoly, Poly
from orbitforge.padic import PadicScalar, teichmuller

DS1 = PolyDS(Poly([-1, 0, 1]))
CORPUS_F = [Poly([-1, 0, 1]), Poly([0, 0, 1]), Poly([-6, 0, 1]),
            Poly([-2, 0, 1]), Poly([1, -1, 0, 1])]

DIAG = PlaneCurve.from_terms({(1, 0): 1, (0, 1): -1})            # X - Y
ANTI = PlaneCurve.from_terms({(1, 0): 1, (0, 1): 1})             # X + Y
VERT = PlaneCurve.from_terms({(1, 0): 3, (0, 0): 1})             # 3X + 1
LINE = PlaneCurve.from_terms({(1, 0): 1, (0, 1): -1, (0, 0): -1})  # X - Y - 1


def test_plane_curve_construction():
    assert DIAG.irreducible_q
    assert (DIAG.d1, DIAG.d2) == (1, 1)
    conic = PlaneCurve.from_terms({(2, 0): 1, (0, 1): -1})
    assert (conic.d1, conic.d2) == (1, 2)
    with pytest.raises(DomainError):
        PlaneCurve.from_terms({(0, 0): 3})


def test_diagonal_divides_every_iterate_difference():
    for f in CORPUS_F:
        ds = PolyDS(f)
        for n in range(0, 4):
            fn = ds.iterate(n)
            diff = BiPoly.from_x(fn) - BiPoly.from_y(fn)
            assert DIAG.poly.divides(diff)


def test_special_classification_examples():
    for f in CORPUS_F:
        assert is_special_curve(DIAG, PolyDS(f), F(1, 3), 2) == SpecialDiagonal(0)
    assert is_special_curve(ANTI, DS1, F(1, 3), 2) == SpecialDiagonal(1)
    v = is_special_curve(VERT, DS1, F(1, 3), 2)
    assert isinstance(v, SpecialVertical) and v.beta == F(-1, 3) and v.level == 1
    assert is_special_curve(LINE, DS1, F(1, 3), 3) == NotSpecialUpTo(3)


def test_special_vertical_through_irrational_orbit_point():
    # 9X^2 - 17: vertical lines through the conjugate pair of level 2
    curve = PlaneCurve.from_terms({(2, 0): 9, (0, 0): -17})
    v = is_special_curve(curve, DS1, F(1, 3), 3)
    assert isinstance(v, SpecialVertical) and v.beta is None and v.level == 2
    assert v.factor == Poly([F(-17, 9), 0, 1])


def test_special_horizontal():
    curve = PlaneCurve.from_terms({(0, 1): 3, (0, 0): 1})        # 3Y + 1
    from orbitforge.curves import SpecialHorizontal
    v = is_special_curve(curve, DS1, F(1, 3), 2)
    assert isinstance(v, SpecialHorizontal) and v.beta == F(-1, 3)


def test_vertical_beta_satisfies_level_equation():
    v = is_special_curve(VERT, DS1, F(1, 3), 2)
    fn = DS1.iterate(v.level)
    assert fn(v.beta) == fn(F(1, 3))


# -- intersections -----------------------------------------------------------------

def test_diagonal_intersections():
    rep = intersect_small_orbit(DIAG, DS1, F(1, 3), 2)
    assert rep.count() == 4           # (1/3,1/3), (-1/3,-1/3), two conjugate pairs
    assert rep.levels_hit() == {0, 1, 2}
    assert not rep.undecided and not rep.exceeds_bezout


def test_vertical_intersections():
    rep = intersect_small_orbit(VERT, DS1, F(1, 3), 2)
    # (-1/3, beta2) for every level-<=2 point beta2
    assert rep.count() == 4
    assert all(pt.x.value == F(-1, 3) for pt in rep.points)


def test_nonspecial_line_has_few_points():
    rep = intersect_small_orbit(LINE, DS1, F(1, 3), 3)
    assert isinstance(rep.verdict, NotSpecialUpTo)
    assert rep.count() <= rep.bezout_bound
    assert not rep.exceeds_bezout


def test_preperiodic_alpha_warns():
    rep = intersect_small_orbit(DIAG, DS1, F(0), 1)
    assert rep.preperiodic_warning


# -- commuting linear maps --------------------------------------------------------

def test_commuting_linear_examples():
    sols = commuting_linear(PolyDS(Poly.monomial(2)), 1)
    assert [(s.a, s.b) for s in sols] == [(1, 0)]
    assert sols[0].zeta == 1

    sols3 = commuting_linear(PolyDS(Poly.monomial(3)), 1)
    assert [(s.a, s.b) for s in sols3] == [(1, 0), (-1, 0)]
    assert [s.zeta for s in sols3] == [1, -1]

    sols1 = commuting_linear(DS1, 1)
    assert [(s.a, s.b) for s in sols1] == [(1, 0)]


def test_commuting_linear_recomposition():
    for f in CORPUS_F:
        ds = PolyDS(f)
        for n in (1, 2):
            F_n = ds.iterate(n)
            for sol in commuting_linear(ds, n, check_boettcher=False):
                L = sol.poly
                assert L.compose(F_n) == F_n.compose(L)


def test_commuting_linear_shifted_map():
    # f = (x-1)^2 + 1 - 1 ... use f = x^2 - 2x + 2 = (x-1)^2 + 1: L must fix
    # the conjugated frame; solved exactly with nonzero b
    f = Poly([2, -2, 1])
    sols = commuting_linear(PolyDS(f), 1, check_boettcher=False)
    assert all(s.poly.compose(f) == f.compose(s.poly) for s in sols)
    assert (F(1), F(0)) in [(s.a, s.b) for s in sols]


# -- nu machinery ------------------------------------------------------------------

def _unit(p, u=1):
    return PadicScalar.from_unit(p, u if u > 0 else p**64 + u, 0, 64)


def test_nu_power_map_degenerates_to_polynomial_substitution():
    # f = X^d: 1/Psi = x exactly, so nu is P(z1 phi x^k1, z2 phi x^k2)
    sq = PolyDS(Poly.monomial(2))
    one = _unit(3)
    nu = build_nu(DIAG, sq, 3, F(3), one, one, 1, -1, window=10)
    assert [(k, s.valuation) for k, s in nu.series.terms] == [(-1, 1), (1, 1)]
    led = nu_estimates(nu)
    assert led.sup1_logp == -1 and led.kappa1 == -1
    assert led.lemma_lhs == 1 and led.lemma_rhs == 1 and led.lemma_holds


def test_nu_normalization_enforced():
    one = _unit(3)
    sq = PolyDS(Poly.monomial(2))
    with pytest.raises(DomainError):
        build_nu(DIAG, sq, 3, F(3), one, one, 0, -1, window=8)
    with pytest.raises(DomainError):
        build_nu(DIAG, sq, 3, F(3), one, one, 2, -4, window=8)
    with pytest.raises(DomainError):
        build_nu(DIAG, sq, 3, F(1, 3), one, one, 1, -1, window=8)   # |phi| > 1
    with pytest.raises(DomainError):
        build_nu(DIAG, PolyDS(Poly([F(-1, 3), 0, 1])), 3, F(3), one, one,
                 1, -1, window=8)    # bad reduction at 3
    with pytest.raises(DomainError):
        build_nu(DIAG, PolyDS(Poly([1, 0, 0, 1])), 3, F(3), one, one,
                 1, -1, window=8)    # p | d


def test_nu_positive_exponents_trivial_branch():
    # k1, k2 > 0: no negative exponents, kappa >= 0 and the bound is trivial
    one = _unit(5)
    nu = build_nu(LINE, DS1, 5, F(5), one, one, 2, 1, window=12)
    assert all(k >= 0 for k, _ in nu.series.terms)
    led = nu_estimates(nu)
    assert led.kappa1 >= 0 and led.lemma_holds


def test_nu_good_reduction_sup_bound():
    rng = random.Random(6)
    one5, m5 = _unit(5), _unit(5, -1)
    t5 = teichmuller(5, 2)
    curves = [DIAG, LINE, PlaneCurve.from_terms({(2, 0): 1, (0, 1): 1, (0, 0): -3}),
              PlaneCurve.from_terms({(1, 1): 1, (0, 0): -2})]
    for curve in curves:
        for (k1, k2) in ((1, -1), (2, -1), (3, -2), (2, 1)):
            zeta = rng.choice([one5, m5, t5])
            nu = build_nu(curve, DS1, 5, F(5), zeta, one5, k1, k2, window=14)
            led = nu_estimates(nu)
            assert led.sup_leq_one
            assert led.lemma_holds
            assert led.pj_count_logp >= 0


def test_nu_ledger_reports_instance_constants():
    one = _unit(3)
    nu = build_nu(LINE, DS1, 3, F(9), one, one, 2, -1, window=16)
    led = nu_estimates(nu)
    assert led.c1_instance > 0
    assert led.zero_bound >= 0
