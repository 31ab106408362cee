"""Heights and orbit level sets."""

import math
import random
from fractions import Fraction as F

import pytest

from orbitforge.ball import eval_poly_ball
from orbitforge.dynamics import PolyDS, Preperiodic, classify_orbit
from orbitforge.errors import DomainError, ResourceError
from orbitforge.exact import BiPoly, Poly
from orbitforge.orbits import (canonical_height, grand_orbit_points,
                               height_balance_check, small_orbit_level,
                               weil_height)

DS1 = PolyDS(Poly([-1, 0, 1]))


# -- canonical heights -----------------------------------------------------------

def test_power_map_height_is_exact_weil_height():
    ds = PolyDS(Poly.monomial(2))
    h = canonical_height(ds, F(2))
    assert h.method == "exact-power-map"
    assert abs(float(h.value.re_mid) - math.log(2)) < 1e-15


def test_preperiodic_height_contains_zero():
    h = canonical_height(DS1, F(0))
    assert h.contains_zero()
    assert float(h.value.rad) < 1e-10


def test_wandering_height_excludes_zero():
    h = canonical_height(DS1, F(1, 3))
    assert h.excludes_zero()
    # hhat = log(den) + archimedean escape rate; here the orbit is bounded
    # in C, so the value is exactly log 3 up to the Green enclosure
    assert abs(float(h.value.re_mid) - math.log(3)) < 1e-10


def test_height_doubling_random():
    rng = random.Random(99)
    tol = F(1, 10**10)
    for _ in range(25):
        alpha = F(rng.randint(-30, 30), rng.randint(1, 30))
        h1 = canonical_height(DS1, DS1.apply(alpha), tol)
        h2 = canonical_height(DS1, alpha, tol)
        assert abs(float(h1.value.re_mid) - 2 * float(h2.value.re_mid)) <= 2e-10


def test_height_vs_weil_comparison_constant():
    c_f = DS1.height_comparison_constant()
    rng = random.Random(7)
    for _ in range(100):
        alpha = F(rng.randint(-40, 40), rng.randint(1, 40))
        h_hat = float(canonical_height(DS1, alpha).value.re_mid)
        assert abs(weil_height(alpha) - h_hat) <= c_f + 1e-9


def test_bad_reduction_prime_contribution():
    ds = PolyDS(Poly([F(-1, 5), 0, 1]))       # X^2 - 1/5, bad at 5
    tol = F(1, 10**9)
    h1 = canonical_height(ds, ds.apply(F(1)), tol)
    h2 = canonical_height(ds, F(1), tol)
    assert abs(float(h1.value.re_mid) - 2 * float(h2.value.re_mid)) <= 2e-9


def test_preperiodic_vs_wandering_on_quadratic_corpus():
    for c in range(-2, 3):
        ds = PolyDS(Poly([c, 0, 1]))
        for alpha in (F(0), F(1), F(-1), F(1, 2), F(2, 3)):
            verdict = classify_orbit(ds, alpha)
            h = canonical_height(ds, alpha, F(1, 10**10))
            if isinstance(verdict, Preperiodic):
                assert h.contains_zero(), (c, alpha)
            else:
                assert h.excludes_zero(), (c, alpha)


# -- level sets ---------------------------------------------------------------------

def test_small_orbit_levels_examples():
    lvl0 = small_orbit_level(DS1, F(1, 3), 0)
    assert lvl0.rational_values() == [F(1, 3)]

    lvl1 = small_orbit_level(DS1, F(1, 3), 1)
    assert lvl1.rational_values() == [F(-1, 3), F(1, 3)]
    assert lvl1.root_count() == 2

    lvl2 = small_orbit_level(DS1, F(1, 3), 2)
    assert lvl2.rational_values() == [F(-1, 3), F(1, 3)]
    assert [b.factor for b in lvl2.algebraic] == [Poly([F(-17, 9), 0, 1])]
    assert lvl2.root_count() == 4


def test_level_sizes_and_defining_equation():
    alpha = F(1, 3)
    for n in (1, 2, 3):
        lvl = small_orbit_level(DS1, alpha, n)
        assert lvl.root_count() == 2 ** n
        target = lvl.target
        fn = DS1.iterate(n)
        for root, _ in lvl.rational_roots:
            assert fn(root) == target
        for batch in lvl.algebraic:
            for ball in batch.roots:
                image = eval_poly_ball(fn, ball)
                assert image.contains_value(target)


def test_levels_are_nested():
    alpha = F(1, 3)
    for n in (0, 1, 2):
        lvl = small_orbit_level(DS1, alpha, n)
        nxt = DS1.iterate(n + 1)
        target = nxt(alpha)
        for root, _ in lvl.rational_roots:
            assert nxt(root) == target


def test_grand_orbit_examples():
    sq = PolyDS(Poly.monomial(2))
    g = grand_orbit_points(sq, F(4), 1, 0)
    assert g.rational_values() == [F(-2), F(2)]

    g2 = grand_orbit_points(DS1, F(1, 3), 1, 1)
    assert g2.rational_values() == [F(-1, 3), F(1, 3)]

    g3 = grand_orbit_points(DS1, F(1, 3), 0, 2)
    assert g3.rational_values() == [DS1.iterate(2)(F(1, 3))]


def test_level_cap():
    with pytest.raises(ResourceError):
        small_orbit_level(DS1, F(1, 3), 14)


# -- height balance ---------------------------------------------------------------

def test_height_balance_examples():
    diag = BiPoly({(0, 1): 1, (1, 0): -1})          # Y - X
    rep = height_balance_check(diag, [(F(5), F(5)), (F(-3, 2), F(-3, 2))])
    assert all(row.difference == 0 for row in rep.rows)

    parab = BiPoly({(0, 1): 1, (2, 0): -1})         # Y - X^2
    rep2 = height_balance_check(parab, [(F(2), F(4)), (F(3), F(9))])
    assert all(row.difference == 0 for row in rep2.rows)
    assert (rep2.d1, rep2.d2) == (1, 2)

    graph = BiPoly({(0, 1): 1, (2, 0): -1, (0, 0): 1})    # Y - (X^2 - 1)
    pts = [(F(n), F(n * n - 1)) for n in range(2, 21)]
    rep3 = height_balance_check(graph, pts)
    assert rep3.fitted_constant < 2.0

    with pytest.raises(DomainError):
        height_balance_check(diag, [(F(1), F(2))])
