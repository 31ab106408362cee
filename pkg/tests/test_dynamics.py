"""Dynamical systems: normalization, exceptional maps, escape, preperiodicity."""

from fractions import Fraction as F

import pytest

from orbitforge.dynamics import (PolyDS, Preperiodic, Wandering, _v_p,
                                 classify_orbit, depress, detect_exceptional,
                                 escaping_critical_points,
                                 find_place_of_good_reduction_escape,
                                 is_preperiodic, normalize_monic)
from orbitforge.errors import DomainError
from orbitforge.exact import Poly, poly_compose, poly_iterate

DS = PolyDS(Poly([-1, 0, 1]))      # X^2 - 1


# -- normalization ---------------------------------------------------------

def test_normalize_examples():
    ds, conj = normalize_monic(Poly([0, 0, 2]))
    assert ds.f == Poly([0, 0, 1]) and conj.scale == 2 and conj.rational

    monic = Poly([4, -1, 0, 1])
    ds2, conj2 = normalize_monic(monic)
    assert ds2.f == monic and conj2.scale == 1

    ds3, conj3 = normalize_monic(Poly([0, 0, 0, 3]))
    assert ds3.f == Poly.monomial(3)
    assert not conj3.rational          # scale is sqrt(3), recorded as a ball
    assert conj3.scale.contains_zero() is False


def test_normalize_conjugation_commutes_with_iteration():
    g = Poly([1, -2, 0, 0, 2])        # degree 4, lead 2: c^3 = 2 irrational
    with pytest.raises(DomainError):
        normalize_monic(g)            # no rational monic conjugate exists
    g2 = Poly([3, 0, 2])              # lead 2, d=2: c = 2 rational
    ds, conj = normalize_monic(g2)
    c = conj.scale
    L = Poly([0, c])
    Linv = Poly([0, 1 / c])
    for n in range(1, 4):
        lhs = ds.iterate(n)
        rhs = poly_compose(poly_compose(L, poly_iterate(g2, n)), Linv)
        assert lhs == rhs


# -- exceptional detection ---------------------------------------------------

def test_detect_exceptional_examples():
    assert detect_exceptional(PolyDS(Poly([-2, 0, 1]))).kind == "chebyshev"
    assert detect_exceptional(DS).kind is None
    assert detect_exceptional(PolyDS(Poly.monomial(3))).kind == "power"
    # monic form of the negated degree-3 Chebyshev: X^3 + 3X
    assert detect_exceptional(PolyDS(Poly([0, 3, 0, 1]))).kind == "neg-chebyshev"
    # degree-5 alternating flip is Chebyshev over an extension only
    from orbitforge.dynamics import chebyshev_monic, _alternating_flip
    flip5 = _alternating_flip(chebyshev_monic(5))
    verdict = detect_exceptional(PolyDS(flip5))
    assert verdict.kind == "chebyshev" and verdict.over_extension


def test_detect_exceptional_translation_invariant():
    for t in range(-2, 3):
        shift = Poly([t, 1])
        unshift = Poly([-t, 1])
        for f, kind in ((Poly([-2, 0, 1]), "chebyshev"),
                        (Poly.monomial(2), "power"),
                        (Poly([-1, 0, 1]), None)):
            conj = poly_compose(poly_compose(shift, f), unshift)
            assert detect_exceptional(PolyDS(conj)).kind == kind


def test_depress_kills_subleading_term():
    f = Poly([5, -3, 4, 1])
    dep, _ = depress(f)
    assert dep.coeff(dep.degree - 1) == 0


# -- critical escape -----------------------------------------------------------

def test_escaping_critical_points_examples():
    rep = escaping_critical_points(DS)
    assert not rep.escaping and len(rep.bounded) == 1 and rep.julia_connected

    rep6 = escaping_critical_points(PolyDS(Poly([-6, 0, 1])))
    assert len(rep6.escaping) == 1 and rep6.julia_connected is False

    rep_sq = escaping_critical_points(PolyDS(Poly.monomial(2)))
    assert not rep_sq.escaping and rep_sq.julia_connected


# -- preperiodicity ---------------------------------------------------------------

def test_is_preperiodic_examples():
    out = is_preperiodic(DS, F(0))
    assert isinstance(out, Preperiodic) and out.period == 2

    out = is_preperiodic(DS, F(1, 3))
    assert isinstance(out, Wandering)
    assert out.place.place == 3
    assert out.place.good_reduction and out.place.coprime_to_d

    out = is_preperiodic(PolyDS(Poly.monomial(2)), F(1))
    assert isinstance(out, Preperiodic) and out.period == 1


def test_agrees_with_brute_force_orbit_tables():
    # quadratic corpus X^2 + c, |c| <= 10: monic integer model, so any
    # non-integer rational wanders (denominators square); integers either
    # cycle or cross the escape radius quickly
    points = [F(0), F(1), F(-1), F(2), F(1, 2), F(-1, 3), F(3), F(5, 2)]
    for c in range(-10, 11):
        ds = PolyDS(Poly([c, 0, 1]))
        for alpha in points:
            verdict = classify_orbit(ds, alpha)
            expected = _brute_force(ds, alpha, 50)
            assert isinstance(verdict, Preperiodic) == (expected == "preperiodic"), \
                (c, alpha, verdict, expected)


def _brute_force(ds: PolyDS, alpha: F, steps: int) -> str:
    if alpha.denominator > 1:
        return "wandering"            # denominators strictly grow under monic integer f
    seen = {alpha}
    x = alpha
    for _ in range(steps):
        x = ds.apply(x)
        if x in seen:
            return "preperiodic"
        if abs(x) > ds.escape_radius:
            return "wandering"
        seen.add(x)
    return "preperiodic"


def test_wandering_place_strictly_increases():
    for alpha in (F(1, 3), F(5, 3), F(3)):
        verdict = classify_orbit(DS, alpha)
        assert isinstance(verdict, Wandering)
        report = verdict.place
        x = alpha
        for _ in range(report.escape_iterate):
            x = DS.apply(x)
        if report.place is None:
            prev = abs(x)
            for _ in range(10):
                x = DS.apply(x)
                assert abs(x) > prev
                prev = abs(x)
        else:
            p = report.place
            prev = _v_p(x, p)
            for _ in range(10):
                x = DS.apply(x)
                cur = _v_p(x, p)
                assert cur < prev     # |f^n(alpha)|_p strictly increasing
                prev = cur


# -- good-reduction escape place ------------------------------------------------

def test_find_place_examples():
    res = find_place_of_good_reduction_escape(DS, F(1, 3))
    assert res.qualifying.place == 3

    res = find_place_of_good_reduction_escape(DS, F(5, 3))
    assert res.qualifying.place == 3

    res = find_place_of_good_reduction_escape(DS, F(3))
    assert res.qualifying is None and res.archimedean is not None

    with pytest.raises(DomainError):
        find_place_of_good_reduction_escape(DS, F(0))


def test_place_rejected_when_dividing_degree():
    # alpha = 1/2 under X^2 - 1 escapes 2-adically but 2 | d: not qualifying
    res = find_place_of_good_reduction_escape(DS, F(1, 2))
    assert res.qualifying is None
    assert any(r.place == 2 and not r.coprime_to_d for r in res.rejected)


def test_place_report_invariants():
    assert DS.good_reduction(3) and DS.good_reduction(2)
    bad = PolyDS(Poly([F(-1, 5), 0, 1]))
    assert not bad.good_reduction(5)
    assert DS.coprime_to_degree(3) and not DS.coprime_to_degree(2)
