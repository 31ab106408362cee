"""Boettcher series: functional equations, inversion, radii."""

import random
from fractions import Fraction as F

import mpmath

from orbitforge.boettcher import (NonArchRadius, boettcher_pair,
                                  phi_equation_residual, phi_psi_identity_residual,
                                  phi_series, psi_equation_residual, psi_series,
                                  radius_archimedean, radius_nonarch)
from orbitforge.dynamics import PolyDS
from orbitforge.exact import Poly


def test_power_map_psi_is_exact_monomial():
    for d in (2, 3, 4):
        psi = psi_series(PolyDS(Poly.monomial(d)), 60)
        assert psi.coefficient(-1) == 1
        assert all(psi.coefficient(e) == 0 for e in range(0, 60))


def test_quadratic_family_low_coefficients():
    # f = X^2 + c: matching coefficients by hand in Psi(z^2) = Psi(z)^2 + c
    for c in (F(7, 3), F(-1), F(5)):
        ds = PolyDS(Poly([c, 0, 1]))
        psi = psi_series(ds, 6)
        assert psi.coefficient(0) == 0
        assert psi.coefficient(1) == -c / 2
        assert psi.coefficient(2) == 0
        assert psi.coefficient(3) == -c / 4 - c**2 / 8
    assert psi_series(PolyDS(Poly([-1, 0, 1])), 4).coefficient(1) == F(1, 2)


def test_functional_equation_residuals_random_corpus():
    rng = random.Random(31)
    for _ in range(12):
        d = rng.choice([2, 3, 4])
        f = Poly([rng.randint(-5, 5) for _ in range(d)] + [1])
        ds = PolyDS(f)
        assert psi_equation_residual(ds, 40).known_is_zero()
        assert phi_equation_residual(ds, 40).known_is_zero()
        assert phi_psi_identity_residual(ds, 24).known_is_zero()


def test_phi_examples():
    # inverse of 1/X is 1/X: phi = w exactly for power maps
    phi = phi_series(PolyDS(Poly.monomial(3)), 20)
    assert phi.coefficient(1) == 1
    assert all(phi.coefficient(k) == 0 for k in range(2, 20))
    # f = X^2 + c: reversion of X/g gives the w^3 coefficient -c/2
    c = F(7, 3)
    phi_c = phi_series(PolyDS(Poly([c, 0, 1])), 8)
    assert phi_c.coefficient(1) == 1
    assert phi_c.coefficient(2) == 0
    assert phi_c.coefficient(3) == -c / 2


def test_boettcher_pair_verify():
    pair = boettcher_pair(PolyDS(Poly([-1, 0, 1])), 20)
    assert pair.verify()


def test_psi_p_integral_at_good_coprime_primes():
    # good reduction + p coprime to d: the recursion only divides by d
    for f in (Poly([-1, 0, 1]), Poly([2, -1, 0, 1])):
        ds = PolyDS(f)
        psi = psi_series(ds, 40)
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
            if not ds.coprime_to_degree(p):
                continue
            for e in range(-1, 40):
                assert psi.coefficient(e).denominator % p != 0, (f, p, e)


def test_psi_not_p_integral_when_p_divides_degree():
    # c_1 = 1/2 for X^2 - 1: integrality fails at p = 2 since the recursion
    # divides by d; the radius report must not claim One there
    psi = psi_series(PolyDS(Poly([-1, 0, 1])), 8)
    assert psi.coefficient(1).denominator % 2 == 0


def test_radius_nonarch():
    ds = PolyDS(Poly([-1, 0, 1]))
    assert radius_nonarch(ds, 3) is NonArchRadius.ONE
    assert radius_nonarch(ds, 2) is NonArchRadius.LEQ_ONE_UNKNOWN
    bad = PolyDS(Poly([F(-1, 5), 0, 1]))
    assert radius_nonarch(bad, 5) is NonArchRadius.LEQ_ONE_UNKNOWN


def test_radius_archimedean_cases():
    one = radius_archimedean(PolyDS(Poly.monomial(2)))
    assert one.certified and one.ball.contains_value(F(1))

    conn = radius_archimedean(PolyDS(Poly([-1, 0, 1])))
    assert conn.certified and conn.ball.contains_value(F(1))

    disc = radius_archimedean(PolyDS(Poly([-6, 0, 1])))
    assert disc.certified
    assert float(disc.ball.re_mid) < 1
    # R = exp(-g(0)) with g(0) the escape rate of the critical orbit
    from orbitforge.green import green_eval
    g0 = green_eval(PolyDS(Poly([-6, 0, 1])), F(0), F(1, 10**12))
    expected = mpmath.exp(-g0.value.re_mid)
    assert abs(disc.ball.re_mid - expected) < 1e-10


def test_phi_matches_iterated_root_numerically():
    # 1/phi(z) should agree with (f^n(z))^(1/d^n) for large real z
    ds = PolyDS(Poly([-1, 0, 1]))
    phi = phi_series(ds, 40)
    z = mpmath.mpf(4 * float(ds.escape_radius))
    w = 1 / z
    series_val = sum(mpmath.mpf(float(phi.coefficient(k))) * w**k
                     for k in range(1, 40))
    x = z
    n = 6
    for _ in range(n):
        x = x**2 - 1
    iter_val = x ** (mpmath.mpf(1) / mpmath.mpf(2) ** n)
    assert abs(1 / series_val - iter_val) < 1e-12
