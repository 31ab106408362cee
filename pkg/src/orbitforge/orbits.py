"""Canonical heights and bounded-level enumeration of small and grand orbits.

The canonical height of a rational point decomposes into certified local
contributions: at a good-reduction prime the local term is log+|alpha|_p
exactly; at a bad-reduction prime the p-adic orbit either certifiably escapes
(the term becomes exact) or stays bounded, leaving a one-sided enclosure that
shrinks like d^-n; at the archimedean place the Green module supplies a
certified ball.  The sum is a rigorous enclosure of hhat, so doubling
hhat(f(x)) = d*hhat(x) and vanishing on preperiodic points hold at tolerance
by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .ball import CBall, rball
from .dynamics import PolyDS, _prime_factors, _v_p
from .errors import DomainError, PrecisionError, ResourceError
from .exact import BiPoly, Poly, rat
from .factor import factor_rational
from .green import green_eval
from .padic import PadicScalar
from .rootcert import certified_roots


@dataclass(frozen=True)
class HeightValue:
    value: CBall                  # real ball, natural-log units
    method: str                   # "limit" | "exact-power-map"

    def contains_zero(self) -> bool:
        return self.value.re_mid - self.value.rad <= 0

    def excludes_zero(self) -> bool:
        return self.value.re_mid - self.value.rad > 0


def weil_height(q: Fraction) -> float:
    q = rat(q)
    return float(mpmath.log(max(abs(q.numerator), q.denominator)))


def _log_ball_int(n: int) -> CBall:
    val = mpmath.log(mpf(n))
    return CBall(val, mpf(0), mpf(2) ** (6 - mpmath.mp.prec) * (1 + abs(val)))


def _padic_local_height(ds: PolyDS, alpha: Fraction, p: int,
                        tol: Fraction, digits: int = 64) -> CBall:
    """Certified enclosure of lim log+|f^n(alpha)|_p / d^n at a bad prime."""
    logp = mpmath.log(mpf(p))
    cap_exp = ds.padic_escape_radius_exponent(p)   # log_p of the escape bound
    d = ds.d
    # steps until the bounded-case enclosure is below tol
    tol_f = mpf(tol.numerator) / mpf(tol.denominator)
    budget = 1
    while float(cap_exp) * float(logp) / d ** budget >= tol_f and budget < 400:
        budget += 1
    budget = max(budget, 4)
    x = PadicScalar.from_rational(alpha, p, digits)
    coeffs = [PadicScalar.from_rational(c, p, digits) for c in ds.f.coeffs]
    for n in range(budget + 1):
        if not x.zero and x.valuation < 0 and ds.padic_dominated(p, x.valuation):
            val = mpf(-x.valuation) * logp / mpf(d) ** n
            return CBall(val, mpf(0), mpf(2) ** (8 - mpmath.mp.prec) * (1 + val))
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * x + c
        x = acc
    hi = mpf(float(cap_exp)) * logp / mpf(d) ** budget * (1 + mpf(2) ** -40)
    return CBall(hi / 2, mpf(0), hi / 2)


def canonical_height(ds: PolyDS, alpha, tol: Fraction = Fraction(1, 10**10)) -> HeightValue:
    """hhat(alpha) = lim h(f^n(alpha)) / d^n, as a certified ball of radius <= tol."""
    alpha = rat(alpha)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if ds.f == Poly.monomial(ds.d):
        # power map: hhat equals the Weil height exactly
        num, den = abs(alpha.numerator), alpha.denominator
        h = max(num, den)
        return HeightValue(_log_ball_int(h) if h > 1 else rball(0, 0),
                           "exact-power-map")
    bad = set(ds.bad_reduction_primes())
    total = rball(0, 0)
    if alpha != 0:
        for p in _prime_factors(alpha.denominator):
            if p in bad:
                continue
            v = _v_p(alpha, p)
            if v < 0:
                total = total + _log_ball_int(p) * CBall.exact_int(-v)
    n_parts = 1 + len(bad)
    part_tol = tol / (2 * n_parts)
    for p in sorted(bad):
        digits = 64
        while True:
            try:
                total = total + _padic_local_height(ds, alpha, p, part_tol, digits)
                break
            except PrecisionError:
                digits *= 2
                if digits > 4096:
                    raise
    g = green_eval(ds, CBall.from_rational(alpha), tol / 2)
    total = total + g.value
    return HeightValue(total, "limit")


# ---------------------------------------------------------------------------
# orbit level sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicRootBatch:
    factor: Poly                    # monic irreducible over Q
    multiplicity: int
    roots: tuple[CBall, ...]


@dataclass(frozen=True)
class OrbitLevelSet:
    level: int                      # n in f^n(X) = target
    source_iterate: int             # m in target = f^m(alpha)
    poly: Poly                      # f^n(X) - f^m(alpha)
    target: Fraction
    rational_roots: tuple[tuple[Fraction, int], ...]
    algebraic: tuple[AlgebraicRootBatch, ...]

    def root_count(self) -> int:
        total = sum(m for _, m in self.rational_roots)
        total += sum(b.factor.degree * b.multiplicity for b in self.algebraic)
        return total

    def rational_values(self) -> list[Fraction]:
        return [r for r, _ in self.rational_roots]


def _level_set(ds: PolyDS, alpha: Fraction, n: int, m: int) -> OrbitLevelSet:
    if n < 0 or m < 0:
        raise DomainError("levels must be >= 0")
    if ds.d ** n > ds.settings.orbit_degree_cap:
        raise ResourceError(
            f"level degree {ds.d}^{n} exceeds cap {ds.settings.orbit_degree_cap}")
    target = ds.iterate(m)(alpha) if m else alpha
    g = ds.iterate(n) - Poly([target])
    rational: list[tuple[Fraction, int]] = []
    batches: list[AlgebraicRootBatch] = []
    for factor, mult in factor_rational(g):
        if factor.degree == 1:
            rational.append((-factor.coeff(0), mult))
        else:
            batches.append(AlgebraicRootBatch(
                factor, mult, tuple(certified_roots(factor))))
    rational.sort()
    return OrbitLevelSet(n, m, g, target, tuple(rational), tuple(batches))


def small_orbit_level(ds: PolyDS, alpha, n: int) -> OrbitLevelSet:
    """Solutions of f^n(X) = f^n(alpha): the level-n slice of the small orbit."""
    return _level_set(ds, rat(alpha), n, n)


def grand_orbit_points(ds: PolyDS, alpha, n: int, m: int) -> OrbitLevelSet:
    """Solutions of f^n(X) = f^m(alpha)."""
    return _level_set(ds, rat(alpha), n, m)


# ---------------------------------------------------------------------------
# height balance along a curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightBalanceRow:
    x: Fraction
    y: Fraction
    difference: float               # d1*h(x) - d2*h(y)
    scale: float                    # sqrt(1 + min(h(x), h(y)))


@dataclass(frozen=True)
class HeightBalanceReport:
    d1: int
    d2: int
    rows: tuple[HeightBalanceRow, ...]
    fitted_constant: float          # smallest c with |diff| <= c * scale on the sample


def height_balance_check(curve, points) -> HeightBalanceReport:
    """Balanced height difference along exact curve points.

    The coordinate-function degrees are d1 = deg_Y P (degree of x on the
    curve) and d2 = deg_X P (degree of y); the bounded combination is the
    cross pairing d2*h(x) - d1*h(y), compared against c*sqrt(1 + min(h)).
    ``curve`` is a PlaneCurve or a bare BiPoly; points must lie on the curve
    exactly.
    """
    poly: BiPoly = curve.poly if hasattr(curve, "poly") else curve
    d1, d2 = poly.deg_y, poly.deg_x
    rows = []
    worst = 0.0
    for x, y in points:
        x, y = rat(x), rat(y)
        if poly.eval(x, y) != 0:
            raise DomainError(f"point ({x}, {y}) is not on the curve")
        hx, hy = weil_height(x), weil_height(y)
        diff = d2 * hx - d1 * hy
        scale = math.sqrt(1 + min(hx, hy))
        rows.append(HeightBalanceRow(x, y, diff, scale))
        worst = max(worst, abs(diff) / scale)
    return HeightBalanceReport(d1, d2, tuple(rows), worst)
