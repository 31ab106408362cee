"""Plane curves against orbits: special-curve classification, certified
intersection with squared small-orbit level sets, linear maps commuting with
iterates, and the p-adic pullback series used for zero counting.

The pullback series: with s(x) = 1/Psi(x) (a power series with unit linear
coefficient), a curve P defines N(x, y) = P(s(x), s(y)) = sum a_nm x^n y^m.
For a scaling phi with |phi|_p < 1, roots of unity z1, z2, and coprime
integers k1 > 0, k1 >= k2, the series

    nu(x) = N(z1 phi x^k1, z2 phi x^k2),  b_k = sum_{k1 n + k2 m = k}
                                                 a_nm phi^(n+m) z1^n z2^m

is analytic on an annulus around |x| = 1; its sup norm, leading index kappa,
and annulus zero count are computed exactly through the p-adic module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Union

from .ball import CBall, set_precision
from .boettcher import psi_series
from .dynamics import PolyDS
from .errors import DomainError, WindowError
from .exact import BiPoly, LaurentBlock, Poly, rat
from .factor import bivariate_irreducible
from .orbits import small_orbit_level
from .padic import (PNorm, PadicScalar, PadicSeries, Radius, count_zeros_pj,
                    kappa, sup_norm)


@dataclass(frozen=True)
class PlaneCurve:
    """Primitive integer bivariate polynomial with coordinate degrees.

    d1 = deg_Y P is the degree of the first coordinate function on the curve,
    d2 = deg_X P the second.  Irreducibility is certified over Q at
    construction; absolute irreducibility is not certified (flag only).
    """

    poly: BiPoly
    d1: int
    d2: int
    irreducible_q: bool

    @staticmethod
    def from_bipoly(b: BiPoly) -> "PlaneCurve":
        if b.is_zero or b.total_degree < 1:
            raise DomainError("a plane curve needs a nonconstant polynomial")
        _, prim = b.content_primitive()
        return PlaneCurve(prim, prim.deg_y, prim.deg_x,
                          bivariate_irreducible(prim))

    @staticmethod
    def from_terms(terms) -> "PlaneCurve":
        return PlaneCurve.from_bipoly(BiPoly(terms))


# ---------------------------------------------------------------------------
# special curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecialDiagonal:
    level: int                      # least n with P | f^n(X) - f^n(Y)


@dataclass(frozen=True)
class SpecialVertical:
    beta: Optional[Fraction]        # rational line X = beta (None: irrational factor)
    factor: Poly                    # shared factor with the orbit level polynomial
    level: int


@dataclass(frozen=True)
class SpecialHorizontal:
    beta: Optional[Fraction]
    factor: Poly
    level: int


@dataclass(frozen=True)
class NotSpecialUpTo:
    nmax: int


SpecialVerdict = Union[SpecialDiagonal, SpecialVertical, SpecialHorizontal,
                       NotSpecialUpTo]


def _axis_factor_level(p_axis: Poly, ds: PolyDS, alpha: Fraction,
                       nmax: int) -> Optional[tuple[Poly, int, Optional[Fraction]]]:
    """Shared factor between a one-variable curve polynomial and orbit levels."""
    for n in range(nmax + 1):
        level = small_orbit_level(ds, alpha, n)
        g = level.poly
        common = p_axis.gcd(g)
        if common.degree >= 1:
            beta = -common.coeff(0) if common.degree == 1 else None
            return common, n, beta
    return None


def is_special_curve(curve: PlaneCurve, ds: PolyDS, alpha, nmax: int) -> SpecialVerdict:
    """Classify components of f^n(X) - f^n(Y) and orbit-point axis lines.

    Divisibility is exact; vertical/horizontal lines are matched through
    exact gcds with the level-set polynomials (so conjugate irrational orbit
    points are caught too, reported by their shared factor).
    """
    if nmax < 0:
        raise DomainError("nmax must be >= 0")
    alpha = rat(alpha)
    P = curve.poly
    for n in range(nmax + 1):
        fn = ds.iterate(n)
        diag = BiPoly.from_x(fn) - BiPoly.from_y(fn)
        if P.divides(diag):
            return SpecialDiagonal(n)
    if P.deg_y == 0:   # union of vertical lines X = root
        hit = _axis_factor_level(P.coeffs_in("y")[0], ds, alpha, nmax)
        if hit:
            factor, n, beta = hit
            return SpecialVertical(beta, factor, n)
    if P.deg_x == 0:   # union of horizontal lines Y = root
        hit = _axis_factor_level(P.coeffs_in("x")[0], ds, alpha, nmax)
        if hit:
            factor, n, beta = hit
            return SpecialHorizontal(beta, factor, n)
    return NotSpecialUpTo(nmax)


# ---------------------------------------------------------------------------
# intersection with squared level sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootRef:
    """A point of a level set: exact rational or a certified ball of a factor."""

    value: Optional[Fraction]
    factor: Optional[Poly]
    ball: CBall
    level: int                       # least level at which the point appears

    @property
    def exact(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class IntersectionPoint:
    x: RootRef
    y: RootRef
    certainty: str                   # "exact" | "certified"


@dataclass(frozen=True)
class IntersectionReport:
    points: list[IntersectionPoint]
    undecided: list[tuple[RootRef, RootRef]]
    verdict: SpecialVerdict
    bezout_bound: int
    exceeds_bezout: bool             # would-be counterexample flag
    preperiodic_warning: bool        # alpha was preperiodic (run proceeds anyway)

    def count(self) -> int:
        return len(self.points)

    def levels_hit(self) -> set[int]:
        return {max(pt.x.level, pt.y.level) for pt in self.points}


def _min_level_roots(ds: PolyDS, alpha: Fraction, cap: int) -> list[RootRef]:
    """Level-cap roots annotated with the least level containing each."""
    sets = [small_orbit_level(ds, alpha, n) for n in range(cap + 1)]
    out: list[RootRef] = []
    seen_rational: set[Fraction] = set()
    seen_factors: set[Poly] = set()
    for n, lvl in enumerate(sets):
        for root, _m in lvl.rational_roots:
            if root not in seen_rational:
                seen_rational.add(root)
                out.append(RootRef(root, None, CBall.from_rational(root), n))
        for batch in lvl.algebraic:
            if batch.factor in seen_factors:
                continue
            seen_factors.add(batch.factor)
            for ball in batch.roots:
                out.append(RootRef(None, batch.factor, ball, n))
    return out


def _eval_pair(P: BiPoly, x: RootRef, y: RootRef) -> CBall:
    return P.eval_with(x.ball, y.ball, convert=CBall.from_rational)


def _resultant_in_y(P: BiPoly, q: Poly) -> Poly:
    """Res_Y(q(Y), P(X, Y)) as a univariate polynomial in X."""
    from .exact import poly_resultant
    qb = BiPoly.from_y(q)
    res = poly_resultant(qb, P, "y")
    # result: x-slot empty (q has no other variable), y-slot carries X
    return res.subs_values(x=Fraction(0))


def _divides_or_zero(factor: Poly, sub: Poly) -> bool:
    """sub vanishes at every root of the irreducible factor (exact test)."""
    if sub.is_zero:
        return True
    if sub.degree < 1:
        return False
    return factor.gcd(sub) == factor


def _pair_vanishes(P: BiPoly, x: RootRef, y: RootRef,
                   escalations: int = 2) -> Optional[bool]:
    """Decide P(x, y) = 0: exact wherever a minimal-polynomial certificate
    exists, certified interval evaluation with escalation otherwise; None
    when genuinely undecided."""
    if x.exact and y.exact:
        return P.eval(x.value, y.value) == 0
    if x.exact != y.exact:
        # substituting the rational coordinate leaves a univariate decision:
        # an irreducible factor vanishes at one root iff it divides
        sub = P.subs_values(x=x.value) if x.exact else P.subs_values(y=y.value)
        alg = y if x.exact else x
        return _divides_or_zero(alg.factor, sub)
    # both algebraic from certified factor roots
    if P.deg_y == 0:
        return _divides_or_zero(x.factor, P.coeffs_in("y")[0])
    if P.deg_x == 0:
        return _divides_or_zero(y.factor, P.coeffs_in("x")[0])
    if (x.factor == y.factor and x.ball.re_mid == y.ball.re_mid
            and x.ball.im_mid == y.ball.im_mid):
        return _divides_or_zero(x.factor, P.diagonal())
    res = _resultant_in_y(P, y.factor)
    if res.is_zero:
        return True                    # y's minimal polynomial divides P
    if not _divides_or_zero(x.factor, res):
        return False                   # no conjugate partner at all
    val = _eval_pair(P, x, y)
    if not val.contains_zero():
        return False
    # some conjugate of y pairs with x; isolate which by interval elimination
    import mpmath
    base_prec = mpmath.mp.prec
    try:
        for attempt in range(escalations + 1):
            set_precision(base_prec * 4 ** attempt)
            from .rootcert import certified_roots
            bx = _matching_root(x)
            y_roots = certified_roots(y.factor)
            ours = min(y_roots, key=lambda b: abs(b.re_mid - y.ball.re_mid)
                       + abs(b.im_mid - y.ball.im_mid))
            plausible = [root for root in y_roots
                         if P.eval_with(bx, root,
                                        convert=CBall.from_rational).contains_zero()]
            if not any(root is ours for root in plausible):
                return False
            if len(plausible) == 1:
                return True
    finally:
        set_precision(base_prec)
    return None


def _matching_root(ref: RootRef) -> CBall:
    from .rootcert import certified_roots
    best, dist = None, None
    for ball in certified_roots(ref.factor):
        gap = abs(ball.re_mid - ref.ball.re_mid) + abs(ball.im_mid - ref.ball.im_mid)
        if dist is None or gap < dist:
            best, dist = ball, gap
    return best if best is not None else ref.ball


def intersect_small_orbit(curve: PlaneCurve, ds: PolyDS, alpha,
                          level_cap: int, nmax: Optional[int] = None) -> IntersectionReport:
    """Certified intersection points of the curve with the squared level set.

    Pairs (b1, b2) from levels <= level_cap are tested exactly when rational,
    otherwise with certified interval evaluation plus an elimination
    certificate; undecided pairs are listed, never counted.  A curve whose
    certified count exceeds the Bezout-style cap deg(P)*d^cap while being
    classified non-special is flagged.
    """
    from .dynamics import Preperiodic, classify_orbit

    alpha = rat(alpha)
    warn = isinstance(classify_orbit(ds, alpha), Preperiodic)
    verdict = is_special_curve(curve, ds, alpha, nmax if nmax is not None else level_cap)
    roots = _min_level_roots(ds, alpha, level_cap)
    points: list[IntersectionPoint] = []
    undecided: list[tuple[RootRef, RootRef]] = []
    for x in roots:
        for y in roots:
            hit = _pair_vanishes(curve.poly, x, y)
            if hit is True:
                points.append(IntersectionPoint(
                    x, y, "exact" if (x.exact and y.exact) else "certified"))
            elif hit is None:
                undecided.append((x, y))
    total_deg = curve.poly.total_degree
    bezout = total_deg * ds.d ** level_cap
    exceeds = isinstance(verdict, NotSpecialUpTo) and len(points) > bezout
    return IntersectionReport(points, undecided, verdict, bezout, exceeds, warn)


# ---------------------------------------------------------------------------
# commuting linear maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutingLinear:
    a: Fraction
    b: Fraction
    zeta: Optional[Fraction]        # scaling on the Boettcher coordinate, when checked

    @property
    def poly(self) -> Poly:
        return Poly([self.b, self.a])


def commuting_linear(ds: PolyDS, n: int, check_boettcher: bool = True,
                     order: int = 24) -> list[CommutingLinear]:
    """All rational L(X) = aX + b with L o f^n = f^n o L, solved exactly.

    Monic leading coefficients force a^(D-1) = 1 (D = d^n), so a = 1 or, for
    odd D, a = -1; the X^(D-1) coefficient then pins b = e1 (a-1)/D.  Every
    candidate is verified by exact recomposition.  When requested, the
    scaling zeta with Phi(L(X)) = zeta*Phi(X) (zeta^(D-1) = 1) is verified on
    truncated series.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    F = ds.iterate(n)
    D = F.degree
    e1 = F.coeff(D - 1)
    out: list[CommutingLinear] = []
    candidates = [Fraction(1)]
    if D % 2 == 1:
        candidates.append(Fraction(-1))
    for a in candidates:
        b = e1 * (a - 1) / D
        L = Poly([b, a])
        if L.compose(F) == F.compose(L):
            zeta = _boettcher_scaling(ds, a, b, order) if check_boettcher else None
            out.append(CommutingLinear(a, b, zeta))
    return out


def _boettcher_scaling(ds: PolyDS, a: Fraction, b: Fraction,
                       order: int) -> Optional[Fraction]:
    """zeta with Phi(aX + b) = zeta * Phi(X) up to truncation, else None."""
    from .boettcher import phi_series
    phi = phi_series(ds, order)
    # w_L = 1/(aX+b) as a series in w = 1/X: w/(a + b w)
    denom = LaurentBlock(0, [a, b], trunc=order + 1)
    w_l = LaurentBlock.monomial(1, 1) * denom.inverse()
    coeffs = [phi.coefficient(k) for k in range(1, phi.trunc or order + 1)]
    from .exact import evaluate_series_at_block
    composed = evaluate_series_at_block([Fraction(0)] + coeffs, w_l)
    composed = composed.truncate_to(order + 1)
    zeta = 1 / a
    residual = composed - phi.scale(zeta)
    return zeta if residual.known_is_zero() else None


# ---------------------------------------------------------------------------
# pullback series nu
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NuSeries:
    p: int
    curve: PlaneCurve
    k1: int
    k2: int
    phi: PadicScalar
    zeta1: PadicScalar
    zeta2: PadicScalar
    window: int                     # series terms kept: all n+m <= window
    series: PadicSeries
    dropped: tuple[int, ...]        # exponents whose value fell below the tail

    @property
    def kinf(self) -> int:
        return max(abs(self.k1), abs(self.k2))

    def annulus_top_logp(self) -> Fraction:
        """log_p of the outer radius: v(phi) / |k|_inf (inner radius is 1)."""
        return Fraction(self.phi.valuation, self.kinf)


def _n_series_coeffs(curve: PlaneCurve, ds: PolyDS, order: int) -> dict:
    """Exact rational coefficients a_nm of N(x,y) = P(s(x), s(y)), n+m windowed.

    s = 1/Psi is computed from the truncated Boettcher series; a_nm is exact
    for n, m <= order.
    """
    psi = psi_series(ds, order + 2)
    s = psi.inverse()                       # lowest exponent 1, unit coefficient
    if s.trunc is not None and s.trunc <= order:
        raise WindowError(f"series order too small; need 1/Psi beyond x^{order}")
    P = curve.poly
    max_i = P.deg_x
    max_j = P.deg_y
    # powers s^i as coefficient rows up to exponent `order`
    rows: list[list[Fraction]] = []
    cur = [Fraction(1)] + [Fraction(0)] * order        # s^0
    rows.append(cur)
    s_coeffs = [s.coefficient(e) if e >= s.low else Fraction(0)
                for e in range(0, order + 1)]
    for _ in range(max(max_i, max_j)):
        nxt = [Fraction(0)] * (order + 1)
        for idx in range(order + 1):
            acc = Fraction(0)
            for k in range(0, idx + 1):
                if s_coeffs[k] != 0 and rows[-1][idx - k] != 0:
                    acc += s_coeffs[k] * rows[-1][idx - k]
            nxt[idx] = acc
        rows.append(nxt)
    out: dict[tuple[int, int], Fraction] = {}
    for (i, j), c in P.terms:
        row_i, row_j = rows[i], rows[j]
        for n in range(0, order + 1):
            if row_i[n] == 0:
                continue
            base = c * row_i[n]
            for m in range(0, order + 1 - n):
                if row_j[m] != 0:
                    val = base * row_j[m]
                    if val != 0:
                        out[(n, m)] = out.get((n, m), Fraction(0)) + val
    return {k: v for k, v in out.items() if v != 0}


def build_nu(curve: PlaneCurve, ds: PolyDS, p: int, phi,
             zeta1: PadicScalar, zeta2: PadicScalar,
             k1: int, k2: int, window: int,
             digits: int = 64) -> NuSeries:
    """Assemble nu(x) with certified tail bookkeeping.

    Requires good reduction at p with p coprime to d (so 1/Psi has p-integral
    coefficients and all |a_nm| <= 1), |phi|_p < 1, and the normalization
    k1 > 0, k1 >= k2, gcd(k1, k2) = 1.  Terms with n+m <= window are summed
    exactly; every omitted term is bounded by |phi|^(window+1), which the
    attached tail certificate propagates to nonzero radii.
    """
    if not (k1 > 0 and k1 >= k2 and gcd(k1, k2) == 1):
        raise DomainError("need k1 > 0, k1 >= k2, gcd(k1, k2) = 1")
    if not ds.good_reduction(p) or not ds.coprime_to_degree(p):
        raise DomainError("need good reduction at p with p coprime to d")
    phi = phi if isinstance(phi, PadicScalar) else PadicScalar.from_rational(phi, p, digits)
    if phi.zero or phi.valuation < 1:
        raise DomainError("need |phi|_p < 1")
    for z in (zeta1, zeta2):
        if z.p != p or z.zero or z.valuation != 0:
            raise DomainError("zeta parameters must be p-adic units")
    a_nm = _n_series_coeffs(curve, ds, window)
    vphi = phi.valuation
    # powers of the unit parameters
    z1_pow = [zeta1 ** 0]
    z2_pow = [zeta2 ** 0]
    for _ in range(window):
        z1_pow.append(z1_pow[-1] * zeta1)
        z2_pow.append(z2_pow[-1] * zeta2)
    phi_pow = [phi ** 0]
    for _ in range(2 * window):
        phi_pow.append(phi_pow[-1] * phi)
    acc: dict[int, PadicScalar] = {}
    for (n, m), c in a_nm.items():
        if n + m > window:
            continue
        k = k1 * n + k2 * m
        term = PadicScalar.from_rational(c, p, digits) * phi_pow[n + m]
        term = term * z1_pow[n] * z2_pow[m]
        acc[k] = acc[k] + term if k in acc else term
    tail_v = vphi * (window + 1)          # |omitted| <= p^-tail_v
    kept: dict[int, PadicScalar] = {}
    dropped: list[int] = []
    for k, scalar in sorted(acc.items()):
        up = scalar.logp_abs_upper()
        if up is None or up <= Fraction(-tail_v):
            dropped.append(k)
        else:
            kept[k] = scalar
    kinf = max(abs(k1), abs(k2))

    def tail_bound(t: Fraction) -> Fraction:
        # omitted lines: bound max over ell > window of ell*(max(t k1, t k2) - vphi)
        slope = max(t * k1, t * k2) - vphi
        if slope >= 0:
            raise WindowError("radius outside the certified annulus")
        line = Fraction(window + 1) * slope
        drop = max((Fraction(-tail_v) + k * t for k in dropped),
                   default=None)
        return line if drop is None else max(line, drop)

    series = PadicSeries(p, tuple(sorted(kept.items())), complete=False,
                         tail_logp=tail_bound)
    return NuSeries(p, curve, k1, k2, phi, zeta1, zeta2, window, series,
                    tuple(dropped))


@dataclass(frozen=True)
class NuLedger:
    sup1_logp: Fraction             # log_p |nu|_1
    kappa1: int
    kinf: int
    lemma_lhs: Fraction             # -kappa(nu, 1)
    lemma_rhs: Fraction             # |k|_inf log|nu|_1 / log|phi|
    lemma_holds: bool
    sup_leq_one: bool
    t_used: Fraction                # outer PJ radius p^t
    pj_count_logp: Fraction         # N(nu, 0, p^t) in units of log p
    zero_bound: Fraction            # unit-circle zero bound -kappa - sup1/t
    c1_instance: Fraction           # |k|_inf * t / vphi for this instance
    bound12: Fraction               # 2*C1*|k|_inf*(-sup1)/vphi


def nu_estimates(nu: NuSeries) -> NuLedger:
    """Exact ledger: sup norm and kappa at |x| = 1, the leading-index
    inequality, and the Poisson-Jensen zero count on the annulus."""
    if nu.series.is_window_zero:
        raise DomainError("window is zero: possibly the zero function; "
                          "cannot certify nonvanishing beyond the window")
    sup1 = sup_norm(nu.series, Radius.ppow(0))
    assert isinstance(sup1, PNorm)
    k1_ = kappa(nu.series, Radius.ppow(0))
    vphi = Fraction(nu.phi.valuation)
    lhs = Fraction(-k1_)
    # log|nu|_1 / log|phi| = sup1.logp / (-vphi)
    rhs = nu.kinf * sup1.logp / (-vphi)
    t_top = nu.annulus_top_logp()
    t = t_top / 2
    pj = count_zeros_pj(nu.series, Radius.ppow(0), Radius.ppow(t))
    zero_bound = Fraction(-k1_) - sup1.logp / t
    c1 = Fraction(nu.kinf) * t / vphi
    bound12 = 2 * c1 * nu.kinf * (-sup1.logp) / vphi
    return NuLedger(
        sup1_logp=sup1.logp,
        kappa1=k1_,
        kinf=nu.kinf,
        lemma_lhs=lhs,
        lemma_rhs=rhs,
        lemma_holds=lhs <= rhs,
        sup_leq_one=sup1.logp <= 0,
        t_used=t,
        pj_count_logp=pj,
        zero_bound=zero_bound,
        c1_instance=c1,
        bound12=bound12,
    )
