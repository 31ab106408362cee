"""Boettcher series for monic polynomials: the inverse coordinate Psi with
Psi(X^d) = f(Psi(X)) and a pole of residue 1 at 0, its compositional inverse
Phi with Phi(f(X)) = Phi(X)^d, and convergence-radius estimates per place.

Psi is written X^{-1} g(X) with g(0) = 1; matching coefficients in
g(X^d) = g(X)^d + sum_i a_i X^i g(X)^{d-i} determines each new coefficient
with a unit factor d, so the recursion is exact and never divides by zero.
Phi is obtained by Lagrange term-by-term reversion of X / g(X); the defining
equation of Phi is kept as an independent cross-check.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import mpmath

from .ball import CBall, eval_block_ball, rball
from .dynamics import PolyDS, escaping_critical_points
from .errors import DomainError, PrecisionError
from .exact import LaurentBlock, Poly, evaluate_series_at_block

_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _psi_g_coeffs(f: Poly, order: int) -> list[Fraction]:
    """Coefficients u_0..u_order of g with Psi = X^{-1} g(X)."""
    d = f.degree
    a = [f.coeff(d - i) for i in range(d + 1)]  # a[0] = 1 leading
    u = [Fraction(1)] + [Fraction(0)] * order
    # pw[j][n] = coefficient of X^n in g^j, filled jointly with u
    pw = [[Fraction(0)] * (order + 1) for _ in range(d + 1)]
    pw[0][0] = Fraction(1)
    for j in range(1, d + 1):
        pw[j][0] = Fraction(1)
    for n in range(1, order + 1):
        # provisional column with u[n] = 0
        pw[1][n] = Fraction(0)
        for j in range(2, d + 1):
            s = Fraction(0)
            prev = pw[j - 1]
            for k in range(0, n + 1):
                if u[k] != 0 and prev[n - k] != 0:
                    s += u[k] * prev[n - k]
            pw[j][n] = s
        rhs = pw[d][n]
        for i in range(1, min(d, n) + 1):
            if a[i] != 0:
                rhs += a[i] * pw[d - i][n - i]
        lhs = u[n // d] if n % d == 0 else Fraction(0)
        u[n] = (lhs - rhs) / d
        # fix the provisional column: adding u_n X^n changes [X^n] g^j by j*u_n
        if u[n] != 0:
            for j in range(1, d + 1):
                pw[j][n] += j * u[n]
    return u


def psi_series(ds: PolyDS, order: int) -> LaurentBlock:
    """Truncated Psi: coefficients at exponents -1..order-1, residue 1."""
    if order < 0:
        raise DomainError("order must be >= 0")
    key = ("psi", ds.f.coeffs, order)
    with _CACHE_LOCK:
        if key in _CACHE:
            return _CACHE[key]
    u = _psi_g_coeffs(ds.f, order)
    block = LaurentBlock(-1, u, trunc=order)
    with _CACHE_LOCK:
        _CACHE[key] = block
    return block


def phi_series(ds: PolyDS, order: int) -> LaurentBlock:
    """Truncated Phi as a series in w = 1/X: w + e_2 w^2 + ... + e_order w^order.

    Reversion of t = z / g(z): the coefficient of t^n is [z^(n-1)] g(z)^n / n.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    key = ("phi", ds.f.coeffs, order)
    with _CACHE_LOCK:
        if key in _CACHE:
            return _CACHE[key]
    width = max(order, 1)
    u = _psi_g_coeffs(ds.f, width - 1)        # g coefficients 0..width-1
    e = [Fraction(0)] * (order + 1)
    if order >= 1:
        gi = [Fraction(1)] + [Fraction(0)] * (width - 1)   # g^(n-1) to index width-1
        nz = [k for k, c in enumerate(u) if c != 0]
        for n in range(1, order + 1):
            new = [Fraction(0)] * width
            for k in nz:
                uk = u[k]
                for idx in range(k, width):
                    g_val = gi[idx - k]
                    if g_val != 0:
                        new[idx] += uk * g_val
            gi = new
            e[n] = gi[n - 1] / n
    block = LaurentBlock(1, e[1:], trunc=order + 1)
    with _CACHE_LOCK:
        _CACHE[key] = block
    return block


@dataclass(frozen=True)
class BoettcherPair:
    psi: LaurentBlock     # series in X around 0, lowest exponent -1
    phi: LaurentBlock     # series in w = 1/X
    order: int
    ds: PolyDS

    def verify(self) -> bool:
        return (psi_equation_residual(self.ds, self.order).known_is_zero()
                and phi_equation_residual(self.ds, self.order).known_is_zero()
                and phi_psi_identity_residual(self.ds, self.order).known_is_zero())


def boettcher_pair(ds: PolyDS, order: int) -> BoettcherPair:
    return BoettcherPair(psi_series(ds, order), phi_series(ds, order), order, ds)


def psi_equation_residual(ds: PolyDS, order: int) -> LaurentBlock:
    """Psi(X^d) - f(Psi(X)) on all computable coefficients."""
    psi = psi_series(ds, order)
    return psi.compose_monomial(ds.d) - psi.compose_poly(ds.f)


def phi_equation_residual(ds: PolyDS, order: int) -> LaurentBlock:
    """Phi(f(X)) - Phi(X)^d, computed in the variable w = 1/X."""
    phi = phi_series(ds, order)
    d = ds.d
    # 1/f(1/w) = w^d / h(w) with h(w) = 1 + a_1 w + ... + a_d w^d
    h = Poly(list(reversed(ds.f.coeffs)))
    h_inv = LaurentBlock.from_poly(h, trunc=order + 1).inverse()
    w_f = LaurentBlock.monomial(d, 1) * h_inv
    phi_coeffs = [phi.coefficient(k) if k >= phi.low else Fraction(0)
                  for k in range(1, (phi.trunc or order + 1))]
    # Phi(f) = sum_k e_k * (w^d/h)^k, powers taken incrementally
    total = LaurentBlock.zero(order + 1)
    power = w_f
    for k, c in enumerate(phi_coeffs, start=1):
        if c != 0:
            total = total + power.scale(c)
        if power.low > order:
            break
        if k < len(phi_coeffs):
            power = power * w_f
    phi_pow = phi ** d
    return total - phi_pow


def phi_psi_identity_residual(ds: PolyDS, order: int) -> LaurentBlock:
    """Phi(Psi(x)) - x in the variable x (compositional inverse check).

    Phi is a series in w = 1/X, so Phi(Psi(x)) = sum e_k (1/Psi(x))^k.
    """
    psi = psi_series(ds, order)
    phi = phi_series(ds, order)
    s = psi.inverse()               # 1/Psi, a series with lowest exponent 1
    coeffs = [phi.coefficient(k) if k >= 1 else Fraction(0)
              for k in range(1, (phi.trunc or order + 1))]
    total = evaluate_series_at_block([Fraction(0)] + coeffs, s)
    # the first missing Phi coefficient (index order+1) feeds exponent order+1
    total = total.truncate_to(order + 1)
    return total - LaurentBlock.monomial(1, 1, trunc=total.trunc)


def evaluate_psi(ds: PolyDS, order: int, x: CBall) -> tuple[CBall, bool]:
    """Numeric Psi(x) from the truncated series plus a tail estimate.

    The tail is a geometric bound extrapolated from the last 5 computed
    coefficients, widened by 2; it is an estimate, not a certificate, so the
    returned flag marks the value as heuristic.  Callers needing rigor must
    re-certify (the Green module does).
    """
    psi = psi_series(ds, order)
    val = eval_block_ball(psi, x)
    absx = x.abs_upper()
    window = [(e, mpmath.mpf(float(abs(c)))) for e, c in psi.known_terms()][-5:]
    if not window:
        return val, False            # finitely many terms, e.g. f = X^d
    # per-exponent growth rate from consecutive nonzero terms
    q = mpmath.mpf(1)
    for (e1, c1), (e2, c2) in zip(window, window[1:]):
        q = max(q, (c2 / c1) ** (mpmath.mpf(1) / (e2 - e1)))
    e_last = window[-1][0]
    scale = max(c * q ** (e_last - e) for e, c in window)
    first_unknown = psi.trunc if psi.trunc is not None else psi.top + 1
    if q * absx >= 1:
        raise PrecisionError(
            "heuristic tail diverges at this radius; raise the series order")
    tail = (2 * scale * q ** (first_unknown - e_last) * absx ** first_unknown
            / (1 - q * absx))
    return val.widen(tail), True


class NonArchRadius(Enum):
    ONE = "one"
    LEQ_ONE_UNKNOWN = "leq-one-unknown"


def radius_nonarch(ds: PolyDS, p: int) -> NonArchRadius:
    """Boettcher convergence radius at a finite prime.

    Good reduction with p coprime to d makes every Psi coefficient p-integral
    (the recursion only divides by d), so the series converges on the open
    unit disc and the radius is 1 for non-exceptional maps.  Otherwise only
    the general bound (<= 1 for non-exceptional f) is reported.
    """
    if p < 2:
        raise DomainError("p must be a prime")
    if ds.good_reduction(p) and ds.coprime_to_degree(p):
        return NonArchRadius.ONE
    return NonArchRadius.LEQ_ONE_UNKNOWN


@dataclass(frozen=True)
class ArchRadius:
    ball: CBall
    certified: bool          # False when undecided critical points widen the result
    escaping_count: int
    undecided_count: int


def radius_archimedean(ds: PolyDS, tol: Fraction = Fraction(1, 10**10)) -> ArchRadius:
    """R = min over escaping critical points of exp(-g(c)); 1 when none escape.

    Undecided critical points widen the ball to cover both cases and clear
    the certified flag.
    """
    from .green import green_eval  # local import: green depends on this module

    report = escaping_critical_points(ds)
    if not report.escaping and not report.undecided:
        return ArchRadius(rball(1), True, 0, 0)
    candidates = []
    for cp in report.escaping:
        g = green_eval(ds, cp.ball, tol)
        candidates.append((-g.value).exp_real())
    best = min(candidates, key=lambda b: b.re_mid - b.rad, default=rball(1))
    if report.undecided:
        # an undecided point c has g(c) in [0, U]; exp(-g(c)) may reach
        # down to exp(-U), and the connected case (radius 1) stays possible
        lo = best.re_mid - best.rad
        for cp in report.undecided:
            g = green_eval(ds, cp.ball, tol)
            lo = min(lo, (-g.value).exp_real().re_mid - g.value.rad)
        lo = max(lo, mpmath.mpf(0))
        hi = mpmath.mpf(1)
        mid = (lo + hi) / 2
        return ArchRadius(CBall(mid, mpmath.mpf(0), (hi - lo) / 2),
                          False, len(report.escaping), len(report.undecided))
    return ArchRadius(best, True, len(report.escaping), 0)
