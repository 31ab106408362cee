"""Complex ball arithmetic: midpoint + rigorous absolute error radius.

Midpoints are mpmath floats at a configurable working precision; every
operation widens the radius by the exact-arithmetic error bound plus a
conservative rounding slop (a few ulp of the result).  The represented exact
value is always within ``rad`` of ``re_mid + i*im_mid``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import DomainError, PrecisionError

_PREC = 160


def set_precision(bits: int) -> None:
    global _PREC
    _PREC = max(64, int(bits))
    mpmath.mp.prec = _PREC


set_precision(_PREC)


def _eps() -> mpf:
    return mpf(2) ** (4 - _PREC)


@dataclass(frozen=True)
class CBall:
    re_mid: mpf
    im_mid: mpf
    rad: mpf

    # -- constructors -------------------------------------------------------
    @staticmethod
    def from_rational(re: Fraction, im: Fraction = Fraction(0)) -> "CBall":
        re, im = Fraction(re), Fraction(im)
        rm = mpf(re.numerator) / mpf(re.denominator)
        im_ = mpf(im.numerator) / mpf(im.denominator)
        slop = _eps() * (abs(rm) + abs(im_) + 1)
        return CBall(rm, im_, slop)

    @staticmethod
    def from_complex(z, rad=0) -> "CBall":
        zc = mpmath.mpmathify(z)
        return CBall(mpf(zc.real), mpf(zc.imag), mpf(rad) + _eps() * (abs(zc) + 1))

    @staticmethod
    def exact_int(n: int) -> "CBall":
        return CBall(mpf(n), mpf(0), mpf(0))

    # -- views ---------------------------------------------------------------
    @property
    def mid(self):
        return mpmath.mpc(self.re_mid, self.im_mid)

    def abs_mid(self) -> mpf:
        return mpmath.hypot(self.re_mid, self.im_mid)

    def abs_upper(self) -> mpf:
        return self.abs_mid() * (1 + _eps()) + self.rad

    def abs_lower(self) -> mpf:
        lo = self.abs_mid() * (1 - _eps()) - self.rad
        return lo if lo > 0 else mpf(0)

    def contains_zero(self) -> bool:
        return self.abs_lower() == 0

    def contains(self, other: "CBall") -> bool:
        gap = mpmath.hypot(self.re_mid - other.re_mid, self.im_mid - other.im_mid)
        return gap * (1 + _eps()) + other.rad <= self.rad

    def contains_value(self, re: Fraction, im: Fraction = Fraction(0)) -> bool:
        pt = CBall.from_rational(re, im)
        gap = mpmath.hypot(self.re_mid - pt.re_mid, self.im_mid - pt.im_mid)
        return gap * (1 + _eps()) + pt.rad <= self.rad

    def is_real_symmetric(self) -> bool:
        return abs(self.im_mid) <= self.rad

    def __repr__(self) -> str:
        return f"CBall({mpmath.nstr(self.mid, 12)} +/- {mpmath.nstr(self.rad, 4)})"

    # -- arithmetic ------------------------------------------------------------
    def widen(self, extra) -> "CBall":
        return CBall(self.re_mid, self.im_mid, self.rad + mpf(extra))

    def __add__(self, other: "CBall") -> "CBall":
        re = self.re_mid + other.re_mid
        im = self.im_mid + other.im_mid
        rad = self.rad + other.rad + _eps() * (abs(re) + abs(im) + 1)
        return CBall(re, im, rad)

    def __neg__(self) -> "CBall":
        return CBall(-self.re_mid, -self.im_mid, self.rad)

    def __sub__(self, other: "CBall") -> "CBall":
        return self + (-other)

    def __mul__(self, other: "CBall") -> "CBall":
        a, b = self.mid, other.mid
        prod = a * b
        rad = (abs(a) * other.rad + abs(b) * self.rad + self.rad * other.rad
               + _eps() * (abs(prod) + 1))
        return CBall(mpf(prod.real), mpf(prod.imag), rad)

    def scale_rational(self, q: Fraction) -> "CBall":
        return self * CBall.from_rational(q)

    def reciprocal(self) -> "CBall":
        lo = self.abs_lower()
        if lo == 0:
            raise PrecisionError("reciprocal of a ball containing zero")
        inv = 1 / self.mid
        rad = self.rad / (lo * self.abs_mid()) + _eps() * (abs(inv) + 1)
        return CBall(mpf(inv.real), mpf(inv.imag), rad)

    def __truediv__(self, other: "CBall") -> "CBall":
        return self * other.reciprocal()

    def pow_int(self, n: int) -> "CBall":
        if n < 0:
            return self.pow_int(-n).reciprocal()
        out = CBall.exact_int(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def conjugate(self) -> "CBall":
        return CBall(self.re_mid, -self.im_mid, self.rad)

    # -- real interval helpers ---------------------------------------------
    def log_abs(self) -> "CBall":
        """Real ball enclosing log|z|; requires the ball to exclude zero."""
        lo, hi = self.abs_lower(), self.abs_upper()
        if lo <= 0:
            raise PrecisionError("log|z| of a ball touching zero")
        llo, lhi = mpmath.log(lo), mpmath.log(hi)
        mid = (llo + lhi) / 2
        rad = (lhi - llo) / 2 + _eps() * (abs(mid) + 1)
        return CBall(mid, mpf(0), rad)

    def exp_real(self) -> "CBall":
        """Real ball for exp(x) of a real ball."""
        if abs(self.im_mid) > self.rad * 0 and self.im_mid != 0:
            raise DomainError("exp_real expects a real ball")
        lo = mpmath.exp(self.re_mid - self.rad)
        hi = mpmath.exp(self.re_mid + self.rad)
        mid = (lo + hi) / 2
        rad = (hi - lo) / 2 + _eps() * (abs(mid) + 1)
        return CBall(mid, mpf(0), rad)


def rball(mid, rad=0) -> CBall:
    """Real ball from mpf-able values."""
    m = mpf(mid)
    return CBall(m, mpf(0), mpf(rad) + _eps() * (abs(m) + 1))


def as_ball(z) -> CBall:
    if isinstance(z, CBall):
        return z
    if isinstance(z, (int, Fraction)):
        return CBall.from_rational(Fraction(z))
    if isinstance(z, tuple) and len(z) == 2:
        return CBall.from_rational(Fraction(z[0]), Fraction(z[1]))
    return CBall.from_complex(z)


def horner_ball(coeffs, z: CBall) -> CBall:
    """Evaluate a polynomial with Fraction coefficients at a ball."""
    acc = None
    for c in reversed(list(coeffs)):
        cb = CBall.from_rational(c)
        acc = cb if acc is None else acc * z + cb
    return acc if acc is not None else CBall.exact_int(0)


def eval_poly_ball(p, z: CBall) -> CBall:
    return horner_ball(p.coeffs, z)


def eval_block_ball(block, z: CBall) -> CBall:
    """Evaluate a Laurent block's known terms at a ball (no tail estimate)."""
    terms = block.known_terms()
    if not terms:
        return CBall.exact_int(0)
    total = None
    for e, c in terms:
        term = CBall.from_rational(c) * z.pow_int(e)
        total = term if total is None else total + term
    return total
