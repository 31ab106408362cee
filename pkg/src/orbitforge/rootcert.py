"""Certified complex roots of exact rational polynomials.

Roots are first approximated numerically (mpmath), then certified by one
interval-Newton step: for a ball B around an approximation z0, if
``N = z0 - p(z0)/p'(B)`` is contained in B, then B (hence N) contains exactly
one root of p.  Inputs are expected squarefree; irreducible factors over Q
always are.
"""

from __future__ import annotations

import mpmath

from .ball import CBall, eval_poly_ball, set_precision
from .errors import PrecisionError
from .exact import Poly


def _newton_certify(p: Poly, dp: Poly, z0: CBall, rho) -> CBall | None:
    box = CBall(z0.re_mid, z0.im_mid, mpmath.mpf(rho))
    dball = eval_poly_ball(dp, box)
    if dball.contains_zero():
        return None
    center = CBall(z0.re_mid, z0.im_mid, mpmath.mpf(0))
    newton = center - eval_poly_ball(p, center) / dball
    if box.contains(newton):
        return newton
    return None


def certified_roots(p: Poly, extra_bits: int = 0) -> list[CBall]:
    """All complex roots of a squarefree p as certified balls.

    Deterministic order: sorted by (real, imaginary) midpoint.
    """
    if p.degree < 1:
        return []
    if extra_bits:
        old = mpmath.mp.prec
        set_precision(old + extra_bits)
    try:
        coeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                  for c in reversed(p.coeffs)]
        approx = mpmath.polyroots(coeffs, maxsteps=200, extraprec=mpmath.mp.prec)
        dp = p.derivative()
        out = []
        for r in approx:
            z = CBall.from_complex(r)
            # polish with plain Newton at working precision
            for _ in range(6):
                fz = eval_poly_ball(p, CBall(z.re_mid, z.im_mid, mpmath.mpf(0)))
                dz = eval_poly_ball(dp, CBall(z.re_mid, z.im_mid, mpmath.mpf(0)))
                if dz.contains_zero():
                    break
                step = fz / dz
                z = CBall(z.re_mid - step.re_mid, z.im_mid - step.im_mid, z.rad)
            rho = mpmath.mpf(2) ** (8 - mpmath.mp.prec) * (1 + z.abs_mid())
            ball = None
            for _ in range(40):
                ball = _newton_certify(p, dp, z, rho)
                if ball is not None:
                    break
                rho *= 4
            if ball is None:
                raise PrecisionError(
                    f"could not certify a root of {p!r} near {z!r}")
            out.append(ball)
        out.sort(key=lambda b: (b.re_mid, b.im_mid))
        return out
    finally:
        if extra_bits:
            set_precision(old)
