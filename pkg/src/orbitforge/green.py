"""Escape-rate potential (Green function) with rigorous enclosures, and
equipotential level-curve tracing.

g(z) = lim log+|f^n(z)| / d^n.  Once an orbit certifiably crosses the escape
radius R = 1 + sum|a_i|, the partial value log|f^k(z)|/d^k encloses g within
an explicit geometric tail bound; orbits that stay below R for the whole
budget yield the one-sided enclosure [0, log(2R)/d^n], reported with
``escaped=False`` (a heuristic "bounded", never a proof that g = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mpf

from .ball import CBall, as_ball, eval_poly_ball
from .dynamics import PolyDS
from .errors import DomainError, PrecisionError
from .exact import Poly, rat


@dataclass(frozen=True)
class GreenValue:
    value: CBall          # real ball, natural-log units, >= 0
    iterations_used: int
    escaped: bool


@dataclass(frozen=True)
class TracePoint:
    theta: float            # parameter angle of the Boettcher coordinate sample
    point: CBall
    g_residual: float       # certified bound on |g(point) - r|
    sheet: int


@dataclass(frozen=True)
class LevelCurve:
    r: Fraction
    points: list[TracePoint]
    closed: bool
    dropped: int            # samples lost to failed refinement


def _clip_nonneg(ball: CBall) -> CBall:
    lo = ball.re_mid - ball.rad
    hi = ball.re_mid + ball.rad
    if lo >= 0:
        return ball
    hi = max(hi, mpf(0))
    return CBall((hi / 2), mpf(0), hi / 2)


def green_eval(ds: PolyDS, z, tol: Fraction = Fraction(1, 10**10),
               max_iter: Optional[int] = None) -> GreenValue:
    """Certified enclosure of the escape rate at z.

    When the orbit is certified past the escape radius, the returned ball has
    radius at most tol.  Otherwise the enclosure is [0, log(2R)/d^n] after n
    budgeted steps, flagged escaped=False.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    max_iter = max_iter or ds.settings.max_iterations
    z = as_ball(z)
    d = ds.d
    s = ds.coeff_abs_sum
    s_up = mpf(s.numerator) / mpf(s.denominator) * (1 + mpf(2) ** -50)
    r_esc = ds.escape_radius
    r_up = mpf(r_esc.numerator) / mpf(r_esc.denominator) * (1 + mpf(2) ** -50)
    tol_f = mpf(tol.numerator) / mpf(tol.denominator)

    upper = mpf("inf")          # running upper bound for the bounded case
    cur = z
    n = 0
    escaped_at = None
    while n <= max_iter + 200:
        lo, hi = cur.abs_lower(), cur.abs_upper()
        # one-sided bound g(z) = g(z_n)/d^n <= log(2 max(|z_n|, R)) / d^n
        upper = min(upper, mpmath.log(2 * max(hi, r_up)) / mpf(d) ** n)
        if escaped_at is None and lo > r_up and n <= max_iter:
            escaped_at = n
        if escaped_at is not None:
            # shrink the tail: valid once |z_k| >= 2R (then |z_{j+1}| >= 2|z_j|)
            if lo >= 2 * r_up:
                tail = 4 * s_up / (mpf(d) ** (n + 1) * lo) if s != 0 else mpf(0)
                logball = cur.log_abs()
                total_rad = tail + logball.rad / mpf(d) ** n
                if total_rad <= tol_f:
                    val = CBall(logball.re_mid / mpf(d) ** n, mpf(0), total_rad)
                    return GreenValue(_clip_nonneg(val), n, True)
        if n == max_iter and escaped_at is None:
            break
        cur = eval_poly_ball(ds.f, cur)
        n += 1
        if cur.rad > mpf(10) ** 200:
            break
    if escaped_at is not None:
        raise PrecisionError("escape certified but the tail did not reach tol; "
                             "raise precision or max_iter")
    val = CBall(upper / 2, mpf(0), upper / 2)
    return GreenValue(_clip_nonneg(val), min(n, max_iter), False)


def green_functional_check(ds: PolyDS, z, tol: Fraction = Fraction(1, 10**10)) -> CBall:
    """Residual ball for g(f(z)) - d*g(z); contains 0 for every z."""
    z = as_ball(z)
    fz = eval_poly_ball(ds.f, z)
    g1 = green_eval(ds, fz, tol)
    g2 = green_eval(ds, z, tol)
    return g1.value - g2.value * CBall.exact_int(ds.d)


def _unit_sample(theta: float) -> CBall:
    return CBall.from_complex(mpmath.expjpi(2 * mpmath.mpf(theta)))


def _psi_point(ds: PolyDS, order: int, radius: mpf, theta: float) -> CBall:
    from .boettcher import evaluate_psi
    x = _unit_sample(theta) * CBall(radius, mpf(0), mpf(0))
    val, _heuristic = evaluate_psi(ds, order, x)
    return val


def _newton_refine(F: Poly, target: CBall, guess: CBall, steps: int = 60) -> Optional[CBall]:
    """Certified solution of F(z) = target near guess via interval Newton."""
    dF = F.derivative()
    z = CBall(guess.re_mid, guess.im_mid, mpf(0))
    for _ in range(steps):
        fz = eval_poly_ball(F, z) - target
        dz = eval_poly_ball(dF, z)
        if dz.contains_zero():
            return None
        step = fz / dz
        z = CBall(z.re_mid - step.re_mid, z.im_mid - step.im_mid, mpf(0))
        if step.abs_upper() < mpf(2) ** (20 - mpmath.mp.prec) * (1 + z.abs_mid()):
            break
    rho = mpf(2) ** (24 - mpmath.mp.prec) * (1 + z.abs_mid()) + 4 * target.rad
    for _ in range(40):
        box = CBall(z.re_mid, z.im_mid, rho)
        dball = eval_poly_ball(dF, box)
        if not dball.contains_zero():
            center = CBall(z.re_mid, z.im_mid, mpf(0))
            newton = center - (eval_poly_ball(F, center) - target) / dball
            if box.contains(newton):
                return newton
        rho *= 4
    return None


def equipotential_trace(ds: PolyDS, r: Fraction, n_points: Optional[int] = None,
                        tol: Fraction = Fraction(1, 10**8),
                        order: Optional[int] = None,
                        workers: Optional[int] = None) -> LevelCurve:
    """Sample the level curve g = r, re-certifying every point with green_eval.

    Inside the Boettcher disc the curve is Psi(exp(-r) e^{i theta}).  When
    exp(-r) reaches the convergence radius, the level d^k r is traced instead
    and pulled back through f^k by certified Newton refinement, yielding d^k
    sheets per base angle (sheets ordered by argument, ties by real part).
    Point evaluations are independent; ``workers`` caps the thread pool.
    """
    from .boettcher import radius_archimedean

    r = rat(r)
    if r <= 0:
        raise DomainError("the potential level r must be positive")
    n_points = n_points or ds.settings.trace_points
    order = order or ds.settings.series_order
    workers = workers or ds.settings.threads
    arch = radius_archimedean(ds)
    r_lo = max(arch.ball.re_mid - arch.ball.rad, mpf("0.05"))
    safe = r_lo / 2
    rho = mpmath.exp(-mpf(r.numerator) / mpf(r.denominator))
    k = 0
    while rho ** (ds.d ** k) > safe:
        k += 1
        if ds.d ** k > ds.settings.orbit_degree_cap:
            raise DomainError("level too shallow to trace within the degree cap")
    deep_rho = rho ** (ds.d ** k)

    points: list[TracePoint] = []
    dropped = 0
    if k == 0:
        def sample(j: int) -> Optional[TracePoint]:
            theta = j / n_points
            pt = _psi_point(ds, order, rho, theta)
            accepted = _certify_level(ds, pt, r, tol)
            if accepted is None:
                # polish through a deeper level before giving up
                kk = 1
                while rho ** (ds.d ** kk) > safe * safe and ds.d ** kk <= 64:
                    kk += 1
                target = _psi_point(ds, order, rho ** (ds.d ** kk),
                                    (theta * ds.d ** kk) % 1.0)
                refined = _newton_refine(ds.iterate(kk), target, pt)
                if refined is not None:
                    accepted = _certify_level(ds, refined, r, tol)
            if accepted is None:
                return None
            return TracePoint(theta, accepted[0], accepted[1], 0)

        results = _map_points(sample, range(n_points), workers)
        points = [pt for pt in results if pt is not None]
        dropped = n_points - len(points)
        return LevelCurve(r, points, True, dropped)

    sheets = ds.d ** k
    n_base = max(1, -(-n_points // sheets))
    F = ds.iterate(k)
    for j in range(n_base):
        theta = j / n_base
        target = _psi_point(ds, order, deep_rho, theta)
        roots = _complex_roots_shifted(F, target)
        layer = []
        for root in roots:
            accepted = _certify_level(ds, root, r, tol)
            if accepted is None:
                dropped += 1
                continue
            layer.append(TracePoint(theta, accepted[0], accepted[1], 0))
        layer.sort(key=lambda tp: (mpmath.atan2(tp.point.im_mid, tp.point.re_mid),
                                   tp.point.re_mid))
        layer = [TracePoint(tp.theta, tp.point, tp.g_residual, i)
                 for i, tp in enumerate(layer)]
        points.extend(layer)
    return LevelCurve(r, points[:n_points], False, dropped)


def _map_points(fn, items, workers: int) -> list:
    """Order-preserving map, threaded when workers > 1 (pure evaluations)."""
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _complex_roots_shifted(F: Poly, target: CBall) -> list[CBall]:
    """Certified roots of F(z) = target (simple roots assumed)."""
    coeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
              for c in reversed(F.coeffs)]
    coeffs[-1] -= target.mid
    approx = mpmath.polyroots(coeffs, maxsteps=200, extraprec=mpmath.mp.prec)
    out = []
    for a in approx:
        ball = _newton_refine(F, target, CBall.from_complex(a))
        if ball is not None:
            out.append(ball)
    return out


def _certify_level(ds: PolyDS, pt: CBall, r: Fraction,
                   tol: Fraction) -> Optional[tuple[CBall, float]]:
    """Re-certify |g(pt) - r| <= tol; returns (point, residual bound)."""
    if not pt.rad < mpf(1):
        return None
    try:
        g = green_eval(ds, pt, tol / 4)
    except PrecisionError:
        return None
    if not g.escaped:
        return None
    r_f = mpf(r.numerator) / mpf(r.denominator)
    residual = abs(g.value.re_mid - r_f) + g.value.rad
    if residual <= mpf(tol.numerator) / mpf(tol.denominator):
        return pt, float(residual)
    return None
