"""Green function enclosures and equipotential traces."""

import math
import random
from fractions import Fraction as F

import pytest

from orbitforge.ball import CBall
from orbitforge.dynamics import PolyDS
from orbitforge.errors import DomainError
from orbitforge.exact import Poly
from orbitforge.green import equipotential_trace, green_eval, green_functional_check

SQ = PolyDS(Poly.monomial(2))
DS1 = PolyDS(Poly([-1, 0, 1]))
DS6 = PolyDS(Poly([-6, 0, 1]))


def _random_disc_point(rng, lo=0.1, hi=10.0):
    r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    t = rng.uniform(0, 2 * math.pi)
    return complex(r * math.cos(t), r * math.sin(t))


def test_power_map_model():
    rng = random.Random(5)
    for _ in range(60):
        z = _random_disc_point(rng)
        g = green_eval(SQ, CBall.from_complex(z), F(1, 10**11))
        expected = max(0.0, math.log(abs(z)))
        assert abs(float(g.value.re_mid) - expected) <= 1e-10
        assert float(g.value.rad) <= 1e-10 or not g.escaped


def test_interior_point_is_zero():
    g = green_eval(SQ, F(1, 2))
    assert not g.escaped
    assert float(g.value.re_mid + g.value.rad) < 1e-20


def test_nonnegative_and_escaped_radius_bound():
    g = green_eval(DS1, F(2), F(1, 10**10))
    assert g.escaped
    assert float(g.value.re_mid - g.value.rad) >= 0
    assert float(g.value.rad) <= 1e-10


def test_functional_equation_random_points():
    rng = random.Random(17)
    for ds in (DS1, DS6):
        for _ in range(40):
            z = CBall.from_complex(_random_disc_point(rng))
            residual = green_functional_check(ds, z, F(1, 10**10))
            assert residual.contains_zero()


def test_critical_point_functional_check():
    residual = green_functional_check(DS6, F(0))
    assert residual.contains_zero()


def test_trace_power_map_circle():
    curve = equipotential_trace(SQ, F(7, 10), n_points=16, tol=F(1, 10**8))
    assert len(curve.points) == 16 and curve.dropped == 0 and curve.closed
    target = math.exp(0.7)
    for pt in curve.points:
        radius = math.hypot(float(pt.point.re_mid), float(pt.point.im_mid))
        assert abs(radius - target) < 1e-6
    # theta = 0 lands on the positive real axis at exp(r)
    first = curve.points[0]
    assert abs(float(first.point.re_mid) - target) < 1e-6
    assert abs(float(first.point.im_mid)) < 1e-6


def test_trace_recertifies_level():
    curve = equipotential_trace(DS1, F(1), n_points=12, tol=F(1, 10**8))
    assert len(curve.points) == 12 and curve.dropped == 0
    for pt in curve.points:
        assert pt.g_residual <= 1e-8


def test_trace_points_map_to_deeper_level():
    r = F(1)
    curve = equipotential_trace(DS1, r, n_points=8, tol=F(1, 10**9))
    for pt in curve.points:
        image = DS1.apply_ball(pt.point)
        g = green_eval(DS1, image, F(1, 10**9))
        assert abs(float(g.value.re_mid) - 2.0) <= 1e-6


def test_trace_conjugation_symmetry():
    curve = equipotential_trace(DS1, F(1), n_points=8, tol=F(1, 10**8))
    pts = [complex(float(p.point.re_mid), float(p.point.im_mid))
           for p in curve.points]
    for z in pts:
        assert min(abs(z.conjugate() - w) for w in pts) < 1e-6


def test_trace_pullback_sheets():
    # exp(-r) above the convergence radius forces pullback through f^k
    curve = equipotential_trace(DS6, F(1, 5), n_points=8, tol=F(1, 10**6))
    assert not curve.closed
    assert len(curve.points) == 8
    for pt in curve.points:
        assert pt.g_residual <= 1e-6


def test_trace_rejects_nonpositive_level():
    with pytest.raises(DomainError):
        equipotential_trace(DS1, F(0), n_points=4)


def test_concurrent_green_eval_on_shared_system():
    # green_eval is pure and the iterate memo is lock-guarded, so a shared
    # PolyDS must give identical answers under concurrent evaluation
    from concurrent.futures import ThreadPoolExecutor

    ds = PolyDS(Poly([-1, 0, 1]))
    rng = random.Random(13)
    points = [CBall.from_complex(_random_disc_point(rng)) for _ in range(24)]
    serial = [float(green_eval(ds, z, F(1, 10**9)).value.re_mid) for z in points]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(
            lambda z: float(green_eval(ds, z, F(1, 10**9)).value.re_mid), points))
    assert serial == parallel
    # concurrent iterate memo fills without corruption
    with ThreadPoolExecutor(max_workers=8) as pool:
        degrees = list(pool.map(lambda n: ds.iterate(n).degree, [5] * 16))
    assert degrees == [32] * 16
