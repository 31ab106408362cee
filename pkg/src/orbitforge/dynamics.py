"""Monic polynomial dynamical systems over Q.

Covers monic normalization by linear conjugation, detection of power-map /
Chebyshev conjugates, certified escape of critical points, exact
preperiodicity classification of rational points, and the search for finite
places of good reduction witnessing escape.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .ball import CBall, as_ball, eval_poly_ball
from .config import DEFAULTS, Settings
from .errors import DomainError, ResourceError, UndecidedError
from .exact import Poly, rat
from .factor import factor_rational
from .rootcert import certified_roots


def _v_p(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if q == 0:
        raise DomainError("valuation of zero")
    v, n = 0, q.numerator
    while n % p == 0:
        n //= p
        v += 1
    if v:
        return v
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


class PolyDS:
    """A monic polynomial map of degree >= 2 with cached iterates.

    The iterate memo is guarded by a lock; all other state is immutable.
    """

    def __init__(self, f: Poly, settings: Settings = DEFAULTS):
        if f.degree < 2:
            raise DomainError("dynamical degree must be >= 2")
        if f.lead != 1:
            raise DomainError("PolyDS requires a monic polynomial; use normalize_monic")
        self.f = f
        self.d = f.degree
        self.settings = settings
        self._iterates: dict[int, Poly] = {0: Poly.x(), 1: f}
        self._lock = threading.Lock()
        self._crit: Optional[list["CriticalPoint"]] = None

    def __repr__(self) -> str:
        return f"PolyDS({self.f!r})"

    def iterate(self, n: int) -> Poly:
        if n < 0:
            raise DomainError("iterate index must be >= 0")
        with self._lock:
            if n in self._iterates:
                return self._iterates[n]
            if self.d ** n > self.settings.max_poly_degree:
                raise ResourceError(
                    f"iterate degree {self.d}^{n} exceeds cap "
                    f"{self.settings.max_poly_degree}")
            m = max(k for k in self._iterates if k <= n)
            cur = self._iterates[m]
            for k in range(m + 1, n + 1):
                cur = cur.compose(self.f)
                self._iterates[k] = cur
            return cur

    def apply(self, x: Fraction) -> Fraction:
        return self.f(x)

    def apply_ball(self, z: CBall) -> CBall:
        return eval_poly_ball(self.f, z)

    # -- standard constants ---------------------------------------------------
    @property
    def coeff_abs_sum(self) -> Fraction:
        """Sum of |a_i| over the non-leading coefficients."""
        return sum((abs(c) for c in self.f.coeffs[:-1]), Fraction(0))

    @property
    def escape_radius(self) -> Fraction:
        """Certified archimedean escape bound: any |z| > R strictly escapes.

        R = 1 + sum_i |a_i|; then |f(z)| >= |z|^d / R > |z| for |z| > R.
        """
        return 1 + self.coeff_abs_sum

    def height_comparison_constant(self) -> float:
        """Exposed comparison constant sum_i log+|a_i| + log 2 for |h - hhat|."""
        import math
        total = math.log(2.0)
        for c in self.f.coeffs[:-1]:
            if abs(c) > 1:
                total += math.log(float(abs(c)))
        return total

    def good_reduction(self, p: int) -> bool:
        """Good reduction at p: every non-leading coefficient is p-integral."""
        return all(c == 0 or _v_p(c, p) >= 0 for c in self.f.coeffs[:-1])

    def coprime_to_degree(self, p: int) -> bool:
        return self.d % p != 0

    def padic_escape_radius_exponent(self, p: int) -> Fraction:
        """log_p of the p-adic escape bound max(1, max_i |a_i|_p^{1/i}).

        For |x|_p above this bound the leading term dominates and
        |f(x)|_p = |x|_p^d exactly.
        """
        best = Fraction(0)
        d = self.d
        for i in range(1, d + 1):
            a = self.f.coeff(d - i)
            if a != 0:
                best = max(best, Fraction(-_v_p(a, p), i))
        return best

    def padic_dominated(self, p: int, v_x: int) -> bool:
        """True when v_p(x) = v_x < 0 makes the leading term strictly dominant."""
        if v_x >= 0:
            return False
        d = self.d
        for i in range(1, d + 1):
            a = self.f.coeff(d - i)
            if a != 0 and not _v_p(a, p) > i * v_x:
                return False
        return True

    def bad_reduction_primes(self) -> list[int]:
        primes: set[int] = set()
        for c in self.f.coeffs[:-1]:
            if c != 0:
                primes.update(_prime_factors(c.denominator))
        return sorted(primes)

    # -- critical points -------------------------------------------------------
    def critical_points(self) -> list["CriticalPoint"]:
        with self._lock:
            if self._crit is None:
                self._crit = _critical_points(self.f)
            return list(self._crit)


@dataclass(frozen=True)
class CriticalPoint:
    ball: CBall
    exact: Optional[Fraction]   # set when the point is rational
    multiplicity: int


def _critical_points(f: Poly) -> list[CriticalPoint]:
    df = f.derivative()
    out: list[CriticalPoint] = []
    for factor, mult in factor_rational(df):
        if factor.degree == 1:
            root = -factor.coeff(0)
            out.append(CriticalPoint(CBall.from_rational(root), root, mult))
        else:
            for ball in certified_roots(factor):
                out.append(CriticalPoint(ball, None, mult))
    out.sort(key=lambda cp: (cp.ball.re_mid, cp.ball.im_mid))
    return out


# ---------------------------------------------------------------------------
# monic normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearConjugacy:
    """The map L(x) = c*x used to pass to a monic model (L o g o L^{-1})."""

    scale: Union[Fraction, CBall]
    rational: bool

    def describe(self) -> str:
        if self.rational:
            from .exact import rat_str
            return f"L(x) = {rat_str(self.scale)}*x"
        return f"L(x) = c*x with c in {self.scale!r}"


def _rational_kth_root(q: Fraction, k: int) -> Optional[Fraction]:
    """Exact real k-th root of q over Q, or None.  k >= 1."""
    if k == 1:
        return q
    if q == 0:
        return Fraction(0)
    if q < 0 and k % 2 == 0:
        return None
    sign = -1 if q < 0 else 1
    num, den = abs(q.numerator), q.denominator

    def iroot(n: int) -> Optional[int]:
        if n == 0:
            return 0
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** k == n:
                return cand
        return None

    rn, rd = iroot(num), iroot(den)
    if rn is None or rd is None:
        return None
    return Fraction(sign * rn, rd)


def normalize_monic(g: Poly, settings: Settings = DEFAULTS) -> tuple[PolyDS, LinearConjugacy]:
    """Monic model of g by the conjugation L(x) = c*x with c^(d-1) = lead(g).

    The conjugate has coefficients a_i * c^i / lead(g); a rational c is
    preferred.  When no rational c exists the conjugate is returned only if
    its coefficients happen to be rational anyway (each needed power c^i is a
    rational root); in that case the recorded scale is a certified ball.
    """
    if g.degree < 2:
        raise DomainError("normalization requires degree >= 2")
    d = g.degree
    a0 = g.lead
    if a0 == 1:
        return PolyDS(g, settings), LinearConjugacy(Fraction(1), True)
    c = _rational_kth_root(a0, d - 1)
    if c is not None and d % 2 == 0 and c < 0:
        # prefer the positive representative when both signs work
        c = -c if (-c) ** (d - 1) == a0 else c
    if c is not None:
        # ascending: coefficient of X^j in the conjugate is a_{d-j} c^{d-j} / a0
        coeffs = [g.coeffs[j] * c ** (d - j) / a0 for j in range(d + 1)]
        conj = Poly(coeffs)
        return PolyDS(conj, settings), LinearConjugacy(c, True)
    # No rational c.  Coefficient i needs c^i = a0^(i/(d-1)) to be rational.
    coeffs_desc = []
    for i in range(0, d + 1):
        a_i = g.coeffs[d - i]
        if i == 0:
            coeffs_desc.append(Fraction(1))
            continue
        if a_i == 0:
            coeffs_desc.append(Fraction(0))
            continue
        power = _rational_kth_root(a0**i, d - 1)
        if power is None:
            raise DomainError(
                "no monic conjugate with rational coefficients exists "
                f"(coefficient of X^{d - i} needs an irrational scaling)")
        coeffs_desc.append(a_i * power / a0)
    conj = Poly(list(reversed(coeffs_desc)))
    # numeric record of the irrational (possibly complex) scale
    import mpmath
    mag = mpmath.power(abs(mpmath.mpf(a0.numerator) / mpmath.mpf(a0.denominator)),
                       mpmath.mpf(1) / (d - 1))
    if a0 > 0:
        scale_ball = CBall.from_complex(mag)
    else:
        scale_ball = CBall.from_complex(mag * mpmath.exp(1j * mpmath.pi / (d - 1)))
    return PolyDS(conj, settings), LinearConjugacy(scale_ball, False)


# ---------------------------------------------------------------------------
# exceptional polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExceptionalVerdict:
    kind: Optional[str]          # "power" | "chebyshev" | "neg-chebyshev" | None
    over_extension: bool = False  # conjugacy witness needs an irrational scaling

    @property
    def is_exceptional(self) -> bool:
        return self.kind is not None


def chebyshev_monic(d: int) -> Poly:
    """Monic Chebyshev-normalized family: T2 = X^2 - 2, T_{n+1} = X*T_n - T_{n-1}."""
    if d < 0:
        raise DomainError("degree must be >= 0")
    prev, cur = Poly([2]), Poly.x()
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, Poly.x() * cur - prev
    return cur


def _alternating_flip(p: Poly) -> Poly:
    """Coefficient of X^(d-2j) scaled by (-1)^j; conjugation by a 4th root of 1."""
    d = p.degree
    out = [Fraction(0)] * (d + 1)
    for e, c in enumerate(p.coeffs):
        if c == 0:
            continue
        if (d - e) % 2 != 0:
            out[e] = c  # odd-offset terms (vanish for Chebyshev inputs)
        else:
            j = (d - e) // 2
            out[e] = c if j % 2 == 0 else -c
    return Poly(out)


def depress(f: Poly) -> tuple[Poly, Fraction]:
    """Translate conjugation killing the X^(d-1) term: returns (f_dep, shift s)
    with f_dep(x) = f(x - s) + s and s = a_{d-1}/d."""
    d = f.degree
    s = f.coeff(d - 1) / d
    shifted = f.compose(Poly([-s, 1])) + Poly([s])
    return shifted, s


def detect_exceptional(ds: PolyDS) -> ExceptionalVerdict:
    """Classify conjugates of power maps and Chebyshev maps.

    The depressed representative is compared with X^d and the monic Chebyshev
    normal forms under the rational residual conjugations x -> +/-x.  A match
    with the alternating-flip form is a Chebyshev conjugate over Q(i): it is
    reported with ``over_extension`` when the rational witness does not exist.
    """
    f, _ = depress(ds.f)
    d = ds.d
    if f == Poly.monomial(d):
        return ExceptionalVerdict("power")
    cheb = chebyshev_monic(d)
    if f == cheb:
        return ExceptionalVerdict("chebyshev")
    if d % 2 == 1 and f == _alternating_flip(cheb):
        # flip = conjugate of -T_d for d = 3 mod 4 (rational witness exists),
        # of +T_d for d = 1 mod 4 (witness needs a 4th root of unity).
        if d % 4 == 3:
            return ExceptionalVerdict("neg-chebyshev")
        return ExceptionalVerdict("chebyshev", over_extension=True)
    return ExceptionalVerdict(None)


# ---------------------------------------------------------------------------
# critical escape
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalEscapeReport:
    escaping: list[CriticalPoint]
    bounded: list[CriticalPoint]
    undecided: list[CriticalPoint]

    @property
    def julia_connected(self) -> Optional[bool]:
        if self.escaping:
            return False
        if self.undecided:
            return None
        return True


def escaping_critical_points(ds: PolyDS, max_iter: Optional[int] = None,
                             escape_radius: Optional[Fraction] = None) -> CriticalEscapeReport:
    """Certify which critical points escape to infinity.

    Rational critical points are decided exactly (cycle detection certifies
    boundedness).  Irrational ones are iterated in ball arithmetic: crossing
    the escape radius certifies escape; anything else is reported undecided,
    never silently dropped.
    """
    max_iter = max_iter or ds.settings.max_iterations
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    radius = escape_radius if escape_radius is not None else ds.escape_radius
    escaping, bounded, undecided = [], [], []
    for cp in ds.critical_points():
        if cp.exact is not None:
            verdict = classify_orbit(ds, cp.exact, budget=max_iter)
            if isinstance(verdict, Preperiodic):
                bounded.append(cp)
            elif verdict.place.place is None or _arch_escapes(ds, cp.exact, max_iter, radius):
                escaping.append(cp)
            else:
                # wandering via a finite place only: complex orbit may still
                # be bounded; fall through to the numeric test
                if _ball_escapes(ds, cp.ball, max_iter, radius):
                    escaping.append(cp)
                else:
                    undecided.append(cp)
        else:
            if _ball_escapes(ds, cp.ball, max_iter, radius):
                escaping.append(cp)
            else:
                undecided.append(cp)
    return CriticalEscapeReport(escaping, bounded, undecided)


_BIT_CAP = 1 << 16   # exact orbit values beyond this size stop exact loops


def _arch_escapes(ds: PolyDS, x: Fraction, budget: int, radius: Fraction) -> bool:
    for _ in range(budget):
        if abs(x) > radius:
            return True
        if max(abs(x.numerator), x.denominator).bit_length() > _BIT_CAP:
            return False
        x = ds.apply(x)
    return abs(x) > radius


def _ball_escapes(ds: PolyDS, z: CBall, budget: int, radius: Fraction) -> bool:
    from mpmath import mpf
    bound = mpf(radius.numerator) / mpf(radius.denominator)
    for _ in range(budget):
        if z.abs_lower() > bound:
            return True
        z = ds.apply_ball(z)
        if z.rad > mpf(10) ** 40:   # radius blow-up: no decision possible
            return False
    return z.abs_lower() > bound


# ---------------------------------------------------------------------------
# preperiodicity over Q
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaceReport:
    place: Optional[int]            # prime p, or None for the archimedean place
    good_reduction: Optional[bool]
    coprime_to_d: Optional[bool]
    escape_iterate: Optional[int]

    def to_json(self) -> dict:
        return {
            "place": "infinity" if self.place is None else self.place,
            "good_reduction": self.good_reduction,
            "coprime_to_d": self.coprime_to_d,
            "escape_iterate": self.escape_iterate,
        }


@dataclass(frozen=True)
class Preperiodic:
    preperiod: int
    period: int


@dataclass(frozen=True)
class Wandering:
    place: PlaceReport


def _candidate_primes(ds: PolyDS, alpha: Fraction) -> list[int]:
    primes = set(_prime_factors(alpha.denominator))
    for c in ds.f.coeffs[:-1]:
        if c != 0:
            primes.update(_prime_factors(c.denominator))
    return sorted(primes)


def classify_orbit(ds: PolyDS, alpha: Fraction,
                   budget: Optional[int] = None) -> Union[Preperiodic, Wandering]:
    """Exact dichotomy for rational alpha: preperiodic or certified wandering.

    Escape certificates: at a finite prime, a dominated negative valuation
    forces |f^n(alpha)|_p = |alpha'|_p^(d^n) -> infinity; at the archimedean
    place, crossing the escape radius does.  The finite place is preferred
    when both fire at the same step.
    """
    alpha = rat(alpha)
    budget = budget or ds.settings.preperiodic_budget
    primes = _candidate_primes(ds, alpha)
    radius = ds.escape_radius
    seen = {alpha: 0}
    x = alpha
    for n in range(0, budget + 1):
        if x != 0:
            for p in primes:
                v = _v_p(x, p)
                if v < 0 and ds.padic_dominated(p, v):
                    report = PlaceReport(p, ds.good_reduction(p),
                                         ds.coprime_to_degree(p), n)
                    return Wandering(report)
        if abs(x) > radius:
            return Wandering(PlaceReport(None, None, None, n))
        nxt = ds.apply(x)
        if nxt in seen:
            k = seen[nxt]
            return Preperiodic(preperiod=k, period=n + 1 - k)
        seen[nxt] = n + 1
        x = nxt
        if max(abs(x.numerator), x.denominator).bit_length() > _BIT_CAP:
            raise UndecidedError("orbit heights exploded before a verdict")
    raise UndecidedError(f"no verdict within the iteration budget {budget}")


def is_preperiodic(ds: PolyDS, alpha: Fraction,
                   budget: Optional[int] = None) -> Union[Preperiodic, Wandering]:
    """Alias of classify_orbit."""
    return classify_orbit(ds, alpha, budget)


@dataclass(frozen=True)
class GoodPlaceSearch:
    qualifying: Optional[PlaceReport]       # finite place with all 3 conditions
    archimedean: Optional[PlaceReport]      # archimedean escape certificate
    rejected: list[PlaceReport]             # escaping finite places failing a condition

    def to_json(self) -> dict:
        return {
            "qualifying": self.qualifying.to_json() if self.qualifying else None,
            "archimedean": self.archimedean.to_json() if self.archimedean else None,
            "rejected": [r.to_json() for r in self.rejected],
        }


def find_place_of_good_reduction_escape(ds: PolyDS, alpha: Fraction,
                                        budget: Optional[int] = None) -> GoodPlaceSearch:
    """Scan finite places for escape + good reduction + coprimality to d.

    Wandering input required.  Returns the smallest qualifying prime if one
    certifies escape within the budget; escaping-but-rejected places and the
    archimedean certificate (when it fires) are reported alongside.
    """
    alpha = rat(alpha)
    verdict = classify_orbit(ds, alpha, budget)
    if isinstance(verdict, Preperiodic):
        raise DomainError("point is preperiodic; no escape place exists")
    budget = budget or ds.settings.preperiodic_budget
    qualifying = None
    rejected = []
    for p in _candidate_primes(ds, alpha):
        hit = _padic_escape_iterate(ds, alpha, p, budget)
        if hit is None:
            continue
        report = PlaceReport(p, ds.good_reduction(p), ds.coprime_to_degree(p), hit)
        if report.good_reduction and report.coprime_to_d and qualifying is None:
            qualifying = report
        elif not (report.good_reduction and report.coprime_to_d):
            rejected.append(report)
    arch = None
    z = as_ball(alpha)
    from mpmath import mpf
    bound = mpf(ds.escape_radius.numerator) / mpf(ds.escape_radius.denominator)
    for n in range(ds.settings.max_iterations + 1):
        if z.abs_lower() > bound:
            arch = PlaceReport(None, None, None, n)
            break
        z = ds.apply_ball(z)
        if z.rad > mpf(10) ** 40:
            break
    return GoodPlaceSearch(qualifying, arch, rejected)


def _padic_escape_iterate(ds: PolyDS, alpha: Fraction, p: int,
                          budget: int) -> Optional[int]:
    """Least n with v_p(f^n(alpha)) < 0 and the leading term dominant, via a
    cheap p-adic orbit (valuations only; digits escalate on precision loss)."""
    from .padic import PadicScalar

    digits = 64
    while digits <= 4096:
        try:
            x = PadicScalar.from_rational(alpha, p, digits)
            coeffs = [PadicScalar.from_rational(c, p, digits)
                      for c in ds.f.coeffs]
            for n in range(budget + 1):
                if not x.zero and x.valuation < 0 and ds.padic_dominated(p, x.valuation):
                    return n
                acc = coeffs[-1]
                for c in reversed(coeffs[:-1]):
                    acc = acc * x + c
                x = acc
            return None
        except Exception as exc:  # precision loss: retry with more digits
            from .errors import PrecisionError
            if isinstance(exc, PrecisionError):
                digits *= 2
                continue
            raise
    return None
