"""Exact arithmetic substrate over Q.

Everything symbolic in this package runs on four representations:

* ``Rat`` -- ``fractions.Fraction`` (always canonical: gcd 1, positive
  denominator), parsed from and printed as ``"num/den"`` strings;
* ``Poly`` -- dense univariate polynomials, coefficient of X^i at index i;
* ``BiPoly`` -- sparse bivariate polynomials keyed by (i, j) for X^i Y^j;
* ``LaurentBlock`` -- truncated Laurent series: coefficients are known for
  exponents ``low .. trunc_order-1`` (implicitly zero where not stored) and
  unknown from ``trunc_order`` on.  ``trunc_order=None`` means the block is a
  full Laurent polynomial (everything outside the stored range is zero).

Truncation bookkeeping is pessimistic: any operation mixing blocks takes the
minimum valid order, so a coefficient is never reported unless it is fully
determined by known data.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Literal, Optional, Sequence

from .errors import DomainError, ResourceError

Rat = Fraction

_MINUS_VARIANTS = ("−", "–", "—")


def rat(value) -> Fraction:
    """Parse an int, Fraction, or ``"num/den"`` string into a canonical Rat."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        for sign in _MINUS_VARIANTS:
            text = text.replace(sign, "-")
        return Fraction(text)
    raise DomainError(f"cannot interpret {value!r} as a rational")


def rat_str(q: Fraction) -> str:
    """Render a Rat as ``"num"`` or ``"num/den"``."""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Poly:
    """Dense univariate polynomial over Q; immutable and hashable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):  # ascending degree
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("Poly is immutable")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly([1])

    @staticmethod
    def x() -> "Poly":
        return Poly([0, 1])

    @staticmethod
    def monomial(n: int, c=1) -> "Poly":
        if n < 0:
            raise DomainError("monomial exponent must be >= 0")
        return Poly([0] * n + [c])

    # -- structure ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero:
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = rat_str(c) if i == 0 else (f"{rat_str(c)}*X^{i}" if c != 1 else f"X^{i}")
            parts.append(term)
        return "Poly(" + " + ".join(parts) + ")"

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = rat(c)
        return Poly([c * a for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise DomainError("negative power of a polynomial")
        result, base = Poly.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_with(self, x, convert=lambda c: c):
        """Horner evaluation in any ring accepting + and * with converted coeffs."""
        acc = None
        for c in reversed(self.coeffs):
            cc = convert(c)
            acc = cc if acc is None else acc * x + cc
        return acc if acc is not None else convert(Fraction(0))

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly([c])
        return acc

    # -- euclidean layer -----------------------------------------------------
    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero:
            raise DomainError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quot = [Fraction(0)] * (dq + 1)
        oc = other.coeffs
        for k in range(dq, -1, -1):
            c = rem[k + len(oc) - 1] / oc[-1]
            quot[k] = c
            if c != 0:
                for j, b in enumerate(oc):
                    rem[k + j] -= c * b
        return Poly(quot), Poly(rem[: len(oc) - 1])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        if a.is_zero:
            return a
        return a.scale(1 / a.lead)

    def content_primitive(self) -> tuple[Fraction, "Poly"]:
        """Split as content * primitive integer polynomial (positive lead)."""
        if self.is_zero:
            return Fraction(0), Poly()
        from math import gcd, lcm
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        nums = [int(c * den) for c in self.coeffs]
        g = 0
        for n in nums:
            g = gcd(g, n)
        sign = -1 if nums[-1] < 0 else 1
        g *= sign
        return Fraction(g, den), Poly([Fraction(n, g) for n in nums])

    # -- serialization --------------------------------------------------------
    def to_json(self) -> list[str]:
        return [rat_str(c) for c in self.coeffs]

    @staticmethod
    def from_json(data: Sequence) -> "Poly":
        return Poly([rat(c) for c in data])


def poly_compose(p: Poly, q: Poly) -> Poly:
    """Composition p(q(X))."""
    return p.compose(q)


def poly_iterate(f: Poly, n: int, max_degree: int = 1 << 16) -> Poly:
    """n-th compositional iterate of f; the 0-th iterate is X."""
    if n < 0:
        raise DomainError("iterate count must be >= 0")
    if f.degree < 1:
        raise DomainError("iteration requires degree >= 1")
    if f.degree >= 2 and f.degree ** n > max_degree:
        raise ResourceError(
            f"iterate degree {f.degree}^{n} exceeds the cap {max_degree}")
    out = Poly.x()
    for _ in range(n):
        out = out.compose(f)
    return out


class BiPoly:
    """Sparse bivariate polynomial over Q keyed by (i, j) -> X^i Y^j."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (i, j), c in (terms.items() if isinstance(terms, dict) else terms):
                c = rat(c)
                if c != 0:
                    key = (int(i), int(j))
                    clean[key] = clean.get(key, Fraction(0)) + c
        object.__setattr__(
            self, "terms",
            tuple(sorted((k, v) for k, v in clean.items() if v != 0)))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("BiPoly is immutable")

    @staticmethod
    def from_x(p: Poly) -> "BiPoly":
        return BiPoly({(i, 0): c for i, c in enumerate(p.coeffs)})

    @staticmethod
    def from_y(p: Poly) -> "BiPoly":
        return BiPoly({(0, j): c for j, c in enumerate(p.coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg_x(self) -> int:
        return max((i for (i, _), _ in self.terms), default=-1)

    @property
    def deg_y(self) -> int:
        return max((j for (_, j), _ in self.terms), default=-1)

    @property
    def total_degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=-1)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        if self.is_zero:
            return "BiPoly(0)"
        bits = [f"{rat_str(c)}*X^{i}*Y^{j}" for (i, j), c in self.terms]
        return "BiPoly(" + " + ".join(bits) + ")"

    def __add__(self, other: "BiPoly") -> "BiPoly":
        acc = dict(self.terms)
        for k, c in other.terms:
            acc[k] = acc.get(k, Fraction(0)) + c
        return BiPoly(acc)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        acc: dict = {}
        for (i1, j1), c1 in self.terms:
            for (i2, j2), c2 in other.terms:
                k = (i1 + i2, j1 + j2)
                acc[k] = acc.get(k, Fraction(0)) + c1 * c2
        return BiPoly(acc)

    def scale(self, c) -> "BiPoly":
        c = rat(c)
        return BiPoly({k: c * v for k, v in self.terms})

    def eval(self, x: Fraction, y: Fraction) -> Fraction:
        total = Fraction(0)
        for (i, j), c in self.terms:
            total += c * x**i * y**j
        return total

    def eval_with(self, x, y, convert=lambda c: c):
        """Evaluate in any ring (e.g. complex balls) accepting + and *."""
        by_i: dict = {}
        for (i, j), c in self.terms:
            by_i.setdefault(i, []).append((j, c))
        total = None
        for i, row in sorted(by_i.items()):
            inner = None
            for j, c in sorted(row, reverse=True):
                cc = convert(c)
                if inner is None:
                    inner = cc
                    prev_j = j
                else:
                    inner = inner * _pow(y, prev_j - j) + cc
                    prev_j = j
            inner = inner * _pow(y, prev_j) if prev_j else inner
            part = inner * _pow(x, i) if i else inner
            total = part if total is None else total + part
        return total if total is not None else convert(Fraction(0))

    def diagonal(self) -> Poly:
        """The univariate restriction P(X, X)."""
        acc: dict = {}
        for (i, j), c in self.terms:
            acc[i + j] = acc.get(i + j, Fraction(0)) + c
        size = max(acc, default=-1) + 1
        return Poly([acc.get(k, Fraction(0)) for k in range(size)])

    def subs_values(self, x=None, y=None) -> Poly:
        """Fix one variable to a rational; returns a Poly in the other."""
        if (x is None) == (y is None):
            raise DomainError("fix exactly one variable")
        acc: dict = {}
        for (i, j), c in self.terms:
            if x is not None:
                acc[j] = acc.get(j, Fraction(0)) + c * x**i
            else:
                acc[i] = acc.get(i, Fraction(0)) + c * y**j
        size = max(acc, default=-1) + 1
        return Poly([acc.get(k, Fraction(0)) for k in range(size)])

    def coeffs_in(self, var: Literal["x", "y"]) -> list[Poly]:
        """Coefficient list in the given variable; entries are Poly in the other."""
        if var not in ("x", "y"):
            raise DomainError("variable must be 'x' or 'y'")
        deg = self.deg_x if var == "x" else self.deg_y
        rows: list[dict] = [dict() for _ in range(deg + 1)]
        for (i, j), c in self.terms:
            main, other = (i, j) if var == "x" else (j, i)
            rows[main][other] = c
        out = []
        for row in rows:
            size = max(row, default=-1) + 1
            out.append(Poly([row.get(k, Fraction(0)) for k in range(size)]))
        return out

    def divides(self, other: "BiPoly") -> bool:
        """Exact divisibility test via single-divisor lex division."""
        if self.is_zero:
            return other.is_zero
        lt_key = max(k for k, _ in self.terms)          # lex on (i, j)
        lt_coeff = dict(self.terms)[lt_key]
        rem = dict(other.terms)
        while rem:
            key = max(rem)
            if rem[key] == 0:
                del rem[key]
                continue
            di, dj = key[0] - lt_key[0], key[1] - lt_key[1]
            if di < 0 or dj < 0:
                return False
            factor = rem[key] / lt_coeff
            for (i, j), c in self.terms:
                k2 = (i + di, j + dj)
                rem[k2] = rem.get(k2, Fraction(0)) - factor * c
                if rem[k2] == 0:
                    del rem[k2]
        return True

    def content_primitive(self) -> tuple[Fraction, "BiPoly"]:
        from math import gcd, lcm
        if self.is_zero:
            return Fraction(0), self
        den = 1
        for _, c in self.terms:
            den = lcm(den, c.denominator)
        nums = {k: int(c * den) for k, c in self.terms}
        g = 0
        for n in nums.values():
            g = gcd(g, n)
        if nums[max(nums)] < 0:
            g = -g
        return Fraction(g, den), BiPoly({k: Fraction(n, g) for k, n in nums.items()})

    def to_json(self) -> list:
        return [[i, j, rat_str(c)] for (i, j), c in self.terms]

    @staticmethod
    def from_json(data) -> "BiPoly":
        return BiPoly({(int(i), int(j)): rat(c) for i, j, c in data})


def _pow(x, n: int):
    if n == 0:
        raise DomainError("internal: zero power should be skipped")
    out = x
    for _ in range(n - 1):
        out = out * x
    return out


def _det_memo(matrix: list[list[BiPoly]]) -> BiPoly:
    """Determinant of a BiPoly matrix by first-row expansion with memo."""
    n = len(matrix)
    cache: dict = {}

    def det(row: int, cols: tuple[int, ...]) -> BiPoly:
        if not cols:
            return BiPoly({(0, 0): 1})
        key = cols
        if key in cache:
            return cache[key]
        total = BiPoly()
        for pos, col in enumerate(cols):
            entry = matrix[row][col]
            if entry.is_zero:
                continue
            sub = det(row + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total + (term if pos % 2 == 0 else -term)
        cache[key] = total
        return total

    return det(0, tuple(range(n)))


def poly_resultant(p: BiPoly, q: BiPoly, eliminate: Literal["x", "y"]) -> BiPoly:
    """Sylvester resultant of p and q with respect to one variable.

    The eliminated variable is the named slot of *each* input.  The result is
    a BiPoly whose x-slot carries p's surviving variable and whose y-slot
    carries q's surviving variable.
    """
    pc = p.coeffs_in(eliminate)
    qc = q.coeffs_in(eliminate)
    n, m = len(pc) - 1, len(qc) - 1
    if n < 1 or m < 1:
        raise DomainError("resultant requires positive degree in the eliminated variable")
    size = n + m
    prow = [BiPoly.from_x(c) for c in reversed(pc)]   # p's other var -> x slot
    qrow = [BiPoly.from_y(c) for c in reversed(qc)]   # q's other var -> y slot
    zero = BiPoly()
    matrix: list[list[BiPoly]] = []
    for shift in range(m):
        matrix.append([zero] * shift + prow + [zero] * (size - shift - n - 1))
    for shift in range(n):
        matrix.append([zero] * shift + qrow + [zero] * (size - shift - m - 1))
    return _det_memo(matrix)


class LaurentBlock:
    """Truncated Laurent series with exact coefficients.

    Coefficients are stored for exponents ``low .. low+len(coeffs)-1`` and are
    implicitly zero elsewhere below ``trunc_order``.  ``trunc_order=None``
    marks a full Laurent polynomial.
    """

    __slots__ = ("low", "coeffs", "trunc")

    def __init__(self, low: int, coeffs: Iterable, trunc: Optional[int] = None):
        cs = [rat(c) for c in coeffs]
        # trim zeros on both ends (this only changes the stored range)
        while cs and cs[0] == 0:
            cs.pop(0)
            low += 1
        while cs and cs[-1] == 0:
            cs.pop()
        if trunc is not None and cs and low + len(cs) > trunc:
            cs = cs[: max(0, trunc - low)]
            while cs and cs[-1] == 0:
                cs.pop()
        if not cs:
            low = 0
        if trunc is not None and cs and low > trunc:
            raise DomainError("block invariant violated: low > trunc_order")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("LaurentBlock is immutable")

    # -- queries ---------------------------------------------------------
    @staticmethod
    def zero(trunc: Optional[int] = None) -> "LaurentBlock":
        return LaurentBlock(0, (), trunc)

    @staticmethod
    def monomial(exponent: int, c=1, trunc: Optional[int] = None) -> "LaurentBlock":
        return LaurentBlock(exponent, [c], trunc)

    @staticmethod
    def from_poly(p: Poly, trunc: Optional[int] = None) -> "LaurentBlock":
        return LaurentBlock(0, p.coeffs, trunc)

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    @property
    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.trunc is None

    @property
    def top(self) -> int:
        """Highest stored exponent."""
        if not self.coeffs:
            raise DomainError("empty block has no top exponent")
        return self.low + len(self.coeffs) - 1

    def coefficient(self, e: int) -> Fraction:
        if self.trunc is not None and e >= self.trunc:
            raise DomainError(
                f"coefficient at exponent {e} is beyond trunc_order {self.trunc}")
        if self.coeffs and self.low <= e <= self.top:
            return self.coeffs[e - self.low]
        return Fraction(0)

    def known_terms(self) -> list[tuple[int, Fraction]]:
        return [(self.low + i, c) for i, c in enumerate(self.coeffs) if c != 0]

    def known_is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LaurentBlock) and self.low == other.low
                and self.coeffs == other.coeffs and self.trunc == other.trunc)

    def __hash__(self) -> int:
        return hash((self.low, self.coeffs, self.trunc))

    def __repr__(self) -> str:
        body = " + ".join(f"{rat_str(c)}*x^{e}" for e, c in self.known_terms()) or "0"
        tail = "" if self.trunc is None else f" + O(x^{self.trunc})"
        return f"LaurentBlock({body}{tail})"

    # -- arithmetic --------------------------------------------------------
    def _known_start(self) -> Optional[int]:
        """Lowest exponent carrying information (None for exact zero)."""
        if self.coeffs:
            return self.low
        return self.trunc  # empty: known-zero below trunc (or everywhere)

    def __add__(self, other: "LaurentBlock") -> "LaurentBlock":
        truncs = [t for t in (self.trunc, other.trunc) if t is not None]
        t = min(truncs) if truncs else None
        lows = [b.low for b in (self, other) if b.coeffs]
        if not lows:
            return LaurentBlock.zero(t)
        lo = min(lows)
        hi = max(b.top for b in (self, other) if b.coeffs)
        if t is not None:
            hi = min(hi, t - 1)
        out = []
        for e in range(lo, hi + 1):
            c = Fraction(0)
            for b in (self, other):
                if b.coeffs and b.low <= e <= b.top:
                    c += b.coeffs[e - b.low]
            out.append(c)
        return LaurentBlock(lo, out, t)

    def __neg__(self) -> "LaurentBlock":
        return LaurentBlock(self.low, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other: "LaurentBlock") -> "LaurentBlock":
        return self + (-other)

    def __mul__(self, other: "LaurentBlock") -> "LaurentBlock":
        if self.is_exact_zero or other.is_exact_zero:
            return LaurentBlock.zero(None)
        starts = []
        if self.trunc is not None:
            ks = other._known_start()
            starts.append(None if ks is None else self.trunc + ks)
        if other.trunc is not None:
            ks = self._known_start()
            starts.append(None if ks is None else other.trunc + ks)
        starts = [s for s in starts if s is not None]
        t = min(starts) if starts else None
        if not self.coeffs or not other.coeffs:
            return LaurentBlock.zero(t)
        lo = self.low + other.low
        hi = self.top + other.top
        if t is not None:
            hi = min(hi, t - 1)
        if hi < lo:
            return LaurentBlock.zero(t)
        out = [Fraction(0)] * (hi - lo + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            ea = self.low + i
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                e = ea + other.low + j
                if e > hi:
                    break
                out[e - lo] += a * b
        return LaurentBlock(lo, out, t)

    def scale(self, c) -> "LaurentBlock":
        c = rat(c)
        return LaurentBlock(self.low, [c * a for a in self.coeffs], self.trunc)

    def __pow__(self, n: int) -> "LaurentBlock":
        if n < 0:
            raise DomainError("negative block power; use inverse() first")
        result = LaurentBlock.monomial(0, 1, None)
        for _ in range(n):
            result = result * self
        return result

    def compose_monomial(self, k: int) -> "LaurentBlock":
        """Substitute x -> x^k (k nonzero)."""
        if k == 0:
            raise DomainError("monomial substitution needs a nonzero exponent")
        if k > 0:
            if not self.coeffs:
                t = None if self.trunc is None else self.trunc * k
                return LaurentBlock.zero(t)
            out = [Fraction(0)] * ((len(self.coeffs) - 1) * k + 1)
            for i, c in enumerate(self.coeffs):
                out[i * k] = c
            t = None if self.trunc is None else self.trunc * k
            return LaurentBlock(self.low * k, out, t)
        if self.trunc is not None:
            raise DomainError(
                "x -> x^k with k < 0 requires a full block (trunc_order=None)")
        if not self.coeffs:
            return LaurentBlock.zero(None)
        out = [Fraction(0)] * ((len(self.coeffs) - 1) * (-k) + 1)
        for i, c in enumerate(self.coeffs):
            out[(len(self.coeffs) - 1 - i) * (-k)] = c
        return LaurentBlock(self.top * k, out, None)

    def substitute_scaled(self, c, k: int = 1) -> "LaurentBlock":
        """Substitute x -> c*x^k: coefficient a_n moves to exponent n*k scaled by c^n."""
        c = rat(c)
        if c == 0:
            raise DomainError("scaling constant must be invertible")
        scaled = LaurentBlock(
            self.low,
            [a * c ** (self.low + i) for i, a in enumerate(self.coeffs)],
            self.trunc)
        return scaled.compose_monomial(k) if k != 1 else scaled

    def truncate_to(self, t: int) -> "LaurentBlock":
        new_t = t if self.trunc is None else min(t, self.trunc)
        return LaurentBlock(self.low, self.coeffs, new_t)

    def inverse(self, order: Optional[int] = None) -> "LaurentBlock":
        """Multiplicative inverse as a Laurent block.

        For truncated blocks the output is known to the matching order; for
        full blocks an explicit ``order`` (number of known terms) is required
        unless the block is a monomial.
        """
        if not self.coeffs:
            raise DomainError("cannot invert a block with no known nonzero term")
        if self.coeffs[0] == 0:
            raise DomainError("lowest known coefficient must be nonzero")
        if self.trunc is None and order is None:
            if len(self.coeffs) == 1:
                return LaurentBlock.monomial(-self.low, 1 / self.coeffs[0], None)
            raise DomainError("inverting a full block needs an explicit order")
        nterms = (self.trunc - self.low) if self.trunc is not None else order
        if order is not None:
            nterms = min(nterms, order) if self.trunc is not None else order
        a = list(self.coeffs[:nterms]) + [Fraction(0)] * max(0, nterms - len(self.coeffs))
        inv = [Fraction(0)] * nterms
        inv[0] = 1 / a[0]
        for n in range(1, nterms):
            s = Fraction(0)
            for j in range(1, min(n, len(a) - 1) + 1):
                if a[j] != 0:
                    s += a[j] * inv[n - j]
            inv[n] = -s / a[0]
        t = None if self.trunc is None and order is None else -self.low + nterms
        return LaurentBlock(-self.low, inv, t)

    def compose_poly(self, p: Poly) -> "LaurentBlock":
        """Evaluate the polynomial p at this block (Horner)."""
        acc = LaurentBlock.zero(None)
        for c in reversed(p.coeffs):
            acc = acc * self + LaurentBlock(0, [c], None)
        # An empty Horner (zero polynomial) is exact zero.
        return acc


def series_mul(a: LaurentBlock, b: LaurentBlock) -> LaurentBlock:
    return a * b


def series_compose_monomial(a: LaurentBlock, k: int) -> LaurentBlock:
    return a.compose_monomial(k)


def series_substitute_scaled(a: LaurentBlock, c, k: int = 1) -> LaurentBlock:
    return a.substitute_scaled(c, k)


def evaluate_series_at_block(coeffs: Sequence[Fraction], arg: LaurentBlock,
                             shift: int = 0) -> LaurentBlock:
    """Sum_{k} coeffs[k] * arg^k, computed with incremental powers.

    ``shift`` adds a constant exponent offset: sum coeffs[k] * arg^(k) where
    index 0 of ``coeffs`` is the coefficient of arg^shift.
    """
    power = LaurentBlock.monomial(0, 1, None) if shift == 0 else arg ** shift
    total = LaurentBlock.zero(None)
    for k, c in enumerate(coeffs):
        if c != 0:
            total = total + power.scale(c)
        if k + 1 < len(coeffs):
            power = power * arg
    return total
