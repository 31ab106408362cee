"""Exact lattice-coset counting and root-of-unity pair decompositions.

Everything here is brute-force integer arithmetic over the coset
S_a = Z*a + N*Z^2 intersected with sup-norm boxes B_c = {|x|_inf <= c}.
Box thresholds N^c with rational c are compared exactly by cross-powering
(k <= N^c iff k^q <= N^p for c = p/q), so float rounding can never fake or
mask a bound violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator

from .errors import DomainError
from .exact import rat


def pow_le(k: int, N: int, c: Fraction) -> bool:
    """Exact test k <= N^c for k >= 0, N >= 1, c >= 0 rational."""
    if k < 0:
        return True
    return k ** c.denominator <= N ** c.numerator


def floor_pow(N: int, c: Fraction) -> int:
    """floor(N^c) by bisection with exact comparisons."""
    if N < 1:
        raise DomainError("N must be >= 1")
    c = Fraction(c)
    hi = 1
    while pow_le(hi, N, c):
        hi *= 2
    lo = hi // 2
    while lo + 1 < hi:
        midpoint = (lo + hi) // 2
        if pow_le(midpoint, N, c):
            lo = midpoint
        else:
            hi = midpoint
    return lo


def count_at_least_bound(count: int, N: int, c: Fraction) -> bool:
    """Exact test count >= N^(2c-1)/4, i.e. (4*count)^q >= N^p for 2c-1 = p/q."""
    expo = 2 * Fraction(c) - 1
    if expo <= 0:
        return count >= 1 or N ** abs(expo.numerator) <= (4 * count) ** expo.denominator
    return (4 * count) ** expo.denominator >= N ** expo.numerator


@dataclass(frozen=True)
class LatticeCoset:
    """S_a = Z*(a1, a2) + N*Z^2."""

    a1: int
    a2: int
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("N must be >= 2")

    @property
    def gcd_with_n(self) -> int:
        return gcd(gcd(self.a1, self.a2), self.N)

    def box_vectors(self, limit: int) -> Iterator[tuple[int, int, int]]:
        """All (x1, x2, k) with (x1, x2) = k*a + N*t in the box |x|_inf <= limit.

        The multiplier k runs over 0..N-1; each vector is yielded once per
        generating k (deduplicate by the vector when counting).
        """
        N = self.N
        for k in range(N):
            r1 = (k * self.a1) % N
            r2 = (k * self.a2) % N
            for x1 in range(r1 - N * ((r1 + limit) // N), limit + 1, N):
                if x1 < -limit:
                    continue
                for x2 in range(r2 - N * ((r2 + limit) // N), limit + 1, N):
                    if x2 < -limit:
                        continue
                    yield (x1, x2, k)


@dataclass(frozen=True)
class BoxCount:
    count: int
    bound_ok: bool                    # count >= N^(2c-1)/4
    witnesses: tuple[tuple[int, int], ...]


def coset_points_in_box(S: LatticeCoset, c, max_witnesses: int = 12) -> BoxCount:
    """Exact |S_a intersect B_{N^c}| with the guaranteed lower bound check.

    Requires N >= 17 and gcd(a1, a2, N) = 1 (the hypotheses of the bound
    count >= N^(2c-1)/4 for 3/4 <= c <= 1).
    """
    c = rat(c)
    if S.N < 17:
        raise DomainError("hypothesis violated: N >= 17 required")
    if S.gcd_with_n != 1:
        raise DomainError("hypothesis violated: gcd(a1, a2, N) = 1 required")
    if not (Fraction(3, 4) <= c <= 1):
        raise DomainError("hypothesis violated: c must lie in [3/4, 1]")
    limit = floor_pow(S.N, c)
    seen: set[tuple[int, int]] = set()
    for x1, x2, _k in S.box_vectors(limit):
        seen.add((x1, x2))
    witnesses = tuple(sorted(seen)[:max_witnesses])
    return BoxCount(len(seen), count_at_least_bound(len(seen), S.N, c), witnesses)


def e_branch_holds(e: int, C: Fraction, N: int, c: Fraction, C1: Fraction) -> bool:
    """Exact test e <= C1 * C^2 * N^(1-c) by cross-powering rationals."""
    expo = 1 - Fraction(c)          # >= 0
    lhs = Fraction(e) / (Fraction(C1) * Fraction(C) ** 2)
    if lhs <= 0:
        return True
    # lhs <= N^expo  <=>  lhs^q <= N^p for expo = p/q
    return lhs ** expo.denominator <= Fraction(N) ** expo.numerator


@dataclass(frozen=True)
class PrimitiveWitness:
    k1: int
    k2: int
    e: int
    multiplier: int                   # k with e*(k1,k2) = k*a mod N
    kinf_exceeds_C: bool              # second branch of the disjunction
    c1_required: Fraction             # minimal C1 for the first branch (approx)


def find_primitive_decomposition(S: LatticeCoset, C, c) -> PrimitiveWitness:
    """A vector e*(k1, k2) in S_a with gcd(k1, k2) = 1 inside B_{N^c} such
    that either e is small (e <= C1*C^2*N^(1-c)) or |(k1,k2)|_inf > C.

    The box is searched exhaustively; among vectors with a nonzero multiplier
    the lexicographically (e, |k|_inf, k1, k2)-least is returned, so output is
    deterministic and e-minimal.  ``c1_required`` approximates
    e / (C^2 N^(1-c)) for corpus sweeps exhibiting the absolute constant;
    exact checks should use :func:`e_branch_holds`.
    """
    C = rat(C)
    c = rat(c)
    if S.N < 17:
        raise DomainError("hypothesis violated: N >= 17 required")
    if S.gcd_with_n != 1:
        raise DomainError("hypothesis violated: gcd(a1, a2, N) = 1 required")
    if not (Fraction(3, 4) <= c <= 1):
        raise DomainError("hypothesis violated: c must lie in [3/4, 1]")
    if C < 1:
        raise DomainError("C must be >= 1")
    limit = floor_pow(S.N, c)
    best = None     # ordering key; positive k1 preferred at equal (e, |k|_inf)
    seen: set[tuple[int, int]] = set()
    for x1, x2, k in S.box_vectors(limit):
        if (x1, x2) == (0, 0) or k == 0 or (x1, x2) in seen:
            continue
        seen.add((x1, x2))
        e = gcd(abs(x1), abs(x2))
        k1, k2 = x1 // e, x2 // e
        key = (e, max(abs(k1), abs(k2)), abs(k1), k1 < 0, abs(k2), k2 < 0, k,
               k1, k2)
        if best is None or key < best:
            best = key
    if best is None:
        raise DomainError("box contains no usable coset vector")
    e, kinf, k1, k2 = best[0], best[1], best[7], best[8]
    mult = best[6]
    c1_required = Fraction(
        float(e) / (float(C) ** 2 * float(S.N) ** float(1 - c))
    ).limit_denominator(10**6)
    return PrimitiveWitness(k1, k2, e, mult,
                            kinf_exceeds_C=Fraction(kinf) > C,
                            c1_required=c1_required)


def gcd_shift(k: int, N: int) -> int:
    """An integer L coprime to N with k = L * gcd(N, k) mod N.

    Scans L = k/f + t*N/f, f = gcd(N, k); existence is guaranteed.
    """
    if N < 2:
        raise DomainError("N must be >= 2")
    if k < 1:
        raise DomainError("k must be >= 1")
    f = gcd(N, k)
    base, step = k // f, N // f
    for t in range(N + 1):
        ell = base + t * step
        if gcd(ell, N) == 1:
            return ell % N if ell % N else ell
    raise DomainError("no coprime shift found (unreachable)")   # pragma: no cover


@dataclass(frozen=True)
class RootPairDecomposition:
    """zeta_N^(a_i) = zeta_N^(s_i * N/f) * (zeta_N^(l_star * e/f))^(k_i).

    The first factor has order dividing f (hence dividing e); the second is a
    power of the primitive root zeta_N^(l_star).  gcd(k1, k2) = 1 and
    |e*(k1, k2)|_inf <= N^c, so |k|_inf <= N^c / e.
    """

    k1: int
    k2: int
    e: int
    l_star: int                      # zeta = zeta_N^(l_star) is primitive
    s1: int                          # eps_i = zeta_N^(s_i * N/f), order | f | e
    s2: int
    f: int                           # gcd(multiplier, N); divides e
    c1_required: Fraction

    def verify(self, a1: int, a2: int, N: int) -> bool:
        M = N // self.f
        e_prime = self.e // self.f
        for a_i, k_i, s_i in ((a1, self.k1, self.s1), (a2, self.k2, self.s2)):
            if (s_i * M + self.l_star * e_prime * k_i - a_i) % N != 0:
                return False
        return True


def decompose_root_pair(a1: int, a2: int, N: int, C, c) -> RootPairDecomposition:
    """Constructive decomposition of a pair of N-th roots of unity.

    The pair (zeta_N^a1, zeta_N^a2) of exact order N >= 17 is rewritten on a
    primitive N-th root zeta = zeta_N^(l_star) as small-order factors times
    coprime powers (k1, k2); every congruence is verified exactly.  The
    disjunction on e from the primitive-vector search carries over.
    """
    if N < 17:
        raise DomainError("hypothesis violated: N >= 17 required")
    if gcd(gcd(a1, a2), N) != 1:
        raise DomainError("hypothesis violated: the pair must have exact order N")
    S = LatticeCoset(a1 % N, a2 % N, N)
    w = find_primitive_decomposition(S, C, c)
    e, k = w.e, w.multiplier
    f = gcd(N, k)
    if e % f != 0:
        raise DomainError("primitive part mismatch (unreachable)")  # pragma: no cover
    ell = gcd_shift(k, N)
    l_star = pow(ell, -1, N)
    e_prime = e // f
    M = N // f
    # a_i = l_star * e' * k_i  (mod N/f); the residue determines the eps part
    s = []
    for a_i, k_i in ((a1, w.k1), (a2, w.k2)):
        diff = (a_i - l_star * e_prime * k_i) % N
        if diff % M != 0:
            raise DomainError("decomposition failed verification")
        s.append(diff // M)
    out = RootPairDecomposition(w.k1, w.k2, e, l_star, s[0], s[1], f,
                                w.c1_required)
    if not out.verify(a1, a2, N):
        raise DomainError("reconstruction failed")   # pragma: no cover
    return out
