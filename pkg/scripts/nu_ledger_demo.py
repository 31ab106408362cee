#!/usr/bin/env python3
"""Print pullback-series ledgers for a grid of sample instances.

Each row instantiates nu(x) = N(z1 phi x^k1, z2 phi x^k2) for a curve and a
monic integer map at a good-reduction prime, then reports the exact sup norm
at |x| = 1, the leading index kappa, the leading-index inequality, and the
annulus zero count -- all in units of log p.

Usage: python3 scripts/nu_ledger_demo.py
"""

from fractions import Fraction as F

from orbitforge.curves import PlaneCurve, build_nu, nu_estimates
from orbitforge.dynamics import PolyDS
from orbitforge.exact import Poly
from orbitforge.padic import PadicScalar, teichmuller

CURVES = {
    "X-Y": PlaneCurve.from_terms({(1, 0): 1, (0, 1): -1}),
    "X-Y-1": PlaneCurve.from_terms({(1, 0): 1, (0, 1): -1, (0, 0): -1}),
    "X^2+Y-3": PlaneCurve.from_terms({(2, 0): 1, (0, 1): 1, (0, 0): -3}),
    "XY-2": PlaneCurve.from_terms({(1, 1): 1, (0, 0): -2}),
}


def main() -> int:
    ds = PolyDS(Poly([-1, 0, 1]))
    header = (f"{'curve':>9} {'p':>2} {'phi':>4} {'(k1,k2)':>8} "
              f"{'sup1':>6} {'kappa':>5} {'lhs<=rhs':>12} {'PJ count':>8}")
    print(header)
    print("-" * len(header))
    for name, curve in CURVES.items():
        for p in (3, 5):
            one = PadicScalar.from_unit(p, 1)
            zeta = teichmuller(5, 2) if p == 5 else one
            for (k1, k2) in ((1, -1), (2, -1), (3, -2), (2, 1)):
                nu = build_nu(curve, ds, p, F(p), zeta, one, k1, k2, window=14)
                led = nu_estimates(nu)
                assert led.lemma_holds and led.sup_leq_one
                print(f"{name:>9} {p:>2} {p:>4} {f'({k1},{k2})':>8} "
                      f"{str(led.sup1_logp):>6} {led.kappa1:>5} "
                      f"{f'{led.lemma_lhs} <= {led.lemma_rhs}':>12} "
                      f"{str(led.pj_count_logp):>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
