"""From a schedule of growing sets to a measure that makes U tiny relative to V.

The squeeze measure shrinks mass on ``W_0, ..., W_{M-1}`` by ``ε`` per level
while keeping it ``ε^-6``-doubling; ``t(ε)`` is the resulting lower bound on
the exponent relating ``μ(U)`` to ``μ(V)``.
"""

from fractions import Fraction

from doubling.finite import line
from doubling.measures import PiecewiseDensity, PointWeights
from doubling.realline import IntervalSet
from doubling.squeeze import squeeze

I = IntervalSet.interval
lam = PiecewiseDensity.lebesgue()
U, V = I(0, 1), I(0, 64)
sched, M, reports = squeeze(U, V, lam)
print(f"U = {U}, V = {V}: M = {M}")
for m in range(M + 2):
    print(f"  W_{m} = {sched.W(m)}")
print("\n eps            C(mu) <= eps^-6   mu(U)/mu(V) <= bound   t(eps)    M/6")
for r in reports:
    print(f" {str(r.eps):>13}  {str(r.doubling_ok):^16}  {str(r.ratio_ok):^21}  {r.t_eps:.4f}   {M / 6:.4f}")

sp = line([0, 1, 8, 64, 512, 4096])
sched, M, reports = squeeze(sp.subset([0]), sp.whole(), PointWeights(sp, (1,) * 6), (Fraction(1, 2),))
r = reports[0]
print(f"\nsix points on a geometric line, U = {{0}}, V = everything: M = {M}, report ok: {r.ok}")
print(f"  exact doubling constant of the squeeze measure: {r.C_mu} (cap {r.eps ** -6})")
