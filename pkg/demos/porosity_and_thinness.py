"""Porosity measured by doubling distance, and the thinness inequality chain."""

from fractions import Fraction as Q

from doubling.analysis import (
    PorositySpec,
    dyadic_family,
    harmonic_set,
    porosity_index,
    thinness_inequality,
)
from doubling.measures import PiecewiseDensity

H = harmonic_set()  # {0} and ±1/(k+1)
for x in (Q(0), Q(1, 2), Q(-1, 3)):
    rep = porosity_index(H, x)
    print(f"x = {x}: index {rep.value}, per alpha {[v for _a, v, _b in rep.table]}")
print("single point:", porosity_index(PorositySpec((Q(0),)), 0).value)

for n in (10, 50, 200):
    fam, S = dyadic_family(n)
    th = thinness_inequality(fam, PiecewiseDensity.lebesgue(), S)
    print(f"{n:>4} terms: chain holds {th.holds}, any admissible mass of S is at most {float(th.mass_cap):.4f}")
