"""Sets with the same Lebesgue measure can sit far apart in the doubling metric.

``minus(V, N)`` punctures each component of ``V`` at two sequences of points
accumulating at its ends. Iterating it ``M`` times gives a set of full
measure in ``V`` whose directed distance to ``V`` is exactly ``M``.
"""

from doubling.measures import PiecewiseDensity
from doubling.realline import IntervalSet, minus, tower_certificate, tower_distance

V = IntervalSet.interval(0, 4)
leb = PiecewiseDensity.lebesgue()

print("one puncture round, truncated at N = 1:")
print("  ", minus(V, 1))

print("\n M  d(tower, V)  certificate  witness  truncations")
for M in range(1, 7):
    cert = tower_certificate(V, M)
    modes = ",".join(
        f"{N}{'*' if c.get('local') else ''}" for N, c in sorted(cert.truncation_checks.items())
    )
    print(f" {M}  {tower_distance(V, M):^11}  {str(cert.ok):^11}  {cert.witness!s:^7}  {modes}")
print("(* = local certificate used once the materialized tower would be too large)")

T = minus(minus(V, 3), 3)
print(f"\nLebesgue mass of a two-level truncated tower: {leb.measure(T)} (same as V: {leb.measure(V)})")
