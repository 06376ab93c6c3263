"""Player I wins the n-stage ball game from y exactly when y lies in the n-th predecessor.

Exhaustive check over every 3-point metric space with distances in {1, 2, 3}.
"""

import itertools

from doubling.core import iterate_predecessor
from doubling.finite import FiniteSpace, game_solve, line

sp = line([0, 1, 2])
U = sp.subset([0])
for n in range(3):
    P = iterate_predecessor(U, n)
    wins = [y for y in range(sp.n) if game_solve(U, y, n)]
    print(f"n={n}: predecessor {sorted(P)}  winning starts {wins}")

checked = mismatches = 0
for a, b, c in itertools.product((1, 2, 3), repeat=3):
    D = [[0, a, b], [a, 0, c], [b, c, 0]]
    try:
        X = FiniteSpace(D)
    except ValueError:
        continue  # triangle inequality fails
    for U in X.all_subsets():
        for n in range(4):
            P = iterate_predecessor(U, n)
            for y in range(X.n):
                checked += 1
                mismatches += game_solve(U, y, n) != (y in P)
print(f"\n{checked} (space, U, y, n) cases, {mismatches} mismatches")
