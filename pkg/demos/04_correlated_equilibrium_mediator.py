"""Correlated equilibria as a saddle point between a mediator and deviators.

The mediator proposes a correlated distribution over joint action profiles;
each player independently mixes over deviation maps (functions from the
recommended action to a played action). The identity map earns exactly zero,
so the players' benchmark is obedience. Optimistic play drives the average
correlated distribution's gap to zero, uncoupled: each player only ever sees
its own deviation-benefit matrix.
"""

import numpy as np

from tvgames import NormalFormGame, build_mediator_game, ce_gap, solve_ce
from tvgames.mediator import exact_ce

# a game of chicken: (dare, yield) payoffs, two pure equilibria plus a
# classic correlated equilibrium on the traffic light
u1 = np.array([[0.0, 7.0], [2.0, 6.0]])
u2 = np.array([[0.0, 2.0], [7.0, 6.0]])
chicken = NormalFormGame((u1, u2))

med = build_mediator_game(chicken)
print("deviation-benefit matrices:",
      [f"player {i}: {M.shape[0]}x{M.shape[1]}" for i, M in enumerate(med.matrices)])

run = solve_ce(chicken, T=8000, gap_every=200)
mu = run.final_average().reshape(2, 2)
print("\nmediator play after 8000 rounds (rows = player 1 recommendation):")
print(mu.round(4))
print(f"ce gap of the average: {run.gap_avg[-1]:.2e}")
print(f"ce gap of the last iterate: {run.gap_last[-1]:.2e}")

mu_lp = exact_ce(chicken).reshape(2, 2)
print("\nlinear-programming reference CE:")
print(mu_lp.round(4))
print(f"its gap: {ce_gap(chicken, mu_lp):.2e}")
print("\n(both avoid the crash profile (dare, dare) almost surely)")
