"""The numeric substrate: simplex projection and the three learners.

Walks through the Euclidean projection, the prox steps behind optimistic /
plain gradient descent and multiplicative weights, and a first self-play run
on a tiny diagonal game whose mixed equilibrium is (1/3, 2/3).
"""

import numpy as np

from tvgames import (MatrixGame, constant_sequence, eq_gap_zero_sum,
                     mwu_update, ogd_propose, ogd_update, project_simplex,
                     run_dynamics, spectral_norm)
from tvgames.dynamics import LearnerSpec, LearnerState

print("== projection onto the simplex ==")
for v in ([0.5, 0.5], [2.0, 0.0], [0.4, 0.1, -0.2]):
    print(f"  proj({v}) = {project_simplex(v)}")

print("\n== one optimistic step ==")
s = LearnerState(x=np.array([0.5, 0.5]), x_hat=np.array([0.5, 0.5]),
                 m=np.array([1.0, 0.0]), eta=0.1)
print("  proposal with prediction (1,0):", ogd_propose(s))
s2 = ogd_update(s, u=np.array([0.0, 1.0]), next_m=np.array([0.0, 1.0]))
print("  secondary iterate after u=(0,1):", s2.x_hat)

print("\n== multiplicative weights ==")
x = np.array([0.5, 0.5])
print("  mwu(uniform, u=(ln 2, 0), eta=1) =", mwu_update(x, [np.log(2), 0.0], 1.0))

print("\n== self-play on diag(2, 1): equilibrium (1/3, 2/3) ==")
game = MatrixGame(np.diag([2.0, 1.0]))
L = spectral_norm(game.A)
seq = constant_sequence(game, 5000)
trace = run_dynamics(seq, [LearnerSpec("ogd", eta=1 / (4 * L))] * 2)
for t in (1, 10, 100, 1000, 5000):
    x, y = trace.x[0][t - 1], trace.x[1][t - 1]
    print(f"  t={t:5d}  x={x.round(4)}  gap={eq_gap_zero_sum(game, x, y):.2e}")
