"""Warm starts across repeated games.

A sequence of H games, each played for m consecutive rounds. When the games
share (or nearly share) equilibria, the learner enters every block after the
first already converged, so the per-block iteration count collapses; unrelated
games get no such discount. The same effect shows up for the mediator in
general-sum games through the similarity of the correlated equilibria.
"""

import numpy as np

from tvgames import (MatrixGame, NormalFormGame, gen_metalearning, rand_matrix,
                     run_dynamics)
from tvgames.dynamics import LearnerSpec
from tvgames.mediator import run_metalearning_ce
from tvgames.metrics import iterations_to_eps

H, m, eps = 8, 400, 1e-3
spec = LearnerSpec("ogd", prediction="current_game")

print(f"== zero-sum: {H} blocks of {m} rounds, iterations to gap <= {eps} ==")
same = [MatrixGame(np.diag([2.0, 1.0]))] * H
tr = run_dynamics(gen_metalearning(same, m), [spec] * 2)
print("  identical games:", iterations_to_eps(tr, eps))

fresh = [MatrixGame(rand_matrix(40 + h, 3, 3)) for h in range(H)]
tr = run_dynamics(gen_metalearning(fresh, m), [spec] * 2)
print("  unrelated games:", iterations_to_eps(tr, eps))

print(f"\n== general-sum mediator: {H} blocks of {m} rounds ==")
base = NormalFormGame((rand_matrix(50, 2, 2), rand_matrix(51, 2, 2)))
meta = run_metalearning_ce([base] * H, m, eps=eps)
print("  identical games:", meta.iterations_to_eps,
      f" similarity proxy {meta.similarity:.4f}")

others = [NormalFormGame((rand_matrix(60 + h, 2, 2), rand_matrix(70 + h, 2, 2)))
          for h in range(H)]
meta = run_metalearning_ce(others, m, eps=eps)
print("  unrelated games:", meta.iterations_to_eps,
      f" similarity proxy {meta.similarity:.4f}")
