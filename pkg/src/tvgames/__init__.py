"""No-regret learning dynamics in time-varying games.

A numpy library plus a small CLI lab: optimistic/plain gradient descent and
multiplicative weights over the simplex, generators for drifting / alternating
/ meta-learning game sequences, a metrics engine for every bounded quantity
(regrets, equilibrium gaps, path lengths, variation measures), checkers that
evaluate the convergence theorems as runtime inequalities, and a correlated-
equilibrium mediator built on the bilinear saddle-point formulation.
"""

from .geometry import (bregman, project_simplex, spectral_norm, uniform_point)
from .games import (GameSequence, MatrixGame, NormalFormGame, PolymatrixGame,
                    QuadraticSaddle, constant_sequence, eval_saddle_gradients,
                    gen_alternating_example, gen_drift_linear,
                    gen_drift_powerlaw, gen_identical_interest,
                    gen_metalearning, gen_polymatrix, rand_matrix,
                    sequence_from_descriptor)
from .dynamics import (LearnerSpec, LearnerState, Trace, mwu_update,
                       ogd_propose, ogd_update, run_averaged_two_point,
                       run_dynamics, tuned_eta)
from .metrics import (NECertificate, VariationReport, ce_gap, dynamic_regret,
                      eq_gap_normal_form, eq_gap_zero_sum, external_regret,
                      iterations_to_eps, k_switch_dreg, max_dynamic_regret,
                      ne_oracle_zero_sum, oracle_certificates, path_lengths,
                      standard_checks, trace_eq_gaps, uniform_certificates,
                      variation_report)
from .mediator import (MediatorGame, build_mediator_game, ce_certificate,
                       run_metalearning_ce, solve_ce)

__version__ = "0.1.0"
