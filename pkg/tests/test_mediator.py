import itertools

import numpy as np
import pytest

from tvgames.games import MatrixGame, NormalFormGame
from tvgames.mediator import (build_mediator_game, ce_certificate,
                              check_mediator_nonnegative, deviation_maps,
                              exact_ce, run_metalearning_ce, solve_ce)
from tvgames.metrics import ce_gap, eq_gap_zero_sum

rng = np.random.default_rng(23)

MATCHING_PENNIES = NormalFormGame((np.array([[1.0, -1.0], [-1.0, 1.0]]),
                                   np.array([[-1.0, 1.0], [1.0, -1.0]])))

# action 0 strictly dominant for both players; unique CE is the point mass
DOMINANCE = NormalFormGame((np.array([[3.0, 2.0], [1.0, 0.0]]),
                            np.array([[3.0, 1.0], [2.0, 0.0]])))


def random_nf(shape, seed):
    r = np.random.default_rng(seed)
    return NormalFormGame(tuple(r.uniform(-1, 1, shape) for _ in shape))


class TestBuildMediatorGame:
    def test_two_by_two_shapes(self):
        med = build_mediator_game(MATCHING_PENNIES)
        for M in med.matrices:
            assert M.shape == (4, 4)

    def test_direct_column_is_zero(self):
        for g in (MATCHING_PENNIES, DOMINANCE, random_nf((3, 4), 5),
                  random_nf((2, 2, 2), 6)):
            med = build_mediator_game(g)
            for i in range(g.n):
                col = med.direct_column(i)
                np.testing.assert_array_equal(med.matrices[i][:, col], 0.0)

    def test_entries_match_brute_force(self):
        g = random_nf((2, 3), 7)
        med = build_mediator_game(g)
        counts = g.action_counts
        profiles = list(itertools.product(*[range(k) for k in counts]))
        for i in range(2):
            maps = med.maps[i]
            for r, a in enumerate(profiles):
                for c, phi in enumerate(maps):
                    b = list(a)
                    b[i] = phi[a[i]]
                    ref = g.utilities[i][tuple(b)] - g.utilities[i][a]
                    assert med.matrices[i][r, c] == pytest.approx(ref, abs=1e-14)

    def test_size_caps(self):
        with pytest.raises(ValueError, match="players"):
            build_mediator_game(random_nf((2, 2, 2, 2), 8))
        with pytest.raises(ValueError, match="action"):
            build_mediator_game(random_nf((5, 2), 9))

    def test_uncoupled_construction(self):
        # player 0's matrix depends only on its own utility tensor
        u1 = rng.uniform(-1, 1, (3, 3))
        g_a = NormalFormGame((u1, rng.uniform(-1, 1, (3, 3))))
        g_b = NormalFormGame((u1, rng.uniform(-1, 1, (3, 3))))
        np.testing.assert_array_equal(build_mediator_game(g_a).matrices[0],
                                      build_mediator_game(g_b).matrices[0])


class TestCECertificate:
    def test_uniform_matching_pennies(self):
        assert ce_certificate(MATCHING_PENNIES, np.full(4, 0.25)) == \
            pytest.approx(0.0, abs=1e-15)

    def test_point_mass_on_strict_pure_ne(self):
        mu = np.array([1.0, 0.0, 0.0, 0.0])
        assert ce_certificate(DOMINANCE, mu) == pytest.approx(0.0, abs=1e-15)

    def test_cross_check_against_metrics_ce_gap(self):
        for seed in range(25):
            g = random_nf((3, 2), 100 + seed)
            mu = np.random.default_rng(seed).random(6)
            mu /= mu.sum()
            assert ce_certificate(g, mu) == pytest.approx(ce_gap(g, mu),
                                                          abs=1e-12)

    def test_zero_iff_swap_constraints_hold(self):
        g = random_nf((3, 3), 200)
        mu_ce = exact_ce(g)
        eps = ce_certificate(g, mu_ce)
        assert eps <= 1e-9
        # direct constraint enumeration
        counts = g.action_counts
        mu_t = mu_ce.reshape(counts)
        for i in range(2):
            for a in range(counts[i]):
                for b in range(counts[i]):
                    benefit = 0.0
                    for prof in itertools.product(*[range(k) for k in counts]):
                        if prof[i] != a:
                            continue
                        dev = list(prof)
                        dev[i] = b
                        benefit += mu_t[prof] * (g.utilities[i][tuple(dev)]
                                                 - g.utilities[i][prof])
                    assert benefit <= eps + 1e-12
        # and a non-equilibrium point has a strictly positive certificate
        mu_bad = np.zeros(9)
        mu_bad[np.argmin(mu_ce)] = 1.0
        if ce_gap(g, mu_bad) > 1e-9:
            assert ce_certificate(g, mu_bad) > 1e-9


class TestSolveCE:
    def test_matching_pennies_average_gap(self):
        run = solve_ce(MATCHING_PENNIES, T=5000, gap_every=100)
        assert run.gap_avg[-1] <= 1e-2

    def test_dominance_solvable_concentrates(self):
        run = solve_ce(DOMINANCE, T=5000, gap_every=100)
        assert run.gap_avg[-1] <= 1e-2
        assert run.final_average()[0] >= 0.95   # mass on the pure equilibrium

    def test_direct_strategy_benchmark_is_exactly_zero(self):
        run = solve_ce(random_nf((2, 3), 300), T=200, gap_every=20)
        for i in range(run.n):
            med = run.mediators[0]
            col = med.direct_column(i)
            # the direct strategy's cumulative payoff is identically zero
            direct_total = float(np.sum(run.u_players[i][:, col]))
            assert direct_total == pytest.approx(0.0, abs=1e-12)
            # hence the best fixed column does at least as well
            assert run.player_external_regret(i) >= -1e-12 - float(
                np.sum(run.xbars[i] * run.u_players[i]))

    def test_zero_sum_marginals_form_approximate_ne(self):
        U = np.random.default_rng(31).uniform(-1, 1, (3, 3))
        g = NormalFormGame((U, -U))
        run = solve_ce(g, T=4000, gap_every=100)
        gap = run.gap_avg[-1]
        mu = run.final_average().reshape(3, 3)
        mx, my = mu.sum(axis=1), mu.sum(axis=0)
        ne_gap = eq_gap_zero_sum(MatrixGame(-U), mx, my)
        # provable for an eps-CE of a zero-sum game: marginal gap <= 2 eps
        assert ne_gap <= 2 * gap + 1e-9
        # the measured relation is the stronger one-to-one comparison
        assert ne_gap <= gap + 1e-9

    def test_property_a4_margin_on_drifting_sequence(self):
        r = np.random.default_rng(32)
        U = [r.uniform(-1, 1, (2, 2)) for _ in range(2)]
        D = [0.01 * r.uniform(-1, 1, (2, 2)) for _ in range(2)]
        T = 300
        games = [NormalFormGame((U[0] + t * D[0], U[1] + t * D[1]))
                 for t in range(T)]
        run = solve_ce(games, T=T, gap_every=25)
        certs = np.array([exact_ce(g) for g in games])
        res = check_mediator_nonnegative(run, certs)
        assert res.margin >= -1e-9

    def test_current_game_prediction_runs(self):
        run = solve_ce(DOMINANCE, T=500, prediction="current_game", gap_every=50)
        assert run.gap_avg[-1] <= 0.05


class TestMetaLearningCE:
    def test_identical_games_warm_start(self):
        meta = run_metalearning_ce([DOMINANCE] * 4, m=300, eps=1e-3)
        counts = meta.iterations_to_eps
        assert counts[0] > 1
        assert all(c == 1 for c in counts[1:])

    def test_h1_reduces_to_solve_ce(self):
        meta = run_metalearning_ce([DOMINANCE], m=400, eps=1e-3)
        run = solve_ce([DOMINANCE] * 400, T=400, eta=meta.run.eta,
                       prediction="current_game")
        np.testing.assert_allclose(meta.run.mu, run.mu, atol=1e-12)

    def test_scaled_copies_share_equilibria(self):
        g = random_nf((2, 2), 400)
        scaled = NormalFormGame(tuple(2.0 * u for u in g.utilities))
        meta_same = run_metalearning_ce([g, scaled, g, scaled], m=400, eps=1e-3)
        fresh = [random_nf((2, 2), 500 + i) for i in range(4)]
        meta_diff = run_metalearning_ce(fresh, m=400, eps=1e-3)
        assert sum(meta_same.iterations_to_eps[1:]) <= \
            sum(meta_diff.iterations_to_eps[1:])
        assert meta_same.similarity <= meta_diff.similarity + 1e-9


class TestDeviationMaps:
    def test_counts(self):
        assert len(deviation_maps(2)) == 4
        assert len(deviation_maps(3)) == 27
        assert len(deviation_maps(4)) == 256
