"""Correlated equilibria as a bilinear saddle point with a mediator.

A mediator picks a correlated distribution over joint action profiles while
each player independently picks a mixture over deviation maps (functions from
recommended action to played action); the payoff is the total deviation
benefit. The matrix of that bilinear form for player i has one row per joint
profile and one column per deviation map, with the identity map (the direct,
obedient strategy) an all-zero column. Optimistic dynamics on this saddle
drive the correlated-equilibrium gap to zero, and the whole loop is
uncoupled: player i's feedback depends on its own utility tensor only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dynamics import initial_state, ogd_update
from .games import NormalFormGame
from .geometry import project_simplex, spectral_norm
from .metrics import CheckResult, _warm_state

MAX_PLAYERS = 3
MAX_ACTIONS = 4


@dataclass(frozen=True)
class MediatorGame:
    """Deviation-benefit matrices of the bilinear CE formulation.

    matrices[i] has shape (prod |A_j|, |A_i|^|A_i|); entry (a, phi) is
    u_i(phi(a_i), a_-i) - u_i(a). Row order is C order over joint profiles,
    column order is C order over map tuples.
    """

    game: NormalFormGame
    matrices: tuple
    maps: tuple   # per player: tuple of deviation-map tuples, column order

    @property
    def n(self) -> int:
        return self.game.n

    @property
    def n_profiles(self) -> int:
        return self.matrices[0].shape[0]

    def direct_column(self, i: int) -> int:
        return self.maps[i].index(tuple(range(self.game.action_counts[i])))

    def smoothness(self) -> float:
        """Operator norm bound of the stacked bilinear form (quadrature sum)."""
        return float(np.sqrt(sum(spectral_norm(M) ** 2 for M in self.matrices)))


def deviation_maps(k: int):
    """All k^k maps from a k-action set to itself, in C order."""
    return tuple(itertools.product(range(k), repeat=k))


def build_mediator_game(g: NormalFormGame) -> MediatorGame:
    """Construct the per-player deviation-benefit matrices.

    Capped at 3 players and 4 actions per player: the deviation-map axis
    grows as |A_i|^|A_i| and the profile axis as prod |A_j|.
    """
    if g.n > MAX_PLAYERS:
        raise ValueError(f"{g.n} players exceed the cap of {MAX_PLAYERS} "
                         f"(profile rows grow as the product of action counts)")
    if max(g.action_counts) > MAX_ACTIONS:
        raise ValueError(f"action count {max(g.action_counts)} exceeds the cap of "
                         f"{MAX_ACTIONS} (deviation-map columns grow as k^k)")
    mats = []
    all_maps = []
    for i in range(g.n):
        k = g.action_counts[i]
        Ui = np.moveaxis(g.utilities[i], i, 0)       # (k, rest)
        maps = deviation_maps(k)
        cols = np.empty((int(np.prod(g.action_counts)), len(maps)))
        for c, phi in enumerate(maps):
            dev = Ui[np.array(phi)]                  # recommended a -> payoff at phi(a)
            diff = np.moveaxis(dev - Ui, 0, i)
            cols[:, c] = diff.ravel()
        mats.append(cols)
        all_maps.append(maps)
    return MediatorGame(game=g, matrices=tuple(mats), maps=tuple(all_maps))


def ce_certificate(g: NormalFormGame, mu, mediator: MediatorGame | None = None) -> float:
    """eps = max over players and deviation maps of mu^T A_i e_phi.

    This is the CE gap computed through the mediator matrices; it must agree
    with the per-recommendation decomposition to machine precision.
    """
    if mediator is None:
        mediator = build_mediator_game(g)
    mu = np.asarray(mu, dtype=float).ravel()
    return max(float(np.max(mu @ M)) for M in mediator.matrices)


def exact_ce(g: NormalFormGame) -> np.ndarray:
    """A correlated equilibrium by linear programming (certificate oracle).

    Feasibility over the swap constraints: for every player, recommendation,
    and replacement action, the conditional deviation benefit is <= 0.
    """
    from scipy.optimize import linprog

    counts = g.action_counts
    n_prof = int(np.prod(counts))
    rows = []
    for i in range(g.n):
        k = counts[i]
        Ui = np.moveaxis(g.utilities[i], i, 0).reshape(k, -1)
        for a in range(k):
            for b in range(k):
                if a == b:
                    continue
                coeff = np.zeros((k, Ui.shape[1]))
                coeff[a] = Ui[b] - Ui[a]
                rows.append(np.moveaxis(coeff.reshape((k,) + tuple(
                    counts[j] for j in range(g.n) if j != i)), 0, i).ravel())
    A_ub = np.array(rows)
    res = linprog(c=np.zeros(n_prof), A_ub=A_ub, b_ub=np.zeros(len(rows)),
                  A_eq=np.ones((1, n_prof)), b_eq=[1.0],
                  bounds=[(0, None)] * n_prof, method="highs")
    if not res.success:
        raise RuntimeError(f"CE feasibility LP failed: {res.message}")
    mu = np.maximum(res.x, 0.0)
    return mu / np.sum(mu)


@dataclass
class CERun:
    """Record of a mediator-vs-players run over a (time-varying) sequence."""

    games: list                     # NormalFormGame per round
    mediators: list                 # MediatorGame per round
    eta: float
    prediction: str
    mu: np.ndarray                  # (T, n_profiles) mediator iterates
    mu_avg: np.ndarray              # running averages
    xbars: list                     # per player: (T, n_maps_i)
    u_mu: np.ndarray                # mediator utility vectors
    u_players: list                 # per player utility vectors
    gap_last: np.ndarray            # ce gap of mu(t) at the round-t game
    gap_avg: np.ndarray             # ce gap of the running average

    @property
    def T(self) -> int:
        return self.mu.shape[0]

    @property
    def n(self) -> int:
        return len(self.xbars)

    def mediator_dynamic_regret(self, comparators) -> float:
        comp = np.asarray(comparators, dtype=float)
        return float(np.sum(comp * self.u_mu) - np.sum(self.mu * self.u_mu))

    def player_external_regret(self, i: int) -> float:
        totals = np.sum(self.u_players[i], axis=0)
        realized = float(np.sum(self.xbars[i] * self.u_players[i]))
        return float(np.max(totals) - realized)

    def final_average(self) -> np.ndarray:
        return self.mu_avg[-1]


def _propose_with(state, m) -> np.ndarray:
    """Proposal of an OGD state under an externally supplied prediction."""
    return project_simplex(state.x_hat + state.eta * np.asarray(m, dtype=float))


def _mediator_sequence(games, T: int):
    """Normalize input into per-round NormalFormGames + cached MediatorGames."""
    if isinstance(games, NormalFormGame):
        games = [games]
    games = list(games)
    if len(games) == 1:
        per_round = [games[0]] * T
    elif len(games) == T:
        per_round = games
    else:
        raise ValueError(f"need 1 or T={T} games, got {len(games)}")
    cache = {}
    mediators = []
    for g in per_round:
        key = id(g)
        if key not in cache:
            cache[key] = build_mediator_game(g)
        mediators.append(cache[key])
    return per_round, mediators


def solve_ce(games, T: int, eta: float | None = None,
             prediction: str = "last_utility", warm=None,
             gap_every: int = 1) -> CERun:
    """Optimistic dynamics on the mediator saddle point.

    The mediator minimizes the total deviation benefit over correlated
    distributions; each player maximizes its own benefit over deviation-map
    mixtures, seeing only its own matrix. gap_every controls how often the
    (relatively expensive) CE gaps of iterate and running average are
    evaluated; skipped rounds carry the previous value forward.
    """
    per_round, mediators = _mediator_sequence(games, T)
    if eta is None:
        eta = 1.0 / (4.0 * max(med.smoothness() for med in mediators))
    n = mediators[0].n
    n_prof = mediators[0].n_profiles
    n_maps = [M.shape[1] for M in mediators[0].matrices]

    if warm is None:
        s_mu = initial_state(n_prof, eta)
        s_pl = [initial_state(nm, eta) for nm in n_maps]
    else:
        s_mu = _warm_state(warm[0], eta)
        s_pl = [_warm_state(w, eta) for w in warm[1]]

    mu = np.empty((T, n_prof))
    mu_avg = np.empty((T, n_prof))
    xbars = [np.empty((T, nm)) for nm in n_maps]
    u_mu = np.empty((T, n_prof))
    u_players = [np.empty((T, nm)) for nm in n_maps]
    gap_last = np.empty(T)
    gap_avg = np.empty(T)

    mu_sum = np.zeros(n_prof)
    prev_mu, prev_x = s_mu.x, [s.x for s in s_pl]

    for t in range(1, T + 1):
        med = mediators[t - 1]
        if prediction == "current_game":
            m_mu = -sum(med.matrices[i] @ prev_x[i] for i in range(n))
            m_pl = [med.matrices[i].T @ prev_mu for i in range(n)]
            cur_mu = _propose_with(s_mu, m_mu)
            cur_x = [_propose_with(s_pl[i], m_pl[i]) for i in range(n)]
        else:
            m_mu, m_pl = s_mu.m, [s.m for s in s_pl]
            cur_mu, cur_x = s_mu.x, [s.x for s in s_pl]

        ut_mu = -sum(med.matrices[i] @ cur_x[i] for i in range(n))
        ut_pl = [med.matrices[i].T @ cur_mu for i in range(n)]

        mu[t - 1] = cur_mu
        mu_sum += cur_mu
        mu_avg[t - 1] = mu_sum / t
        u_mu[t - 1] = ut_mu
        for i in range(n):
            xbars[i][t - 1] = cur_x[i]
            u_players[i][t - 1] = ut_pl[i]
        if (t - 1) % gap_every == 0 or t == T:
            gap_last[t - 1] = ce_certificate(per_round[t - 1], cur_mu, med)
            gap_avg[t - 1] = ce_certificate(per_round[t - 1], mu_avg[t - 1], med)
        else:
            gap_last[t - 1] = gap_last[t - 2]
            gap_avg[t - 1] = gap_avg[t - 2]

        next_m_mu = ut_mu if prediction == "last_utility" else np.zeros(n_prof)
        s_mu = ogd_update(s_mu, ut_mu, next_m_mu)
        s_pl = [ogd_update(s_pl[i], ut_pl[i],
                           ut_pl[i] if prediction == "last_utility" else np.zeros(n_maps[i]))
                for i in range(n)]
        prev_mu, prev_x = cur_mu, cur_x

    return CERun(games=per_round, mediators=mediators, eta=eta,
                 prediction=prediction, mu=mu, mu_avg=mu_avg, xbars=xbars,
                 u_mu=u_mu, u_players=u_players, gap_last=gap_last,
                 gap_avg=gap_avg)


def check_mediator_nonnegative(run: CERun, certificates) -> CheckResult:
    """Mediator analogue of the nonnegativity property: the mediator's dynamic
    regret under a sequence of (approximate) CE comparators plus the players'
    external regrets is bounded below by the aggregated certificate slack."""
    certs = np.asarray(certificates, dtype=float)
    eps = np.array([ce_certificate(run.games[t], certs[t], run.mediators[t])
                    for t in range(run.T)])
    eps = np.maximum(eps, 0.0)
    dreg = run.mediator_dynamic_regret(certs)
    regs = sum(run.player_external_regret(i) for i in range(run.n))
    slack = float(run.n * np.sum(eps))
    return CheckResult("mediator_nonnegative", float(dreg + regs + slack), True,
                       {"dreg_mu": dreg, "player_regret_sum": float(regs),
                        "eps_slack": slack})


@dataclass
class MetaCERun:
    """Per-block convergence record of the meta-learning mediator driver."""

    runs_gap_last: np.ndarray
    iterations_to_eps: list
    block_averages: list
    similarity: float
    eps: float
    run: CERun = field(repr=False, default=None)


def run_metalearning_ce(games, m: int, eta: float | None = None,
                        eps: float = 1e-3,
                        prediction: str = "current_game") -> MetaCERun:
    """H mediator games, each repeated m rounds, one uninterrupted learner.

    Reports per block the first within-block round whose last-iterate CE gap
    is <= eps (m+1 if never), plus the first-order similarity proxy of the
    converged block averages.
    """
    games = list(games)
    H = len(games)
    per_round = [g for g in games for _ in range(m)]
    run = solve_ce(per_round, T=m * H, eta=eta, prediction=prediction)
    counts = []
    block_avgs = []
    for h in range(H):
        block = run.gap_last[h * m:(h + 1) * m]
        hit = np.nonzero(block <= eps)[0]
        counts.append(int(hit[0]) + 1 if hit.size else m + 1)
        block_avgs.append(np.mean(run.mu[h * m:(h + 1) * m], axis=0))
    sim = float(sum(np.linalg.norm(block_avgs[h + 1] - block_avgs[h])
                    for h in range(H - 1)))
    return MetaCERun(runs_gap_last=run.gap_last, iterations_to_eps=counts,
                     block_averages=block_avgs, similarity=sim, eps=eps, run=run)
