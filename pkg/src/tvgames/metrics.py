"""Post-hoc metrics over traces and the inequality checkers.

Every quantity the convergence theory bounds is computed here from a Trace:
external / dynamic / K-switch regret, per-round equilibrium gaps, path
lengths, equilibrium oracles with honest eps certificates, the variation
measures of a game sequence, and checkers that evaluate each theorem's
right-hand side term by term and return a signed margin (RHS minus the
measured quantity). A checker's margin is only contractual when the theorem's
hypotheses hold for the run; the `applicable` flag records that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (LearnerState, Trace, initial_state, ogd_update,
                       sequence_smoothness)
from .games import (GameSequence, MatrixGame, NormalFormGame, PolymatrixGame,
                    QuadraticSaddle)
from .geometry import project_simplex, spectral_norm, uniform_point

SIMPLEX_DIAMETER = np.sqrt(2.0)   # l2 diameter of any probability simplex
SIMPLEX_NORM = 1.0                # max l2 norm attained on a simplex
MARGIN_TOL = 1e-9


# ---------------------------------------------------------------------------
# Regret
# ---------------------------------------------------------------------------

def realized_value(trace: Trace, player: int) -> float:
    return float(np.sum(trace.x[player] * trace.u[player]))


def external_regret(trace: Trace, player: int) -> float:
    """Best fixed action in hindsight minus realized; vertices suffice."""
    totals = np.sum(trace.u[player], axis=0)
    return float(np.max(totals) - realized_value(trace, player))


def dynamic_regret(trace: Trace, player: int, comparators) -> float:
    """Regret against an arbitrary comparator sequence (one point per round)."""
    comp = np.asarray(comparators, dtype=float)
    if comp.shape != trace.u[player].shape:
        raise ValueError(f"comparators shape {comp.shape} != {trace.u[player].shape}")
    return float(np.sum(comp * trace.u[player]) - realized_value(trace, player))


def max_dynamic_regret(trace: Trace, player: int) -> float:
    """Per-round best vertex comparators; every term is nonnegative."""
    best = np.sum(np.max(trace.u[player], axis=1))
    return float(best - realized_value(trace, player))


def k_switch_dreg(trace: Trace, player: int, K: int) -> float:
    """Exact optimum over comparator sequences with at most K-1 switches.

    Dynamic program over (round, segments used) with per-action prefix sums;
    vertices are optimal within a segment. K > T is treated as K = T.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    U = trace.u[player]
    T = U.shape[0]
    K = min(K, T)
    S = np.vstack([np.zeros(U.shape[1]), np.cumsum(U, axis=0)])  # S[t] = sums up to round t
    # best[j]: optimal comparator value for rounds 1..j with the current
    # segment budget; start with one segment.
    best = np.array([np.max(S[j]) for j in range(T + 1)])
    best[0] = 0.0
    for _ in range(2, K + 1):
        prev = best
        best = prev.copy()
        for j in range(1, T + 1):
            # new segment starting at i+1 .. j on top of prev[0..j-1]
            seg = np.max(S[j] - S[:j], axis=1)
            best[j] = max(prev[j], float(np.max(prev[:j] + seg)))
    return float(best[T] - realized_value(trace, player))


# ---------------------------------------------------------------------------
# Equilibrium gaps
# ---------------------------------------------------------------------------

def linear_br_gap(x, u) -> float:
    """max over the simplex of <., u> minus realized; attained at a vertex."""
    return float(np.max(u) - x @ u)


def eq_gap_zero_sum(game: MatrixGame, x, y) -> float:
    ux, uy = game.utilities(np.asarray(x, float), np.asarray(y, float))
    return max(linear_br_gap(x, ux), linear_br_gap(y, uy))


def saddle_best_response(g: QuadraticSaddle, other, side: str, tol: float = 1e-9,
                         max_iter: int = 200) -> np.ndarray:
    """Best response within the quadratic saddle via projected gradient.

    The per-player problem is mu-strongly convex; with step 1/mu the iteration
    is a fixed-point projection and converges immediately, the loop just
    certifies the decrease. mu = 0 degenerates to a vertex best response.
    """
    if side == "x":
        grad_lin = g.A @ other          # minimize x^T A y + mu/2 ||x-x0||^2
        anchor = g.x0
    else:
        grad_lin = -(g.A.T @ other)     # maximize -> minimize the negation
        anchor = g.y0
    if g.mu == 0.0:
        v = np.zeros(grad_lin.size)
        v[int(np.argmin(grad_lin))] = 1.0
        return v
    x = uniform_point(grad_lin.size)
    for _ in range(max_iter):
        nxt = project_simplex(x - (grad_lin + g.mu * (x - anchor)) / g.mu)
        if np.linalg.norm(nxt - x) <= tol:
            return nxt
        x = nxt
    return x


def eq_gap_saddle(g: QuadraticSaddle, x, y, tol: float = 1e-9) -> float:
    xbr = saddle_best_response(g, y, "x", tol)
    ybr = saddle_best_response(g, x, "y", tol)
    gap_x = g.value(x, y) - g.value(xbr, y)
    gap_y = g.value(x, ybr) - g.value(x, y)
    return max(float(gap_x), float(gap_y), 0.0)


def eq_gap_normal_form(game, profile) -> float:
    """Best pure-deviation benefit, maximized over players.

    Expectations are under the product of mixed strategies. Supports explicit
    normal-form games (n <= 4), polymatrix games, and quadratic saddles.
    """
    if isinstance(game, QuadraticSaddle):
        return eq_gap_saddle(game, profile[0], profile[1])
    if isinstance(game, PolymatrixGame):
        return max(linear_br_gap(profile[i], game.utility_vector(i, profile))
                   for i in range(game.n))
    if isinstance(game, NormalFormGame):
        if game.n > 4:
            raise ValueError("joint-profile enumeration is capped at 4 players")
        return max(linear_br_gap(profile[i], game.expected_utility_gradient(i, profile))
                   for i in range(game.n))
    if isinstance(game, MatrixGame):
        # identical-interest reading: shared utility x^T A y
        gx = game.A @ profile[1]
        gy = game.A.T @ profile[0]
        return max(linear_br_gap(profile[0], gx), linear_br_gap(profile[1], gy))
    raise TypeError(f"unsupported game type {type(game).__name__}")


def trace_eq_gaps(trace: Trace) -> np.ndarray:
    """Per-round equilibrium gap along the trace.

    Utilities are linear in each player's own strategy for every kind except
    the quadratic saddle, so the recorded utility vectors suffice; saddles are
    re-evaluated against their closed-form best responses.
    """
    if trace.kind == "saddle":
        seq = trace.sequence()
        return np.array([eq_gap_saddle(seq.game_at(t),
                                       trace.x[0][t - 1], trace.x[1][t - 1])
                         for t in range(1, trace.T + 1)])
    gaps = np.zeros(trace.T)
    for p in range(trace.n_players):
        g = np.max(trace.u[p], axis=1) - np.sum(trace.x[p] * trace.u[p], axis=1)
        gaps = np.maximum(gaps, g)
    return gaps


def ce_gap(game: NormalFormGame, mu) -> float:
    """Correlated-equilibrium gap by per-recommendation decomposition.

    For each player and each recommended action, take the best conditional
    deviation (including staying put, so each term is >= 0) and sum over
    recommendations; equals the maximum over all deviation maps.
    """
    mu = np.asarray(mu, dtype=float).reshape(game.action_counts)
    worst = 0.0
    for i in range(game.n):
        Ui = np.moveaxis(game.utilities[i], i, 0)
        Mi = np.moveaxis(mu, i, 0)
        k = Ui.shape[0]
        Uf = Ui.reshape(k, -1)
        Mf = Mi.reshape(k, -1)
        cross = Mf @ Uf.T            # cross[a, a'] = E_mu[ u_i(a', rest) ; rec = a ]
        base = np.diag(cross)
        worst = max(worst, float(np.sum(np.max(cross - base[:, None], axis=1))))
    return worst


# ---------------------------------------------------------------------------
# Path lengths
# ---------------------------------------------------------------------------

def path_lengths(trace: Trace, player: int | None = None):
    """(first_order, second_order) path lengths of (x, xhat, xhat+).

    second = sum_t ||z(t)-zhat(t)||^2 + ||z(t)-zhat(t+1)||^2; first is the
    same with norms instead of squared norms.
    """
    ps = range(trace.n_players) if player is None else [player]
    a2 = np.zeros(trace.T)
    b2 = np.zeros(trace.T)
    for p in ps:
        a2 += np.sum((trace.x[p] - trace.x_hat[p]) ** 2, axis=1)
        b2 += np.sum((trace.x[p] - trace.x_hat_next[p]) ** 2, axis=1)
    second = float(np.sum(a2) + np.sum(b2))
    first = float(np.sum(np.sqrt(a2)) + np.sum(np.sqrt(b2)))
    return first, second


# ---------------------------------------------------------------------------
# Equilibrium oracles and certificates
# ---------------------------------------------------------------------------

def _warm_state(v, eta: float) -> LearnerState:
    v = project_simplex(np.asarray(v, dtype=float))
    return LearnerState(x=v, x_hat=v, m=np.zeros(v.size), eta=eta)


@dataclass(frozen=True)
class NECertificate:
    """A strategy profile together with its certified equilibrium gap."""

    profile: tuple           # per-player strategy vectors
    eps: float

    @property
    def x_star(self):
        return self.profile[0]

    @property
    def y_star(self):
        return self.profile[1]

    def joint(self) -> np.ndarray:
        return np.concatenate(self.profile)


def _two_by_two_closed_form(A: np.ndarray):
    """Interior mixed equilibrium of a 2x2 zero-sum game, if it exists."""
    (a, b), (c, d) = A
    den = a - b - c + d
    if den == 0.0:
        return None
    x1 = (d - c) / den
    y1 = (d - b) / den
    if not (0.0 < x1 < 1.0 and 0.0 < y1 < 1.0):
        return None
    return np.array([x1, 1.0 - x1]), np.array([y1, 1.0 - y1])


def ne_oracle_zero_sum(A, tol: float = 1e-6, warm_start=None,
                       max_iter: int = 10 ** 6) -> NECertificate:
    """Certified (approximate) Nash equilibrium of the matrix game A.

    2x2 games with an interior equilibrium use the closed form; otherwise
    optimistic self-play with eta = 1/(4L) runs until the recomputed gap drops
    below tol or the iteration cap is hit, returning whatever gap was actually
    certified. Never fails silently.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    game = MatrixGame(A)
    A = game.A
    dx, dy = A.shape
    if (dx, dy) == (2, 2):
        closed = _two_by_two_closed_form(A)
        if closed is not None:
            eps = eq_gap_zero_sum(game, *closed)
            if eps <= 1e-12:
                return NECertificate(profile=closed, eps=float(eps))
        for i in range(2):
            for j in range(2):
                x = np.eye(2)[i]
                y = np.eye(2)[j]
                eps = eq_gap_zero_sum(game, x, y)
                if eps <= 1e-12:
                    return NECertificate(profile=(x, y), eps=float(eps))

    L = spectral_norm(A)
    if L == 0.0:
        prof = (uniform_point(dx), uniform_point(dy))
        return NECertificate(profile=prof, eps=0.0)
    eta = 1.0 / (4.0 * L)
    if warm_start is None:
        sx, sy = initial_state(dx, eta), initial_state(dy, eta)
    else:
        sx = _warm_state(warm_start[0], eta)
        sy = _warm_state(warm_start[1], eta)
    sum_x, sum_y = np.zeros(dx), np.zeros(dy)
    best = None
    check_every = 25
    for it in range(1, max_iter + 1):
        ux, uy = game.utilities(sx.x, sy.x)
        sum_x += sx.x
        sum_y += sy.x
        sx = ogd_update(sx, ux, ux)
        sy = ogd_update(sy, uy, uy)
        if it % check_every == 0 or it == max_iter:
            for cand in ((sx.x, sy.x), (sum_x / it, sum_y / it)):
                eps = eq_gap_zero_sum(game, *cand)
                if best is None or eps < best.eps:
                    best = NECertificate(profile=(cand[0].copy(), cand[1].copy()),
                                         eps=float(eps))
            if best.eps <= tol:
                return best
            check_every = min(2 * check_every, 400)
    return best


def ne_oracle_saddle(g: QuadraticSaddle, tol: float = 1e-11, warm_start=None,
                     max_iter: int = 200_000) -> NECertificate:
    """Certified equilibrium of a quadratic saddle via optimistic self-play.

    With mu > 0 the equilibrium is unique and the iteration converges
    linearly, so machine-precision certificates are cheap.
    """
    L = float(np.hypot(g.mu, np.linalg.norm(g.A, 2)))
    eta = min(1.0 / (8.0 * L), 1.0 / (2.0 * g.mu)) if g.mu > 0 else 1.0 / (8.0 * L)
    dx, dy = g.dims
    if warm_start is None:
        sx, sy = initial_state(dx, eta), initial_state(dy, eta)
    else:
        sx = _warm_state(warm_start[0], eta)
        sy = _warm_state(warm_start[1], eta)
    best = None
    check_every = 50
    for it in range(1, max_iter + 1):
        ux, uy = g.utilities(sx.x, sy.x)
        sx = ogd_update(sx, ux, ux)
        sy = ogd_update(sy, uy, uy)
        if it % check_every == 0 or it == max_iter:
            eps = eq_gap_saddle(g, sx.x, sy.x)
            if best is None or eps < best.eps:
                best = NECertificate(profile=(sx.x.copy(), sy.x.copy()), eps=float(eps))
            if best.eps <= tol:
                return best
    return best


def ne_oracle_polymatrix(g: PolymatrixGame, tol: float = 1e-6, warm_start=None,
                         max_iter: int = 10 ** 6) -> NECertificate:
    """Certified equilibrium of a zero-sum polymatrix game via self-play."""
    L = spectral_norm(g.block_matrix())
    if L == 0.0:
        prof = tuple(uniform_point(d) for d in g.dims)
        return NECertificate(profile=prof, eps=0.0)
    eta = 1.0 / (4.0 * L)
    if warm_start is None:
        states = [initial_state(d, eta) for d in g.dims]
    else:
        states = [_warm_state(w, eta) for w in warm_start]
    sums = [np.zeros(d) for d in g.dims]
    best = None
    check_every = 25
    for it in range(1, max_iter + 1):
        prof = [s.x for s in states]
        us = [g.utility_vector(i, prof) for i in range(g.n)]
        for i in range(g.n):
            sums[i] += prof[i]
        states = [ogd_update(states[i], us[i], us[i]) for i in range(g.n)]
        if it % check_every == 0 or it == max_iter:
            for cand in (tuple(s.x.copy() for s in states),
                         tuple(si / it for si in sums)):
                eps = eq_gap_normal_form(g, cand)
                if best is None or eps < best.eps:
                    best = NECertificate(profile=cand, eps=float(eps))
            if best.eps <= tol:
                return best
            check_every = min(2 * check_every, 400)
    return best


def ne_oracle(game, tol: float = 1e-6, warm_start=None) -> NECertificate:
    if isinstance(game, MatrixGame):
        return ne_oracle_zero_sum(game.A, tol, warm_start)
    if isinstance(game, QuadraticSaddle):
        return ne_oracle_saddle(game, min(tol, 1e-11), warm_start)
    if isinstance(game, PolymatrixGame):
        return ne_oracle_polymatrix(game, tol, warm_start)
    raise TypeError(f"no equilibrium oracle for {type(game).__name__}")


def _game_key(game):
    if isinstance(game, MatrixGame):
        return game.A.tobytes()
    if isinstance(game, QuadraticSaddle):
        return (game.A.tobytes(), game.mu, game.x0.tobytes(), game.y0.tobytes())
    if isinstance(game, PolymatrixGame):
        return tuple(sorted((k, v.tobytes()) for k, v in game.edge_matrices.items()))
    return id(game)


def oracle_certificates(seq: GameSequence, tol: float = 1e-6) -> list:
    """One certificate per round; repeated games are solved once and
    consecutive rounds warm-start from the previous solution."""
    certs = []
    cache = {}
    warm = None
    for t in range(1, seq.T + 1):
        game = seq.game_at(t)
        key = _game_key(game)
        if key not in cache:
            cache[key] = ne_oracle(game, tol, warm_start=warm)
        certs.append(cache[key])
        warm = certs[-1].profile
    return certs


def uniform_certificates(seq: GameSequence) -> list:
    """The constant uniform profile with its per-round certified gap.

    First-order variation of this family is 0 by construction; the cost moves
    into the eps terms, which pure best-response enumeration certifies.
    """
    certs = []
    for t in range(1, seq.T + 1):
        game = seq.game_at(t)
        if isinstance(game, MatrixGame) and seq.kind == "zero-sum":
            prof = (uniform_point(game.dims[0]), uniform_point(game.dims[1]))
            eps = eq_gap_zero_sum(game, *prof)
        elif isinstance(game, PolymatrixGame):
            prof = tuple(uniform_point(d) for d in game.dims)
            eps = eq_gap_normal_form(game, prof)
        elif isinstance(game, QuadraticSaddle):
            prof = (uniform_point(game.dims[0]), uniform_point(game.dims[1]))
            eps = eq_gap_saddle(game, *prof)
        else:
            raise TypeError(f"no uniform certificate for kind {seq.kind!r}")
        certs.append(NECertificate(profile=prof, eps=float(eps)))
    return certs


def certificate_variation(certs) -> tuple:
    """(first-order variation of the certified profiles, sum of eps)."""
    pts = np.array([c.joint() for c in certs])
    v = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    return v, float(sum(c.eps for c in certs))


# ---------------------------------------------------------------------------
# Variation report
# ---------------------------------------------------------------------------

@dataclass
class VariationReport:
    """Every variation measure that applies to the sequence; None otherwise."""

    v_a: float | None = None        # sum of squared spectral payoff increments
    w_a: float | None = None        # total spectral deviation from the mean matrix
    v_ne: float | None = None       # first-order certified equilibrium movement
    eps_sum: float | None = None    # total certificate slack paired with v_ne
    v_phi: float | None = None      # potential drift, signed max difference
    s_ne: float | None = None       # second-order per-block equilibrium movement
    v_grad_f: float | None = None   # gradient-operator drift, per block
    certificates: list | None = field(default=None, repr=False)

    def to_json(self):
        return {k: getattr(self, k) for k in
                ("v_a", "w_a", "v_ne", "eps_sum", "v_phi", "s_ne", "v_grad_f")}


def _matrix_rounds(seq: GameSequence):
    return [seq.game_at(t).A for t in range(1, seq.T + 1)]


def _saddle_grad_drift(g: QuadraticSaddle, h: QuadraticSaddle) -> float:
    """max over Z of ||F_next(z) - F_prev(z)||^2, exact via vertex pairs."""
    dA = h.A - g.A
    dmu = h.mu - g.mu
    cx = h.mu * h.x0 - g.mu * g.x0
    cy = h.mu * h.y0 - g.mu * g.y0
    dx, dy = g.dims
    best = 0.0
    for i in range(dx):
        ex = np.zeros(dx)
        ex[i] = 1.0
        for j in range(dy):
            ey = np.zeros(dy)
            ey[j] = 1.0
            px = dA @ ey + dmu * ex - cx
            py = -dA.T @ ex + dmu * ey - cy
            best = max(best, float(px @ px + py @ py))
    return best


def variation_report(seq: GameSequence, tol: float = 1e-6,
                     certificates=None, with_ne: bool = True) -> VariationReport:
    """Compute the variation measures that drive the convergence bounds.

    certificates, when given, replace the oracle's equilibrium sequence in
    the (v_ne, eps_sum) pair; any valid certificate family upper-bounds the
    favorable variation measure.
    """
    rep = VariationReport()
    if seq.kind in ("zero-sum", "identical-interest"):
        mats = _matrix_rounds(seq)
        rep.v_a = float(sum(spectral_norm(mats[t + 1] - mats[t]) ** 2
                            for t in range(seq.T - 1)))
        mean = np.mean(mats, axis=0)
        rep.w_a = float(sum(spectral_norm(A - mean) for A in mats))
        if seq.kind == "identical-interest":
            rep.v_phi = float(sum(np.max(mats[t] - mats[t + 1])
                                  for t in range(seq.T - 1)))
        if seq.kind == "zero-sum" and (with_ne or certificates is not None):
            certs = certificates if certificates is not None \
                else oracle_certificates(seq, tol)
            rep.v_ne, rep.eps_sum = certificate_variation(certs)
            rep.certificates = certs
    elif seq.kind == "polymatrix":
        v_a = 0.0
        for t in range(1, seq.T):
            g0, g1 = seq.game_at(t), seq.game_at(t + 1)
            v_a += sum(spectral_norm(g1.edge_matrices[k] - g0.edge_matrices[k]) ** 2
                       for k in g0.edge_matrices)
        rep.v_a = float(v_a)
        if with_ne or certificates is not None:
            certs = certificates if certificates is not None \
                else oracle_certificates(seq, tol)
            rep.v_ne, rep.eps_sum = certificate_variation(certs)
            rep.certificates = certs
    elif seq.kind == "saddle":
        m = seq.block_length or 1
        heads = [seq.game_at((h - 1) * m + 1) for h in range(1, seq.T // m + 1)]
        rep.v_grad_f = float(sum(_saddle_grad_drift(heads[h], heads[h + 1])
                                 for h in range(len(heads) - 1)))
        if with_ne or certificates is not None:
            if certificates is not None:
                block_certs = certificates[::m] if len(certificates) == seq.T \
                    else list(certificates)
            else:
                block_certs = []
                warm = None
                for g in heads:
                    c = ne_oracle_saddle(g, warm_start=warm)
                    block_certs.append(c)
                    warm = c.profile
            pts = np.array([c.joint() for c in block_certs])
            diffs = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            rep.s_ne = float(np.sum(diffs ** 2))
            rep.v_ne = float(np.sum(diffs))
            rep.eps_sum = float(sum(c.eps for c in block_certs))
            rep.certificates = block_certs
    else:
        raise ValueError(f"no variation measures for kind {seq.kind!r}")
    if seq.block_length and seq.kind == "zero-sum" and rep.certificates:
        m = seq.block_length
        pts = np.array([rep.certificates[(h - 1) * m].joint()
                        for h in range(1, seq.T // m + 1)])
        rep.s_ne = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1) ** 2))
    return rep


# ---------------------------------------------------------------------------
# Theorem checkers
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    """Signed margin of one theorem inequality on one run.

    margin >= -1e-9 is the contract whenever applicable is True; when the
    run's learning rate violates the theorem's hypothesis the margin is still
    reported but carries no guarantee.
    """

    name: str
    margin: float
    applicable: bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (not self.applicable) or self.margin >= -MARGIN_TOL

    def to_json(self):
        return {"name": self.name, "margin": self.margin,
                "applicable": self.applicable, "ok": self.ok,
                "details": {k: v for k, v in self.details.items()
                            if isinstance(v, (int, float, str, bool))}}


def _euclidean_players(trace: Trace):
    return [p for p in range(trace.n_players)
            if trace.learner_kinds[p] in ("ogd", "gd")]


def trace_constants(trace: Trace) -> dict:
    n = trace.n_players
    return {
        "n": n,
        "D_Z": float(np.sqrt(2.0 * n)),
        "norm_Z": float(np.sqrt(float(n))),
        "L": sequence_smoothness(trace.sequence()),
    }


def check_rvu_dynamic(trace: Trace, player: int, comparators,
                      regularizer: str = "euclidean") -> CheckResult:
    """Dynamic RVU bound: regret vs comparators <= stability + variation
    terms minus the movement dissipation. Holds for any step size."""
    if regularizer != "euclidean":
        raise ValueError("the dynamic RVU bound needs a smooth regularizer; "
                         "the negative-entropy prox is outside its hypotheses")
    comp = np.asarray(comparators, dtype=float)
    eta = trace.etas[player]
    D = SIMPLEX_DIAMETER
    comp_var = float(np.sum(np.linalg.norm(np.diff(comp, axis=0), axis=1)))
    pred_err = float(np.sum((trace.u[player] - trace.m[player]) ** 2))
    dissip = float(np.sum((trace.x[player] - trace.x_hat[player]) ** 2)
                   + np.sum((trace.x[player] - trace.x_hat_next[player]) ** 2))
    rhs = D * D / (2 * eta) + (D / eta) * comp_var + eta * pred_err - dissip / (2 * eta)
    dreg = dynamic_regret(trace, player, comp)
    applicable = trace.learner_kinds[player] in ("ogd", "gd")
    return CheckResult("rvu_dynamic", float(rhs - dreg), applicable,
                       {"player": player, "rhs": float(rhs), "dreg": dreg})


def check_nonnegative_dreg(trace: Trace, certificates) -> CheckResult:
    """Sum of dynamic regrets under (approximate-)equilibrium comparators
    cannot drop below -(players sharing the loss) * total certificate slack."""
    mult = trace.n_players if trace.kind == "polymatrix" else 2
    eps_sum = float(sum(c.eps for c in certificates))
    total = 0.0
    for p in range(trace.n_players):
        comp = np.array([certificates[t].profile[p] for t in range(trace.T)])
        total += dynamic_regret(trace, p, comp)
    return CheckResult("nonnegative_dreg", float(total + mult * eps_sum), True,
                       {"dreg_sum": total, "eps_sum": eps_sum, "mult": mult})


def check_pathlength_theorem(trace: Trace, report: VariationReport) -> CheckResult:
    """Second-order path length against the variation-parameterized bound.

    Requires eta <= 1/(4L). The improved (current-game) prediction removes the
    matrix-variation terms. The certificate weight is the minimal admissible
    C = mult * eta / D_Z.
    """
    if trace.kind not in ("zero-sum", "polymatrix"):
        raise ValueError("path-length theorem applies to zero-sum or polymatrix runs")
    c = trace_constants(trace)
    eta = trace.etas[0]
    mult = trace.n_players if trace.kind == "polymatrix" else 2
    improved = all(mode == "current_game" for mode in trace.prediction_modes)
    v_ne = report.v_ne if report.v_ne is not None else 0.0
    eps_sum = report.eps_sum if report.eps_sum is not None else 0.0
    v_eps_ne = v_ne + (mult * eta / c["D_Z"]) * eps_sum
    rhs = 2 * c["D_Z"] ** 2 + 4 * c["D_Z"] * v_eps_ne
    if not improved:
        rhs += 4 * eta ** 2 * c["L"] ** 2 * c["norm_Z"] ** 2
        rhs += 8 * eta ** 2 * c["norm_Z"] ** 2 * (report.v_a or 0.0)
    _, second = path_lengths(trace)
    standard = all(mode == "last_utility" for mode in trace.prediction_modes)
    applicable = (eta <= 1.0 / (4.0 * c["L"]) * (1 + 1e-12)
                  and len(set(map(float, trace.etas))) == 1
                  and all(k == "ogd" for k in trace.learner_kinds)
                  and (standard or improved))
    return CheckResult("pathlength", float(rhs - second), applicable,
                       {"rhs": float(rhs), "path2": second, "eta": eta,
                        "L": c["L"], "improved_prediction": improved})


def check_gap_sum_theorem(trace: Trace, report: VariationReport) -> CheckResult:
    """Cumulative squared equilibrium gap against the headline bound.

    Composes the per-round best-response bound with the path-length theorem:
    sum gap^2 <= 2 (D_Z/eta + L ||Z||)^2 * (path-length RHS). At the
    prescribed eta = 1/(4L) the leading constant is the familiar
    2 L^2 (4 D_Z + ||Z||)^2.
    """
    inner = check_pathlength_theorem(trace, report)
    c = trace_constants(trace)
    eta = trace.etas[0]
    const = 2.0 * (c["D_Z"] / eta + c["L"] * c["norm_Z"]) ** 2
    rhs = const * inner.details["rhs"]
    gap_sq = float(np.sum(trace_eq_gaps(trace) ** 2))
    return CheckResult("gap_sum", float(rhs - gap_sq), inner.applicable,
                       {"rhs": float(rhs), "gap_sq": gap_sq,
                        "pathlength_rhs": inner.details["rhs"]})


def check_strong_individual_regret(trace: Trace, report: VariationReport,
                                   mu: float, m: int) -> CheckResult:
    """Per-player external regret bound in the strongly convex-concave
    repeated-game regime (same hypotheses as the strong path-length bound)."""
    c = trace_constants(trace)
    eta = trace.etas[0]
    L, D = c["L"], c["D_Z"]
    u1 = np.concatenate([trace.u[p][0] for p in range(trace.n_players)])
    f1 = float(u1 @ u1)
    s_ne = report.s_ne or 0.0
    v_grad = report.v_grad_f or 0.0
    bound = (D ** 2 / eta + 16 * eta * L ** 2 * D ** 2
             + (32 * eta ** 3 * L ** 2 + eta) * f1
             + 32 * eta * L ** 2 * s_ne
             + (64 * eta ** 3 * L ** 2 + 2 * eta) * v_grad)
    worst = min(bound - external_regret(trace, p)
                for p in range(trace.n_players))
    strong = check_strong_pathlength(trace, report, mu, m)
    return CheckResult("strong_individual_regret", float(worst),
                       strong.applicable, {"bound": float(bound)})


def check_strong_regret_lower(trace: Trace, ne: NECertificate, mu: float,
                              rounds=None) -> CheckResult:
    """Strong nonnegativity: regrets vs an equilibrium dominate (mu/2) times
    the squared distance sum; certificate slack enters as 2*eps per round."""
    lo, hi = (1, trace.T) if rounds is None else rounds
    idx = slice(lo - 1, hi)
    nrounds = hi - lo + 1
    reg = 0.0
    dist2 = np.zeros(nrounds)
    for p in range(trace.n_players):
        comp = np.tile(ne.profile[p], (nrounds, 1))
        reg += float(np.sum(comp * trace.u[p][idx])
                     - np.sum(trace.x[p][idx] * trace.u[p][idx]))
        dist2 += np.sum((trace.x[p][idx] - ne.profile[p]) ** 2, axis=1)
    lower = 0.5 * mu * float(np.sum(dist2))
    slack = 2.0 * ne.eps * nrounds
    return CheckResult("strong_regret_lower", float(reg + slack - lower), True,
                       {"reg_sum": reg, "lower": lower, "eps": ne.eps})


def check_potential_pathlength(trace: Trace) -> CheckResult:
    """Potential increase dominates the squared movement of plain gradient
    descent; the descent constant needs eta <= 1/L."""
    if trace.kind != "identical-interest":
        raise ValueError("potential path-length check needs identical-interest runs")
    seq = trace.sequence()
    eta = trace.etas[0]
    dphi = 0.0
    move2 = 0.0
    phimax = 0.0
    vphi = 0.0
    prev_A = None
    for t in range(1, trace.T + 1):
        A = seq.game_at(t).A
        x0, y0 = trace.x[0][t - 1], trace.x[1][t - 1]
        x1, y1 = trace.x_hat_next[0][t - 1], trace.x_hat_next[1][t - 1]
        dphi += float(x1 @ A @ y1 - x0 @ A @ y0)
        move2 += float(np.sum((x1 - x0) ** 2) + np.sum((y1 - y0) ** 2))
        phimax = max(phimax, float(np.max(np.abs(A))))
        if prev_A is not None:
            vphi += float(np.max(prev_A - A))
        prev_A = A
    margin = dphi - move2 / (2 * eta)
    c = trace_constants(trace)
    applicable = (eta <= 1.0 / c["L"] * (1 + 1e-12)
                  and all(k == "gd" for k in trace.learner_kinds)
                  and all(m == "zero" for m in trace.prediction_modes))
    telescope_margin = 2 * phimax + vphi - dphi
    return CheckResult("potential_pathlength", float(margin), applicable,
                       {"dphi": dphi, "move2": move2, "phi_max": phimax,
                        "v_phi": vphi, "telescope_margin": float(telescope_margin)})


def check_br_gap_bound(trace: Trace) -> CheckResult:
    """Per-round best-response gap bound from the prox optimality conditions:
    BR <= (D/eta)||xhat+ - xhat|| + ||u|| ||x - xhat+||. Minimum margin over
    all rounds and Euclidean players is reported."""
    worst = np.inf
    D = SIMPLEX_DIAMETER
    players = _euclidean_players(trace)
    for p in players:
        eta = trace.etas[p]
        br = np.max(trace.u[p], axis=1) - np.sum(trace.x[p] * trace.u[p], axis=1)
        hat_move = np.linalg.norm(trace.x_hat_next[p] - trace.x_hat[p], axis=1)
        lead = np.linalg.norm(trace.x[p] - trace.x_hat_next[p], axis=1)
        unorm = np.linalg.norm(trace.u[p], axis=1)
        bound = (D / eta) * hat_move + unorm * lead
        worst = min(worst, float(np.min(bound - br)))
    if not np.isfinite(worst):
        worst = 0.0
    return CheckResult("br_gap_bound", worst, bool(players), {})


def check_stability(trace: Trace) -> CheckResult:
    """Iterate stability ||x(t+1) - x(t)|| <= 3 * eta * L with L measured as
    the largest utility/prediction norm seen in the run."""
    worst = np.inf
    players = _euclidean_players(trace)
    for p in players:
        eta = trace.etas[p]
        L_run = max(float(np.max(np.linalg.norm(trace.u[p], axis=1))),
                    float(np.max(np.linalg.norm(trace.m[p], axis=1))))
        moves = np.linalg.norm(np.diff(trace.x[p], axis=0), axis=1)
        if moves.size:
            worst = min(worst, float(np.min(3 * eta * L_run - moves)))
    if not np.isfinite(worst):
        worst = 0.0
    return CheckResult("stability", worst, bool(players), {})


def check_individual_regret_bound(trace: Trace, report: VariationReport) -> CheckResult:
    """Variation-dependent per-player external regret bound (two-player)."""
    if trace.kind != "zero-sum":
        raise ValueError("individual regret bound is stated for two-player runs")
    c = trace_constants(trace)
    eta = trace.etas[0]
    L, D, nz = c["L"], c["D_Z"], c["norm_Z"]
    v_ne = (report.v_ne or 0.0) + (2 * eta / D) * (report.eps_sum or 0.0)
    v_a = report.v_a or 0.0
    worst = np.inf
    details = {}
    for p in range(2):
        other_norm = SIMPLEX_NORM
        bound = (SIMPLEX_DIAMETER ** 2 / eta + 8 * eta * L ** 2 * D ** 2
                 + eta * L ** 2 * other_norm ** 2 + 16 * eta ** 3 * L ** 4 * nz ** 2
                 + 16 * eta * L ** 2 * D * v_ne
                 + (2 * eta * other_norm ** 2 + 32 * eta ** 3 * L ** 2 * nz ** 2) * v_a)
        reg = external_regret(trace, p)
        details[f"reg_{p}"] = reg
        details[f"bound_{p}"] = float(bound)
        worst = min(worst, float(bound - reg))
    applicable = (eta <= 1.0 / (4.0 * L) * (1 + 1e-12)
                  and all(k == "ogd" for k in trace.learner_kinds)
                  and all(m == "last_utility" for m in trace.prediction_modes))
    return CheckResult("individual_regret", worst, applicable, details)


def check_strong_pathlength(trace: Trace, report: VariationReport,
                            mu: float, m: int) -> CheckResult:
    """Second-order path length bound under strong convexity-concavity with
    each game repeated m times; needs eta <= min(1/(8L), 1/(2 mu)) and
    m >= 2/(eta * mu)."""
    c = trace_constants(trace)
    eta = trace.etas[0]
    u1 = np.concatenate([trace.u[p][0] for p in range(trace.n_players)])
    rhs = (4 * c["D_Z"] ** 2 + 8 * eta ** 2 * float(u1 @ u1)
           + 8 * (report.s_ne or 0.0) + 16 * eta ** 2 * (report.v_grad_f or 0.0))
    _, second = path_lengths(trace)
    applicable = (trace.kind == "saddle" and mu > 0
                  and eta <= min(1 / (8 * c["L"]), 1 / (2 * mu)) * (1 + 1e-12)
                  and m >= 2.0 / (eta * mu)
                  and all(k == "ogd" for k in trace.learner_kinds))
    return CheckResult("strong_pathlength", float(rhs - second), applicable,
                       {"rhs": float(rhs), "path2": second, "m": m, "mu": mu})


def check_k_switch_bound(trace: Trace, K: int) -> CheckResult:
    """Sum over players of K-switch dynamic regret against the explicit
    smooth-game bound; needs a common eta <= 1/(2 L sqrt(n))."""
    c = trace_constants(trace)
    eta = trace.etas[0]
    n = trace.n_players
    total = sum(k_switch_dreg(trace, p, K) for p in range(n))
    u1sq = sum(float(trace.u[p][0] @ trace.u[p][0]) for p in range(n))
    rhs = (2 * K - 1) / (2 * eta) * (SIMPLEX_DIAMETER ** 2 * n) + eta * u1sq
    applicable = (eta <= 1.0 / (2.0 * c["L"] * np.sqrt(n)) * (1 + 1e-12)
                  and len(set(map(float, trace.etas))) == 1
                  and all(k == "ogd" for k in trace.learner_kinds)
                  and all(mode == "last_utility" for mode in trace.prediction_modes))
    return CheckResult("k_switch_bound", float(rhs - total), applicable,
                       {"K": K, "kdreg_sum": total, "rhs": float(rhs)})


def iterations_to_eps(trace: Trace, eps: float) -> list:
    """Per-block first within-block round whose equilibrium gap is <= eps,
    or m+1 when the block never reaches it."""
    m = trace.sequence().block_length
    if m is None:
        raise ValueError("trace has no meta-learning block structure")
    gaps = trace_eq_gaps(trace)
    counts = []
    for h in range(trace.T // m):
        block = gaps[h * m:(h + 1) * m]
        hit = np.nonzero(block <= eps)[0]
        counts.append(int(hit[0]) + 1 if hit.size else m + 1)
    return counts


def standard_checks(trace: Trace, report: VariationReport | None = None,
                    cert_tol: float = 1e-3) -> list:
    """The checker battery appropriate to the trace's kind."""
    results = []
    if trace.kind in ("zero-sum", "polymatrix"):
        if report is None:
            report = variation_report(trace.sequence(), cert_tol)
        certs = report.certificates or oracle_certificates(trace.sequence(), cert_tol)
        for p in _euclidean_players(trace):
            comp = np.array([certs[t].profile[p] for t in range(trace.T)])
            results.append(check_rvu_dynamic(trace, p, comp))
        results.append(check_nonnegative_dreg(trace, certs))
        results.append(check_pathlength_theorem(trace, report))
        results.append(check_gap_sum_theorem(trace, report))
        if trace.kind == "zero-sum":
            results.append(check_individual_regret_bound(trace, report))
    elif trace.kind == "identical-interest":
        results.append(check_potential_pathlength(trace))
    elif trace.kind == "saddle":
        seq = trace.sequence()
        if report is None:
            report = variation_report(seq)
        m = seq.block_length or trace.T
        mu = seq.game_at(1).mu
        certs = report.certificates
        results.append(check_strong_pathlength(trace, report, mu, m))
        results.append(check_strong_individual_regret(trace, report, mu, m))
        full = [certs[(t - 1) // m] for t in range(1, trace.T + 1)]
        results.append(check_nonnegative_dreg(trace, full))
        for h in range(trace.T // m):
            results.append(check_strong_regret_lower(
                trace, certs[h], mu, rounds=(h * m + 1, (h + 1) * m)))
        for p in _euclidean_players(trace):
            comp = np.array([full[t - 1].profile[p] for t in range(1, trace.T + 1)])
            results.append(check_rvu_dynamic(trace, p, comp))
    if trace.learner_kinds[0] != "avg-two-point":
        results.append(check_br_gap_bound(trace))
        results.append(check_stability(trace))
    return results
