"""Online learners and the round-by-round driver producing Traces.

The primary update rule is optimistic gradient descent over the simplex:

    x(t)      = proj( xhat(t) + eta * m(t) )
    xhat(t+1) = proj( xhat(t) + eta * u(t) )

with prediction m(t) = u(t-1) (standard), m(t) = 0 (plain gradient descent),
or m(t) built from the round-t game and the opponents' previous strategies
(the improved prediction available when the sequence is known in advance).
Multiplicative weights is the same scheme under the negative-entropy prox.
All players move simultaneously from the same round-t snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .games import (GameSequence, MatrixGame, NormalFormGame, PolymatrixGame,
                    QuadraticSaddle, constant_sequence, sequence_from_descriptor)
from .geometry import REGULARIZERS, project_simplex, spectral_norm, uniform_point

PREDICTION_MODES = ("zero", "last_utility", "current_game")


@dataclass(frozen=True)
class LearnerState:
    """One online learner's state: primary iterate, secondary iterate,
    prediction vector, and step size."""

    x: np.ndarray
    x_hat: np.ndarray
    m: np.ndarray
    eta: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not np.all(np.isfinite(self.m)):
            raise ValueError("prediction vector must be finite")


def initial_state(d: int, eta: float) -> LearnerState:
    """xhat(1) = argmin ||.||^2 over the simplex = uniform; m(1) = 0."""
    u = uniform_point(d)
    return LearnerState(x=u, x_hat=u, m=np.zeros(d), eta=eta)


def ogd_propose(state: LearnerState) -> np.ndarray:
    """x = proj(xhat + eta * m); does not mutate the state."""
    return project_simplex(state.x_hat + state.eta * state.m)


def ogd_update(state: LearnerState, u, next_m) -> LearnerState:
    """Secondary step xhat' = proj(xhat + eta*u), then propose with next_m."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("utility vector must be finite")
    x_hat = project_simplex(state.x_hat + state.eta * u)
    m = np.asarray(next_m, dtype=float)
    x = project_simplex(x_hat + state.eta * m)
    return LearnerState(x=x, x_hat=x_hat, m=m, eta=state.eta)


def mwu_update(x, u, eta: float) -> np.ndarray:
    """x'_a proportional to x_a * exp(eta * u_a); shift-guarded."""
    return REGULARIZERS["negative-entropy"].prox_step(x, u, eta)


@dataclass(frozen=True)
class LearnerSpec:
    """Which learner a player runs. kind in {ogd, gd, mwu}; eta=None means
    the step size is tuned from the sequence (1/(4L) in the bilinear case)."""

    kind: str = "ogd"
    eta: float | None = None
    prediction: str | None = None

    def resolved_prediction(self) -> str:
        if self.prediction is not None:
            if self.prediction not in PREDICTION_MODES:
                raise ValueError(f"unknown prediction mode {self.prediction!r}")
            return self.prediction
        return "last_utility" if self.kind == "ogd" else "zero"

    def regularizer(self) -> str:
        if self.kind in ("ogd", "gd"):
            return "euclidean"
        if self.kind == "mwu":
            return "negative-entropy"
        raise ValueError(f"unknown learner kind {self.kind!r}")


@dataclass
class Trace:
    """Full per-round record of a run, from which all metrics are computed.

    Per player p: x[p][t-1], x_hat[p][t-1], x_hat_next[p][t-1], u[p][t-1],
    m[p][t-1] are the round-t quantities; x_hat_next of round t equals x_hat
    of round t+1 for the same player.
    """

    kind: str
    T: int
    descriptor: dict
    etas: list
    learner_kinds: list
    prediction_modes: list
    x: list
    x_hat: list
    x_hat_next: list
    u: list
    m: list
    game_index: np.ndarray
    seq: GameSequence | None = None
    aux: dict = field(default_factory=dict)

    @property
    def n_players(self) -> int:
        return len(self.x)

    def dims(self):
        return [xi.shape[1] for xi in self.x]

    def joint(self, arrays) -> np.ndarray:
        """Stack per-player round arrays into (T, sum d_i)."""
        return np.concatenate(arrays, axis=1)

    def sequence(self) -> GameSequence:
        if self.seq is None:
            self.seq = sequence_from_descriptor(self.descriptor)
        return self.seq

    def validate(self, tol: float = 1e-12):
        for p in range(self.n_players):
            if not np.allclose(self.x_hat_next[p][:-1], self.x_hat[p][1:],
                               rtol=0, atol=tol):
                raise ValueError(f"trace chain broken for player {p}")

    def to_envelope(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind,
            "T": self.T,
            "descriptor": self.descriptor,
            "etas": list(map(float, self.etas)),
            "learner_kinds": list(self.learner_kinds),
            "prediction_modes": list(self.prediction_modes),
            "game_index": self.game_index.tolist(),
            "players": [
                {"x": self.x[p].tolist(), "x_hat": self.x_hat[p].tolist(),
                 "x_hat_next": self.x_hat_next[p].tolist(),
                 "u": self.u[p].tolist(), "m": self.m[p].tolist()}
                for p in range(self.n_players)
            ],
            "aux": {k: np.asarray(v).tolist() for k, v in self.aux.items()},
        }

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_envelope(), f)

    @classmethod
    def from_envelope(cls, d: dict) -> "Trace":
        players = d["players"]
        return cls(
            kind=d["kind"], T=d["T"], descriptor=d["descriptor"],
            etas=d["etas"], learner_kinds=d["learner_kinds"],
            prediction_modes=d["prediction_modes"],
            x=[np.array(p["x"]) for p in players],
            x_hat=[np.array(p["x_hat"]) for p in players],
            x_hat_next=[np.array(p["x_hat_next"]) for p in players],
            u=[np.array(p["u"]) for p in players],
            m=[np.array(p["m"]) for p in players],
            game_index=np.array(d["game_index"], dtype=int),
            aux={k: np.array(v) for k, v in d["aux"].items()},
        )

    @classmethod
    def load(cls, path) -> "Trace":
        with open(path) as f:
            return cls.from_envelope(json.load(f))


# ---------------------------------------------------------------------------
# Sequence-level constants and utilities
# ---------------------------------------------------------------------------

def sequence_smoothness(seq: GameSequence) -> float:
    """Upper bound on L = max_t (operator norm of the round-t gradient map).

    Exact for constant/alternating/meta sequences; for drifting sequences a
    cheap safe bound ||A0|| + max|c_t| * ||P|| is used so that eta = 1/(4L)
    never exceeds the theorem-prescribed rate.
    """
    desc = seq.descriptor
    gen = desc["generator"]
    p = desc.get("params", {})
    if gen in ("drift_powerlaw", "drift_linear"):
        A0 = np.array(p["A0"])
        P = np.array(p["P"])
        if gen == "drift_powerlaw":
            incr = np.arange(1, seq.T + 1, dtype=float) ** (-p["alpha"])
            c = np.cumsum(incr)
            if p["base_index"] == "one":
                c -= incr[0]
            cmax = float(np.max(np.abs(c)))
        else:
            cmax = abs(p["eps"]) * seq.T
        return spectral_norm(A0) + cmax * spectral_norm(P)
    if gen == "alternating":
        return max(spectral_norm(seq.game_at(1).A), spectral_norm(seq.game_at(2).A))
    if gen == "metalearning":
        m = p["m"]
        heads = [seq.game_at(h * m + 1) for h in range(seq.T // m)]
        if seq.kind == "saddle":
            return max(np.hypot(g.mu, spectral_norm(g.A)) for g in heads)
        return max(spectral_norm(g.A) for g in heads)
    if gen == "constant":
        g = seq.game_at(1)
        if isinstance(g, QuadraticSaddle):
            return float(np.hypot(g.mu, spectral_norm(g.A)))
        if isinstance(g, PolymatrixGame):
            return spectral_norm(g.block_matrix())
        if isinstance(g, MatrixGame):
            return spectral_norm(g.A)
        raise ValueError("no smoothness constant for explicit normal-form games")
    if gen == "polymatrix":
        first = spectral_norm(seq.game_at(1).block_matrix())
        last = spectral_norm(seq.game_at(seq.T).block_matrix())
        # linear drift: norm along the segment is bounded by the endpoint max
        return max(first, last)
    raise ValueError(f"unknown generator {gen!r}")


def tuned_eta(seq: GameSequence) -> float:
    """Theorem-prescribed step: 1/(4L), or min(1/(8L), 1/(2 mu)) for saddles.

    L is inflated by 1e-8 relative so that the power-iteration estimate (which
    approaches the true norm from below) never pushes eta above the rate the
    theorems assume.
    """
    L = sequence_smoothness(seq) * (1.0 + 1e-8)
    if seq.kind == "saddle":
        mu = seq.game_at(1).mu
        if mu > 0:
            return min(1.0 / (8.0 * L), 1.0 / (2.0 * mu))
        return 1.0 / (8.0 * L)
    return 1.0 / (4.0 * L)


def round_utilities(game, kind: str, xs):
    """Per-player utility vectors at the joint profile xs."""
    if kind == "zero-sum":
        ux, uy = game.utilities(xs[0], xs[1])
        return [ux, uy]
    if kind == "identical-interest":
        return [game.A @ xs[1], game.A.T @ xs[0]]
    if kind == "saddle":
        ux, uy = game.utilities(xs[0], xs[1])
        return [ux, uy]
    if kind == "polymatrix":
        return [game.utility_vector(i, xs) for i in range(game.n)]
    if kind == "normal-form":
        return [game.expected_utility_gradient(i, xs) for i in range(game.n)]
    raise ValueError(f"unknown kind {kind!r}")


def _player_dims(game, kind: str):
    if kind in ("zero-sum", "identical-interest", "saddle"):
        return list(game.dims)
    if kind == "polymatrix":
        return list(game.dims)
    if kind == "normal-form":
        return list(game.action_counts)
    raise ValueError(f"unknown kind {kind!r}")


def run_dynamics(seq: GameSequence, learners, T: int | None = None) -> Trace:
    """Drive the learners through the sequence and record everything.

    learners: one LearnerSpec (or kind string) per player; two for matrix /
    saddle kinds, n for polymatrix / normal-form. Utilities are evaluated at
    the simultaneous round-t proposals; with the current_game prediction the
    round-t game is exposed to the learner before play.
    """
    T = seq.T if T is None else T
    if T > seq.T:
        raise ValueError(f"T={T} exceeds sequence length {seq.T}")
    specs = [LearnerSpec(kind=s) if isinstance(s, str) else s for s in learners]
    first = seq.game_at(1)
    dims = _player_dims(first, seq.kind)
    if len(specs) != len(dims):
        raise ValueError(f"{len(specs)} learners for {len(dims)} players")

    auto = tuned_eta(seq) if any(s.eta is None for s in specs) else None
    etas = [s.eta if s.eta is not None else auto for s in specs]
    modes = [s.resolved_prediction() for s in specs]
    regs = [REGULARIZERS[s.regularizer()] for s in specs]

    n = len(specs)
    xs_hat = [uniform_point(d) for d in dims]
    prev_x = [h.copy() for h in xs_hat]    # z(0) := zhat(1) for current_game
    prev_u = [np.zeros(d) for d in dims]

    rec = {key: [np.empty((T, d)) for d in dims]
           for key in ("x", "x_hat", "x_hat_next", "u", "m")}

    for t in range(1, T + 1):
        game = seq.game_at(t)
        # Predictions for this round.
        lookahead = (round_utilities(game, seq.kind, prev_x)
                     if any(mode == "current_game" for mode in modes) else None)
        ms = []
        for p in range(n):
            if modes[p] == "zero":
                ms.append(np.zeros(dims[p]))
            elif modes[p] == "last_utility":
                ms.append(np.zeros(dims[p]) if t == 1 else prev_u[p])
            else:  # current_game
                ms.append(lookahead[p])
        # Simultaneous proposals.
        xs = [regs[p].prox_step(xs_hat[p], ms[p], etas[p]) for p in range(n)]
        us = round_utilities(game, seq.kind, xs)
        # Secondary step.
        new_hats = [regs[p].prox_step(xs_hat[p], us[p], etas[p]) for p in range(n)]
        for p in range(n):
            rec["x"][p][t - 1] = xs[p]
            rec["x_hat"][p][t - 1] = xs_hat[p]
            rec["x_hat_next"][p][t - 1] = new_hats[p]
            rec["u"][p][t - 1] = us[p]
            rec["m"][p][t - 1] = ms[p]
        xs_hat = new_hats
        prev_x = xs
        prev_u = us

    return Trace(kind=seq.kind, T=T, descriptor=seq.to_json(), etas=etas,
                 learner_kinds=[s.kind for s in specs], prediction_modes=modes,
                 x=rec["x"], x_hat=rec["x_hat"], x_hat_next=rec["x_hat_next"],
                 u=rec["u"], m=rec["m"],
                 game_index=np.arange(1, T + 1), seq=seq)


def run_averaged_two_point(game: MatrixGame, eta: float | None, T: int,
                           start=None) -> Trace:
    """Two-point play in a static matrix game.

    An inner optimistic update runs on utilities observed at its own iterates
    (the auxiliary strategies); the strategy actually played each round is the
    running time-average of the inner iterates. The trace's primary record is
    the played (averaged) strategies and the utilities they received, which is
    where dynamic regret is measured; the auxiliary strategies sit in aux.

    start optionally overrides the uniform initialization of the inner
    iterates; games whose equilibrium is exactly uniform (matching pennies)
    are otherwise frozen at it from round one.
    """
    seq = constant_sequence(game, T)
    if eta is None:
        eta = tuned_eta(seq)
    dx, dy = game.dims
    if start is None:
        states = [initial_state(dx, eta), initial_state(dy, eta)]
    else:
        states = [LearnerState(x=project_simplex(np.asarray(s, float)),
                               x_hat=project_simplex(np.asarray(s, float)),
                               m=np.zeros(d), eta=eta)
                  for s, d in zip(start, (dx, dy))]
    sums = [np.zeros(dx), np.zeros(dy)]

    x = [np.empty((T, dx)), np.empty((T, dy))]
    u = [np.empty((T, dx)), np.empty((T, dy))]
    hat = [np.empty((T, dx)), np.empty((T, dy))]
    hat_next = [np.empty((T, dx)), np.empty((T, dy))]
    inner_x = [np.empty((T, dx)), np.empty((T, dy))]
    inner_u = [np.empty((T, dx)), np.empty((T, dy))]

    for t in range(1, T + 1):
        cur = [states[0].x, states[1].x]
        for p in range(2):
            sums[p] += cur[p]
        played = [sums[0] / t, sums[1] / t]
        u_played = game.utilities(played[0], played[1])
        u_inner = game.utilities(cur[0], cur[1])
        for p in range(2):
            x[p][t - 1] = played[p]
            u[p][t - 1] = u_played[p]
            hat[p][t - 1] = states[p].x_hat
            inner_x[p][t - 1] = cur[p]
            inner_u[p][t - 1] = u_inner[p]
        states = [ogd_update(states[p], u_inner[p], u_inner[p]) for p in range(2)]
        for p in range(2):
            hat_next[p][t - 1] = states[p].x_hat

    zeros = [np.zeros((T, dx)), np.zeros((T, dy))]
    return Trace(kind="zero-sum", T=T, descriptor=seq.to_json(),
                 etas=[eta, eta], learner_kinds=["avg-two-point"] * 2,
                 prediction_modes=["last_utility"] * 2,
                 x=x, x_hat=hat, x_hat_next=hat_next, u=u, m=zeros,
                 game_index=np.arange(1, T + 1), seq=seq,
                 aux={"inner_x_0": inner_x[0], "inner_x_1": inner_x[1],
                      "inner_u_0": inner_u[0], "inner_u_1": inner_u[1]})
