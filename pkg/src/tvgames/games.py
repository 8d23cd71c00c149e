"""Game representations and time-varying sequence generators.

Covers bilinear (matrix) games, identical-interest reinterpretations,
polymatrix zero-sum games, quadratic (strongly convex-concave) saddles, and
explicit normal-form games, plus the drift/alternating/meta-learning sequence
constructions used by the experiments. Sequences are deterministic given
(seed, parameters) and evaluate lazily in O(dx*dy) memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import check_simplex

ANTISYM_TOL = 1e-12

# ---------------------------------------------------------------------------
# Counter-based PRNG (splitmix64 stream) so sweep cells never share state.
# ---------------------------------------------------------------------------

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x &= _MASK
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK
    return x ^ (x >> 31)


def rand_uniform(seed: int, n: int, counter: int = 0) -> np.ndarray:
    """n doubles in [0, 1) from the splitmix64 stream at (seed, counter)."""
    out = np.empty(n)
    base = (seed + counter * _GOLDEN) & _MASK
    for i in range(n):
        base = (base + _GOLDEN) & _MASK
        out[i] = (_splitmix64(base) >> 11) * 2.0 ** -53
    return out


def rand_matrix(seed: int, rows: int, cols: int, counter: int = 0,
                lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """rows x cols matrix with i.i.d. uniform entries on [lo, hi]."""
    u = rand_uniform(seed, rows * cols, counter)
    return (lo + (hi - lo) * u).reshape(rows, cols)


def rand_simplex_point(seed: int, d: int, counter: int = 0) -> np.ndarray:
    """Flat-Dirichlet point on the simplex from the same counter stream."""
    u = rand_uniform(seed, d, counter)
    e = -np.log(1.0 - u)
    return e / np.sum(e)


def derive_seed(base_seed: int, index: int) -> int:
    """Independent child seed for sweep cell / run #index."""
    return _splitmix64((base_seed + (index + 1) * _GOLDEN) & _MASK)


# ---------------------------------------------------------------------------
# Game kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixGame:
    """Bilinear saddle game on a payoff matrix A (dx x dy).

    Player x receives the utility vector -A y, Player y receives A^T x.
    """

    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or not np.all(np.isfinite(A)):
            raise ValueError("payoff matrix must be a finite 2-d array")
        object.__setattr__(self, "A", A)

    @property
    def dims(self):
        return self.A.shape

    def utilities(self, x, y):
        return -self.A @ y, self.A.T @ x


@dataclass(frozen=True)
class NormalFormGame:
    """n-player normal-form game: one utility tensor per player.

    utilities[i] has shape action_counts; entry [a_1, ..., a_n] is player i's
    payoff at that joint pure profile.
    """

    utilities: tuple

    def __post_init__(self):
        tensors = tuple(np.asarray(u, dtype=float) for u in self.utilities)
        if not tensors:
            raise ValueError("need at least one player")
        shape = tensors[0].shape
        for u in tensors:
            if u.shape != shape or not np.all(np.isfinite(u)):
                raise ValueError("utility tensors must share shape and be finite")
        if len(shape) != len(tensors):
            raise ValueError(f"{len(tensors)} players but {len(shape)}-way tensors")
        object.__setattr__(self, "utilities", tensors)

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def action_counts(self):
        return self.utilities[0].shape

    def expected_utility_gradient(self, i: int, profile) -> np.ndarray:
        """Gradient of player i's expected utility w.r.t. its own mixing.

        Contracts every axis except i with the corresponding mixed strategy,
        descending so axis numbers never shift under the contraction.
        """
        t = self.utilities[i]
        for j in range(self.n - 1, -1, -1):
            if j != i:
                t = np.tensordot(t, profile[j], axes=(j, 0))
        return t

    def expected_utility(self, i: int, profile) -> float:
        g = self.expected_utility_gradient(i, profile)
        return float(profile[i] @ g)


@dataclass(frozen=True)
class PolymatrixGame:
    """Zero-sum polymatrix game on an undirected graph.

    edge_matrices maps ordered pairs (i, j) with {i, j} an edge to A_{i,j} of
    shape d_i x d_j, satisfying A_{i,j}^T = -A_{j,i}. Player i's utility
    vector is sum over neighbors j of A_{i,j} x_j.
    """

    n: int
    edges: tuple
    edge_matrices: dict
    dims: tuple

    @staticmethod
    def create(n: int, edges, edge_matrices) -> "PolymatrixGame":
        edges = tuple(tuple(sorted(e)) for e in edges)
        mats = {}
        dims = [None] * n
        for (i, j) in edges:
            if not (0 <= i < n and 0 <= j < n and i != j):
                raise ValueError(f"bad edge ({i}, {j})")
            if (i, j) in edge_matrices:
                Aij = np.asarray(edge_matrices[(i, j)], dtype=float)
            elif (j, i) in edge_matrices:
                Aij = -np.asarray(edge_matrices[(j, i)], dtype=float).T
            else:
                raise ValueError(f"no matrix for edge ({i}, {j})")
            if (j, i) in edge_matrices:
                Aji = np.asarray(edge_matrices[(j, i)], dtype=float)
                if np.max(np.abs(Aij.T + Aji)) > ANTISYM_TOL:
                    raise ValueError(f"edge ({i},{j}) violates A_ij^T = -A_ji")
            mats[(i, j)] = Aij
            mats[(j, i)] = -Aij.T
            for node, d in ((i, Aij.shape[0]), (j, Aij.shape[1])):
                if dims[node] is None:
                    dims[node] = d
                elif dims[node] != d:
                    raise ValueError(f"inconsistent dimension at node {node}")
        for node in range(n):
            if dims[node] is None:
                raise ValueError(f"node {node} is isolated; give it an edge")
        return PolymatrixGame(n=n, edges=edges, edge_matrices=mats, dims=tuple(dims))

    def neighbors(self, i: int):
        return [j for (a, j) in self.edge_matrices if a == i]

    def utility_vector(self, i: int, profile) -> np.ndarray:
        out = np.zeros(self.dims[i])
        for j in self.neighbors(i):
            out += self.edge_matrices[(i, j)] @ profile[j]
        return out

    def operator(self, profile):
        """F(z) = -(utility vectors), the monotone operator of the VI form."""
        return [-self.utility_vector(i, profile) for i in range(self.n)]

    def block_matrix(self) -> np.ndarray:
        """Stacked operator matrix; its spectral norm is the smoothness L."""
        offs = np.concatenate([[0], np.cumsum(self.dims)])
        B = np.zeros((offs[-1], offs[-1]))
        for (i, j), A in self.edge_matrices.items():
            B[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = A
        return B


@dataclass(frozen=True)
class QuadraticSaddle:
    """f(x, y) = x^T A y + (mu/2)||x - x0||^2 - (mu/2)||y - y0||^2."""

    A: np.ndarray
    mu: float
    x0: np.ndarray
    y0: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "x0", check_simplex(self.x0))
        object.__setattr__(self, "y0", check_simplex(self.y0))
        if A.shape != (self.x0.size, self.y0.size):
            raise ValueError("coupling matrix shape does not match anchors")

    @property
    def dims(self):
        return self.A.shape

    def value(self, x, y) -> float:
        return float(x @ self.A @ y
                     + 0.5 * self.mu * np.sum((x - self.x0) ** 2)
                     - 0.5 * self.mu * np.sum((y - self.y0) ** 2))

    def utilities(self, x, y):
        """(-grad_x f, +grad_y f): the players' utility gradients."""
        ux = -(self.A @ y + self.mu * (x - self.x0))
        uy = self.A.T @ x - self.mu * (y - self.y0)
        return ux, uy


def eval_saddle_gradients(g: QuadraticSaddle, x, y):
    """Utility gradients of the quadratic saddle at (x, y)."""
    return g.utilities(check_simplex(x), check_simplex(y))


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

KINDS = ("zero-sum", "identical-interest", "polymatrix", "saddle", "normal-form")


@dataclass
class GameSequence:
    """Indexed access to the game at each round t = 1..T of an interaction.

    game_at(t) is lazy and memoized per round; descriptor is a JSON-able dict
    from which sequence_from_descriptor rebuilds the identical sequence.
    """

    kind: str
    T: int
    descriptor: dict
    _factory: object = field(repr=False)
    block_length: int | None = None  # meta-learning block size m, if any
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.T < 1:
            raise ValueError("T must be >= 1")

    def game_at(self, t: int):
        if not 1 <= t <= self.T:
            raise IndexError(f"round {t} outside 1..{self.T}")
        if t not in self._cache:
            self._cache[t] = self._factory(t)
        return self._cache[t]

    def games(self):
        return [self.game_at(t) for t in range(1, self.T + 1)]

    @property
    def n_blocks(self) -> int | None:
        if self.block_length is None:
            return None
        return self.T // self.block_length

    def to_json(self) -> dict:
        return dict(self.descriptor)


def _powerlaw_coeffs(alpha: float, T: int, base_index: str) -> np.ndarray:
    """c_t with A(t) = A0 + c_t * P for the power-law drift recursions."""
    incr = np.arange(1, T + 1, dtype=float) ** (-alpha)
    if base_index == "zero":        # A(0) = A0, drift applies from t = 1
        return np.cumsum(incr)
    if base_index == "one":         # A(1) = A0, drift applies from t = 2
        c = np.cumsum(incr) - incr[0]
        return c
    raise ValueError("base_index must be 'zero' or 'one'")


def gen_drift_powerlaw(A0, P, alpha: float, T: int, seed=None,
                       base_index: str = "zero") -> GameSequence:
    """A(t) = A(t-1) + P * t^(-alpha).

    base_index="zero" starts the recursion from A(0) = A0 (potential-game
    experiments); base_index="one" anchors A(1) = A0 (zero-sum experiments).
    """
    A0 = np.asarray(A0, dtype=float)
    P = np.asarray(P, dtype=float)
    if A0.shape != P.shape:
        raise ValueError("A0 and P must have the same shape")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    c = _powerlaw_coeffs(alpha, T, base_index)
    desc = {"generator": "drift_powerlaw", "kind": "zero-sum", "T": T,
            "params": {"alpha": alpha, "base_index": base_index,
                       "A0": A0.tolist(), "P": P.tolist()}, "seed": seed}
    return GameSequence(kind="zero-sum", T=T, descriptor=desc,
                        _factory=lambda t: MatrixGame(A0 + c[t - 1] * P))


def gen_drift_linear(A0, P, eps: float, T: int, seed=None) -> GameSequence:
    """A(t) = A(t-1) + eps * P with A(0) = A0."""
    A0 = np.asarray(A0, dtype=float)
    P = np.asarray(P, dtype=float)
    if A0.shape != P.shape:
        raise ValueError("A0 and P must have the same shape")
    desc = {"generator": "drift_linear", "kind": "zero-sum", "T": T,
            "params": {"eps": eps, "A0": A0.tolist(), "P": P.tolist()}, "seed": seed}
    return GameSequence(kind="zero-sum", T=T, descriptor=desc,
                        _factory=lambda t: MatrixGame(A0 + eps * t * P))


def alternating_matrices(delta: float, shifted: bool = False):
    """The 2x2 pair whose equilibria flip between (1/3,2/3) and (2/3,1/3)."""
    odd = np.array([[2.0 * delta, 0.0], [0.0, delta]])
    even = np.array([[delta, 0.0], [0.0, 2.0 * delta]])
    if shifted:
        odd = odd + 1.0
    return odd, even


def gen_alternating_example(delta: float, T: int, shifted: bool = False) -> GameSequence:
    """Odd rounds play diag(2d, d), even rounds diag(d, 2d).

    With shifted=True the odd matrix gains +1 on every entry, which leaves the
    approximate-equilibrium structure untouched while inflating the matrix
    deviation measure.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if T < 4:
        raise ValueError("T must be >= 4")
    odd, even = alternating_matrices(delta, shifted)
    desc = {"generator": "alternating", "kind": "zero-sum", "T": T,
            "params": {"delta": delta, "shifted": shifted}, "seed": None}
    return GameSequence(kind="zero-sum", T=T, descriptor=desc,
                        _factory=lambda t: MatrixGame(odd if t % 2 == 1 else even))


def gen_identical_interest(seq: GameSequence) -> GameSequence:
    """Reinterpret a matrix-game sequence as shared utility x^T A y.

    Both players receive the same bilinear payoff, so the game is a potential
    game with potential Phi(x, y) = x^T A y.
    """
    if seq.kind != "zero-sum":
        raise ValueError("expected a zero-sum (matrix) sequence")
    desc = dict(seq.descriptor)
    desc["kind"] = "identical-interest"
    return GameSequence(kind="identical-interest", T=seq.T, descriptor=desc,
                        _factory=seq.game_at, block_length=seq.block_length)


def gen_polymatrix(n: int, edges, edge_matrices, T: int = 1, drift=None,
                   seed=None) -> GameSequence:
    """Polymatrix zero-sum sequence, optionally with linear per-edge drift.

    drift maps ordered pairs (i, j) to increment matrices; each increment is
    mirrored as its negated transpose on (j, i) so antisymmetry is preserved
    along the whole sequence: A_{i,j}(t) = A_{i,j} + (t-1) * D_{i,j}.
    """
    base = PolymatrixGame.create(n, edges, edge_matrices)
    drift_sym = {}
    if drift:
        for (i, j), D in drift.items():
            D = np.asarray(D, dtype=float)
            if D.shape != base.edge_matrices[(i, j)].shape:
                raise ValueError(f"drift shape mismatch on edge ({i},{j})")
            drift_sym[(i, j)] = D
            drift_sym[(j, i)] = -D.T

    def factory(t):
        if not drift_sym:
            return base
        mats = {k: A + (t - 1) * drift_sym[k] if k in drift_sym else A
                for k, A in base.edge_matrices.items()}
        return PolymatrixGame(n=n, edges=base.edges, edge_matrices=mats,
                              dims=base.dims)

    desc = {"generator": "polymatrix", "kind": "polymatrix", "T": T,
            "params": {"n": n,
                       "edges": [list(e) for e in base.edges],
                       "matrices": {f"{i},{j}": base.edge_matrices[(i, j)].tolist()
                                    for (i, j) in base.edge_matrices},
                       "drift": {f"{i},{j}": D.tolist() for (i, j), D in drift_sym.items()}},
            "seed": seed}
    return GameSequence(kind="polymatrix", T=T, descriptor=desc, _factory=factory)


def gen_metalearning(base_games, m: int, kind: str | None = None) -> GameSequence:
    """H games, each repeated for m consecutive rounds; T = m * H."""
    games = list(base_games)
    if not games:
        raise ValueError("base_games is empty")
    if m < 1:
        raise ValueError("m must be >= 1")
    if kind is None:
        kind = "saddle" if isinstance(games[0], QuadraticSaddle) else "zero-sum"
    T = m * len(games)

    def params_for(g):
        if isinstance(g, MatrixGame):
            return {"A": g.A.tolist()}
        if isinstance(g, QuadraticSaddle):
            return {"A": g.A.tolist(), "mu": g.mu,
                    "x0": g.x0.tolist(), "y0": g.y0.tolist()}
        raise ValueError(f"cannot serialize {type(g).__name__} in a meta sequence")

    desc = {"generator": "metalearning", "kind": kind, "T": T,
            "params": {"m": m, "games": [params_for(g) for g in games]}, "seed": None}
    return GameSequence(kind=kind, T=T, descriptor=desc,
                        _factory=lambda t: games[(t - 1) // m], block_length=m)


def block_index(t: int, m: int) -> int:
    """1-based meta-learning block h containing round t."""
    return (t - 1) // m + 1


def constant_sequence(game, T: int) -> GameSequence:
    """Static game repeated for T rounds."""
    if isinstance(game, MatrixGame):
        kind, params = "zero-sum", {"A": game.A.tolist()}
    elif isinstance(game, QuadraticSaddle):
        kind, params = "saddle", {"A": game.A.tolist(), "mu": game.mu,
                                  "x0": game.x0.tolist(), "y0": game.y0.tolist()}
    elif isinstance(game, PolymatrixGame):
        kind = "polymatrix"
        params = {"n": game.n, "edges": [list(e) for e in game.edges],
                  "matrices": {f"{i},{j}": game.edge_matrices[(i, j)].tolist()
                               for (i, j) in game.edge_matrices}}
    elif isinstance(game, NormalFormGame):
        kind, params = "normal-form", {"utilities": [u.tolist() for u in game.utilities]}
    else:
        raise ValueError(f"unsupported game type {type(game).__name__}")
    desc = {"generator": "constant", "kind": kind, "T": T, "params": params, "seed": None}
    return GameSequence(kind=kind, T=T, descriptor=desc, _factory=lambda t: game)


def sequence_from_descriptor(desc: dict) -> GameSequence:
    """Rebuild a sequence from its JSON descriptor (bitwise identical games)."""
    gen = desc["generator"]
    T = desc["T"]
    p = desc.get("params", {})
    if gen == "drift_powerlaw":
        seq = gen_drift_powerlaw(np.array(p["A0"]), np.array(p["P"]), p["alpha"], T,
                                 seed=desc.get("seed"), base_index=p["base_index"])
    elif gen == "drift_linear":
        seq = gen_drift_linear(np.array(p["A0"]), np.array(p["P"]), p["eps"], T,
                               seed=desc.get("seed"))
    elif gen == "alternating":
        seq = gen_alternating_example(p["delta"], T, p["shifted"])
    elif gen == "polymatrix":
        mats = {tuple(int(v) for v in k.split(",")): np.array(M)
                for k, M in p["matrices"].items()}
        drift = {tuple(int(v) for v in k.split(",")): np.array(M)
                 for k, M in p.get("drift", {}).items()} or None
        seq = gen_polymatrix(p["n"], [tuple(e) for e in p["edges"]], mats, T,
                             drift=drift, seed=desc.get("seed"))
    elif gen == "metalearning":
        games = []
        for gp in p["games"]:
            if "mu" in gp:
                games.append(QuadraticSaddle(np.array(gp["A"]), gp["mu"],
                                             np.array(gp["x0"]), np.array(gp["y0"])))
            else:
                games.append(MatrixGame(np.array(gp["A"])))
        seq = gen_metalearning(games, p["m"], kind=desc["kind"])
    elif gen == "constant":
        kind = desc["kind"]
        if kind == "zero-sum":
            game = MatrixGame(np.array(p["A"]))
        elif kind == "saddle":
            game = QuadraticSaddle(np.array(p["A"]), p["mu"],
                                   np.array(p["x0"]), np.array(p["y0"]))
        elif kind == "polymatrix":
            mats = {tuple(int(v) for v in k.split(",")): np.array(M)
                    for k, M in p["matrices"].items()}
            game = PolymatrixGame.create(p["n"], [tuple(e) for e in p["edges"]], mats)
        elif kind == "normal-form":
            game = NormalFormGame(tuple(np.array(u) for u in p["utilities"]))
        else:
            raise ValueError(f"unknown constant kind {kind!r}")
        seq = constant_sequence(game, T)
    else:
        raise ValueError(f"unknown generator {gen!r}")
    if desc["kind"] == "identical-interest" and seq.kind == "zero-sum":
        seq = gen_identical_interest(seq)
    return seq
