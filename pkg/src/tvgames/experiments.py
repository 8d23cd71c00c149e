"""Config-driven experiment runner: the user-facing surface of the lab.

Named experiments mirror the appendix studies (drifting identical-interest
games under gradient descent / multiplicative weights, drifting zero-sum
games under optimistic gradient descent) plus the meta-learning, strongly
convex-concave, K-switch, two-point, and alternating-example settings. Each
run writes a per-round metrics CSV, a JSON trace envelope, and a JSON summary
with checker margins; margins of applicable theorem checks gate the exit
status. Identical config + seed reproduces the CSV byte for byte.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import mediator as med
from .dynamics import (LearnerSpec, Trace, run_averaged_two_point,
                       run_dynamics, tuned_eta)
from .games import (MatrixGame, NormalFormGame, QuadraticSaddle,
                    constant_sequence, derive_seed, gen_alternating_example,
                    gen_drift_linear, gen_drift_powerlaw,
                    gen_identical_interest, gen_metalearning, gen_polymatrix,
                    rand_matrix, rand_simplex_point, sequence_from_descriptor)
from .geometry import spectral_norm
from .metrics import (MARGIN_TOL, check_k_switch_bound, iterations_to_eps,
                      max_dynamic_regret, oracle_certificates, path_lengths,
                      standard_checks, trace_eq_gaps, uniform_certificates,
                      variation_report)

OUT_ENV_VAR = "TVGAMES_OUT"
SCHEMA_VERSION = 1


def default_out_dir() -> str:
    return os.environ.get(OUT_ENV_VAR, "runs")


# ---------------------------------------------------------------------------
# Named experiment registry
# ---------------------------------------------------------------------------

def _base_config(name: str) -> dict:
    defaults = {
        # drifting identical-interest games, plain gradient descent
        "pot-gd": {
            "T": 200,
            "game": {"generator": "powerlaw", "d": 50, "alpha": 0.1,
                     "base_index": "zero", "identical": True},
            "learners": {"kind": "gd", "eta": 0.1},
            "cert_family": "none",
        },
        # same drift, multiplicative weights (outside the theory; observed only)
        "pot-mwu": {
            "T": 200,
            "game": {"generator": "powerlaw", "d": 50, "alpha": 0.1,
                     "base_index": "zero", "identical": True},
            "learners": {"kind": "mwu", "eta": 0.1},
            "cert_family": "none",
        },
        # linear drift, gradient descent
        "pot-eps": {
            "T": 500,
            "game": {"generator": "linear", "d": 50, "eps": 0.01,
                     "identical": True},
            "learners": {"kind": "gd", "eta": 0.1},
            "cert_family": "none",
        },
        # drifting zero-sum games, optimistic gradient descent
        "zs-ogd": {
            "T": 1000,
            "game": {"generator": "powerlaw", "d": 10, "alpha": 1.0,
                     "base_index": "one", "identical": False},
            "learners": {"kind": "ogd", "eta": 0.01},
            "cert_family": "uniform",
        },
        # repeated-game warm starts in zero-sum play
        "metalearn-zs": {
            "T": None,  # m * H
            "game": {"generator": "metalearn", "H": 10, "m": 500, "d": 2,
                     "related": True},
            "learners": {"kind": "ogd", "eta": None,
                         "prediction": "current_game"},
            "cert_family": "oracle",
            "eps_target": 1e-3,
        },
        # mediator warm starts in general-sum play
        "metalearn-ce": {
            "T": None,
            "game": {"generator": "mediator-meta", "H": 5, "m": 400,
                     "shape": [2, 2], "related": True},
            "learners": {"kind": "ogd", "eta": None,
                         "prediction": "current_game"},
            "eps_target": 1e-3,
        },
        # strongly convex-concave saddles, each repeated m rounds
        "strong-saddle": {
            "T": None,
            "game": {"generator": "saddle-meta", "H": 4, "d": 3, "mu": 1.0,
                     "m": None},
            "learners": {"kind": "ogd", "eta": None},
            "cert_family": "oracle",
        },
        # K-switch dynamic regret in a static smooth game
        "kswitch": {
            "T": 200,
            "game": {"generator": "static-random", "d": 3},
            "learners": {"kind": "ogd", "eta": None},
            "cert_family": "uniform",
            "k_values": [1, 2, 4, 8],
        },
        # two-point feedback: play the running average, probe the iterate;
        # inner iterates start off-center because the uniform point is
        # already the matching-pennies equilibrium
        "twopoint": {
            "T": 10_000,
            "game": {"generator": "matching-pennies"},
            "learners": {"kind": "two-point", "eta": None,
                         "start": [[0.75, 0.25], [0.75, 0.25]]},
            "cert_family": "none",
        },
        # the abrupt-equilibrium alternating construction
        "alternating-2x2": {
            "T": 100,
            "game": {"generator": "alternating", "delta": 1e-6,
                     "shifted": False},
            "learners": {"kind": "ogd", "eta": None},
            "cert_family": "oracle",
        },
    }
    if name not in defaults:
        raise KeyError(f"unknown experiment {name!r}; known: {sorted(defaults)}")
    cfg = {"schema": SCHEMA_VERSION, "name": name, "seed": 1,
           "cert_tol": 1e-3, "checks": "auto"}
    cfg.update(json.loads(json.dumps(defaults[name])))  # deep copy
    return cfg


def list_experiments() -> list:
    return ["pot-gd", "pot-mwu", "pot-eps", "zs-ogd", "metalearn-zs",
            "metalearn-ce", "strong-saddle", "kswitch", "twopoint",
            "alternating-2x2"]


def apply_overrides(cfg: dict, overrides: dict) -> dict:
    """Apply dotted-path overrides ('game.alpha' -> cfg['game']['alpha'])."""
    for key, raw in (overrides or {}).items():
        value = raw
        if isinstance(raw, str):
            try:
                value = json.loads(raw)
            except (ValueError, TypeError):
                value = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise KeyError(f"no config section {p!r} in override {key!r}")
            node = node[p]
        if parts[-1] not in node:
            raise KeyError(f"unknown config key {key!r}")
        node[parts[-1]] = value
    return cfg


# ---------------------------------------------------------------------------
# Sequence construction from config
# ---------------------------------------------------------------------------

def _build_sequence(cfg: dict):
    g = cfg["game"]
    seed = cfg["seed"]
    T = cfg["T"]
    gen = g["generator"]
    if gen in ("powerlaw", "linear"):
        d = g["d"]
        A0 = rand_matrix(seed, d, d, counter=0)
        P = rand_matrix(seed, d, d, counter=1)
        if gen == "powerlaw":
            seq = gen_drift_powerlaw(A0, P, g["alpha"], T, seed=seed,
                                     base_index=g.get("base_index", "zero"))
        else:
            seq = gen_drift_linear(A0, P, g["eps"], T, seed=seed)
        if g.get("identical"):
            seq = gen_identical_interest(seq)
        return seq
    if gen == "alternating":
        return gen_alternating_example(g["delta"], T, g.get("shifted", False))
    if gen == "static-random":
        d = g["d"]
        return constant_sequence(MatrixGame(rand_matrix(seed, d, d)), T)
    if gen == "matching-pennies":
        return constant_sequence(MatrixGame(np.array([[1.0, -1.0],
                                                      [-1.0, 1.0]])), T)
    if gen == "metalearn":
        H, m, d = g["H"], g["m"], g["d"]
        if g.get("related", True):
            base = MatrixGame(np.diag(np.linspace(2.0, 1.0, d)))
            games = [base] * H
        else:
            games = [MatrixGame(rand_matrix(derive_seed(seed, h), d, d))
                     for h in range(H)]
        return gen_metalearning(games, m)
    if gen == "saddle-meta":
        H, d, mu = g["H"], g["d"], g["mu"]
        games = []
        for h in range(H):
            s = derive_seed(seed, h)
            games.append(QuadraticSaddle(rand_matrix(s, d, d), mu,
                                         rand_simplex_point(s, d, counter=1),
                                         rand_simplex_point(s, d, counter=2)))
        m = g.get("m")
        if m is None:
            probe = gen_metalearning(games, 1)
            eta = tuned_eta(probe)
            m = int(np.ceil(2.0 / (eta * mu))) + 1
        return gen_metalearning(games, m)
    if gen == "polymatrix-random":
        d, n = g.get("d", 2), g.get("n", 3)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        mats = {e: rand_matrix(derive_seed(seed, k), d, d)
                for k, e in enumerate(edges)}
        drift = None
        if g.get("drift_scale"):
            drift = {e: g["drift_scale"] * rand_matrix(derive_seed(seed, 100 + k), d, d)
                     for k, e in enumerate(edges)}
        return gen_polymatrix(n, edges, mats, T=T, drift=drift, seed=seed)
    raise KeyError(f"unknown generator {gen!r}")


def _mediator_games(cfg: dict):
    g = cfg["game"]
    seed = cfg["seed"]
    H, m = g["H"], g["m"]
    shape = tuple(g["shape"])
    if g.get("related", True):
        u = tuple(rand_matrix(derive_seed(seed, i), *shape)
                  for i in range(len(shape)))
        base = NormalFormGame(u)
        games = [base] * H
    else:
        games = []
        for h in range(H):
            u = tuple(rand_matrix(derive_seed(seed, 31 * h + i), *shape)
                      for i in range(len(shape)))
            games.append(NormalFormGame(u))
    return games, m


# ---------------------------------------------------------------------------
# Per-round CSV columns
# ---------------------------------------------------------------------------

def _increment_norms(seq) -> np.ndarray:
    """||A(t) - A(t-1)||_2 for t = 2..T, cheap closed forms where possible."""
    desc = seq.descriptor
    gen = desc["generator"]
    p = desc.get("params", {})
    T = seq.T
    if gen in ("drift_powerlaw", "drift_linear"):
        P = np.array(p["P"])
        nP = spectral_norm(P)
        if gen == "drift_linear":
            return np.full(T - 1, abs(p["eps"]) * nP)
        # both base conventions step by P * t^(-alpha) for t >= 2
        return np.arange(2, T + 1, dtype=float) ** (-p["alpha"]) * nP
    if gen == "alternating":
        d0 = spectral_norm(seq.game_at(2).A - seq.game_at(1).A)
        d1 = spectral_norm(seq.game_at(3).A - seq.game_at(2).A)
        out = np.empty(T - 1)
        out[0::2] = d0
        out[1::2] = d1
        return out
    if gen in ("metalearning", "constant"):
        out = np.zeros(T - 1)
        m = seq.block_length
        if gen == "metalearning" and m is not None:
            for t in range(2, T + 1):
                if (t - 1) % m == 0:   # block boundary
                    g0, g1 = seq.game_at(t - 1), seq.game_at(t)
                    out[t - 2] = spectral_norm(g1.A - g0.A)
        return out
    if gen == "polymatrix":
        out = np.zeros(T - 1)
        for t in range(2, T + 1):
            g0, g1 = seq.game_at(t - 1), seq.game_at(t)
            out[t - 2] = np.sqrt(sum(
                spectral_norm(g1.edge_matrices[k] - g0.edge_matrices[k]) ** 2
                for k in g0.edge_matrices))
        return out
    # generic fallback
    return np.array([spectral_norm(seq.game_at(t).A - seq.game_at(t - 1).A)
                     for t in range(2, T + 1)])


def trace_columns(trace: Trace) -> dict:
    """The per-round metric columns of the standard CSV schema."""
    gaps = trace_eq_gaps(trace)
    cols = {"t": np.arange(1, trace.T + 1), "eq_gap": gaps,
            "cum_gap_sq": np.cumsum(gaps ** 2)}
    names = (["reg_x", "reg_y"] if trace.n_players == 2
             else [f"reg_{i + 1}" for i in range(trace.n_players)])
    dnames = (["dreg_x_max", "dreg_y_max"] if trace.n_players == 2
              else [f"dreg_{i + 1}_max" for i in range(trace.n_players)])
    path2 = np.zeros(trace.T)
    dreg_cols = {}
    for p in range(trace.n_players):
        cum_act = np.cumsum(trace.u[p], axis=0)
        realized = np.cumsum(np.sum(trace.x[p] * trace.u[p], axis=1))
        cols[names[p]] = np.max(cum_act, axis=1) - realized
        dreg_cols[dnames[p]] = np.cumsum(np.max(trace.u[p], axis=1)) - realized
        path2 += (np.sum((trace.x[p] - trace.x_hat[p]) ** 2, axis=1)
                  + np.sum((trace.x[p] - trace.x_hat_next[p]) ** 2, axis=1))
    cols.update(dreg_cols)
    cols["path2"] = np.cumsum(path2)
    v = np.zeros(trace.T)
    v[1:] = np.cumsum(_increment_norms(trace.sequence()) ** 2)
    cols["v_a_running"] = v
    return cols


def csv_text(cols: dict) -> str:
    """Deterministic CSV rendering: shortest round-trip float repr."""
    keys = list(cols)
    lines = [",".join(keys)]
    for t in range(len(cols[keys[0]])):
        lines.append(",".join(
            str(int(cols[k][t])) if k == "t" else repr(float(cols[k][t]))
            for k in keys))
    return "\n".join(lines) + "\n"


def write_csv(path, cols: dict):
    with open(path, "w") as f:
        f.write(csv_text(cols))


# ---------------------------------------------------------------------------
# Run summary
# ---------------------------------------------------------------------------

@dataclass
class RunSummary:
    name: str
    seed: int
    kind: str
    T: int
    config: dict
    cum_gap_sq: float
    final_gap: float
    avg_gap: float
    regrets: list
    max_dregs: list
    path2: float
    variation: dict
    checks: list
    violations: list
    extras: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    files: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        return d


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)!r}")


def _summarize_checks(results) -> tuple:
    checks = [r.to_json() for r in results]
    violations = [r.name for r in results
                  if r.applicable and r.margin < -MARGIN_TOL]
    return checks, violations


def _certificates_for(cfg, seq):
    fam = cfg.get("cert_family", "uniform")
    if fam == "none":
        return None
    if fam == "uniform":
        return uniform_certificates(seq)
    if fam == "oracle":
        return oracle_certificates(seq, tol=cfg.get("cert_tol", 1e-3))
    raise KeyError(f"unknown cert_family {fam!r}")


def run_named(name: str, overrides: dict | None = None, seed: int | None = None,
              out_dir: str | None = None, write: bool = True) -> RunSummary:
    """Execute a named experiment and write its artifacts.

    Returns the RunSummary; summary.ok is False when an applicable theorem
    margin fell below -1e-9 (the CLI turns that into exit code 2).
    """
    cfg = _base_config(name)
    if seed is not None:
        cfg["seed"] = int(seed)
    apply_overrides(cfg, overrides or {})
    t0 = time.perf_counter()

    if cfg["game"]["generator"] == "mediator-meta":
        summary = _run_mediator_meta(cfg)
    else:
        summary = _run_trace_experiment(cfg)
    summary.wall_clock = time.perf_counter() - t0

    if write:
        out = out_dir or default_out_dir()
        os.makedirs(out, exist_ok=True)
        base = os.path.join(out, name)
        write_csv(base + ".csv", summary.extras.pop("_columns"))
        with open(base + ".trace.json", "w") as f:
            json.dump(summary.extras.pop("_envelope"), f, default=_json_default)
        with open(base + ".summary.json", "w") as f:
            json.dump(summary.to_json(), f, indent=1, default=_json_default)
        summary.files = {"csv": base + ".csv",
                         "trace": base + ".trace.json",
                         "summary": base + ".summary.json"}
    else:
        summary.extras.pop("_columns", None)
        summary.extras.pop("_envelope", None)
    return summary


def _learner_specs(cfg, n_players: int):
    lc = cfg["learners"]
    spec = LearnerSpec(kind=lc["kind"], eta=lc.get("eta"),
                       prediction=lc.get("prediction"))
    return [spec] * n_players


def _run_trace_experiment(cfg) -> RunSummary:
    name = cfg["name"]
    seq = _build_sequence(cfg)
    cfg["T"] = seq.T

    if cfg["learners"]["kind"] == "two-point":
        trace = run_averaged_two_point(seq.game_at(1), cfg["learners"].get("eta"),
                                       seq.T, start=cfg["learners"].get("start"))
    else:
        n = len(seq.game_at(1).dims) if seq.kind != "polymatrix" \
            else seq.game_at(1).n
        trace = run_dynamics(seq, _learner_specs(cfg, n))

    certs = _certificates_for(cfg, seq) if cfg.get("checks") != "none" else None
    report = None
    results = []
    if cfg.get("checks") != "none":
        if seq.kind in ("zero-sum", "polymatrix") and certs is not None:
            report = variation_report(seq, cfg.get("cert_tol", 1e-3),
                                      certificates=certs)
        elif seq.kind in ("identical-interest", "saddle"):
            report = variation_report(seq, cfg.get("cert_tol", 1e-3),
                                      with_ne=(seq.kind == "saddle"))
        if trace.learner_kinds[0] == "avg-two-point":
            results = []
        else:
            results = standard_checks(trace, report,
                                      cert_tol=cfg.get("cert_tol", 1e-3))
        for K in cfg.get("k_values", []):
            results.append(check_k_switch_bound(trace, K))

    cols = trace_columns(trace)
    gaps = cols["eq_gap"]
    checks, violations = _summarize_checks(results)
    extras = {"_columns": cols, "_envelope": trace.to_envelope()}

    if name == "metalearn-zs":
        eps_t = cfg.get("eps_target", 1e-3)
        counts = iterations_to_eps(trace, eps_t)
        extras["iterations_to_eps"] = counts
        extras["avg_iterations"] = float(np.mean(counts))
        # predicted average iteration complexity for comparison:
        # ceil(P/(H eps^2) + P' V_NE / (H eps^2)) + 1
        from .metrics import trace_constants
        c = trace_constants(trace)
        H = trace.T // (seq.block_length or trace.T)
        pre = 4 * c["L"] ** 2 * (4 * c["D_Z"] + c["norm_Z"]) ** 2
        P_const = pre * c["D_Z"] ** 2
        P_prime = 2 * pre * c["D_Z"]
        v_ne = report.v_ne if report and report.v_ne is not None else 0.0
        extras["iteration_bound"] = float(np.ceil(
            P_const / (H * eps_t ** 2) + P_prime * v_ne / (H * eps_t ** 2)) + 1)
    if name == "twopoint":
        idx = [t for t in (100, 1000, 10_000) if t <= trace.T]
        extras["scaled_gaps"] = {str(t): float(t * gaps[t - 1]) for t in idx}
        dregs = {str(t): float(max_dynamic_regret(_prefix_trace(trace, t), 0))
                 for t in idx}
        extras["max_dreg_at"] = dregs
        if len(idx) >= 2:
            # growth per decade of t; flat increments are the log-T signature
            extras["dreg_per_decade"] = [
                round(dregs[str(idx[i + 1])] - dregs[str(idx[i])], 6)
                for i in range(len(idx) - 1)]
    if name == "alternating-2x2":
        uni = variation_report(seq, certificates=uniform_certificates(seq))
        extras["v_ne_uniform"] = uni.v_ne
        extras["eps_sum_uniform"] = uni.eps_sum
    if name == "kswitch":
        kres = [r for r in results if r.name == "k_switch_bound"]
        extras["k_switch_dreg"] = {str(r.details["K"]): float(r.details["kdreg_sum"])
                                   for r in kres}
        # empirical growth exponent of the per-player K-switch regret in K;
        # the open question is whether theory can be improved toward K^1
        from .metrics import k_switch_dreg as _ksd
        ks = [r.details["K"] for r in kres]
        vals = [_ksd(trace, 0, K) for K in ks]
        pts = [(np.log(K), np.log(v)) for K, v in zip(ks, vals)
               if K > 1 and v > 0]
        if len(pts) >= 2:
            lx, ly = map(np.array, zip(*pts))
            slope = float(np.polyfit(lx, ly, 1)[0])
            extras["kdreg_empirical_exponent"] = round(slope, 4)
        extras["kdreg_per_player"] = {str(K): float(v)
                                      for K, v in zip(ks, vals)}

    _, path2 = path_lengths(trace)
    return RunSummary(
        name=name, seed=cfg["seed"], kind=seq.kind, T=trace.T, config=cfg,
        cum_gap_sq=float(cols["cum_gap_sq"][-1]), final_gap=float(gaps[-1]),
        avg_gap=float(np.mean(gaps)),
        regrets=[float(cols[k][-1]) for k in cols if k.startswith("reg")],
        max_dregs=[float(cols[k][-1]) for k in cols if k.startswith("dreg")],
        path2=path2,
        variation=report.to_json() if report is not None else {},
        checks=checks, violations=violations, extras=extras)


def _prefix_trace(trace: Trace, T: int) -> Trace:
    return Trace(kind=trace.kind, T=T, descriptor=trace.descriptor,
                 etas=trace.etas, learner_kinds=trace.learner_kinds,
                 prediction_modes=trace.prediction_modes,
                 x=[x[:T] for x in trace.x], x_hat=[x[:T] for x in trace.x_hat],
                 x_hat_next=[x[:T] for x in trace.x_hat_next],
                 u=[u[:T] for u in trace.u], m=[m[:T] for m in trace.m],
                 game_index=trace.game_index[:T], seq=trace.seq)


def _run_mediator_meta(cfg) -> RunSummary:
    name = cfg["name"]
    games, m = _mediator_games(cfg)
    H = len(games)
    cfg["T"] = m * H
    meta = med.run_metalearning_ce(games, m, eta=cfg["learners"].get("eta"),
                                   eps=cfg.get("eps_target", 1e-3),
                                   prediction=cfg["learners"].get(
                                       "prediction", "current_game"))
    run = meta.run
    # per-round CSV: mediator schema
    real_mu = np.sum(run.mu * run.u_mu, axis=1)
    med_dreg = np.cumsum(np.max(run.u_mu, axis=1)) - np.cumsum(real_mu)
    cols = {"t": np.arange(1, run.T + 1),
            "ce_gap_last": run.gap_last, "ce_gap_avg": run.gap_avg,
            "mediator_dreg": med_dreg}
    for i in range(run.n):
        cum = np.cumsum(run.u_players[i], axis=0)
        realized = np.cumsum(np.sum(run.xbars[i] * run.u_players[i], axis=1))
        cols[f"reg_{i + 1}"] = np.max(cum, axis=1) - realized

    # Property check with exact CE certificates (one LP per distinct game)
    ce_cache = {}
    certs = []
    for g in run.games:
        if id(g) not in ce_cache:
            ce_cache[id(g)] = med.exact_ce(g)
        certs.append(ce_cache[id(g)])
    res = med.check_mediator_nonnegative(run, np.array(certs))
    checks, violations = _summarize_checks([res])

    envelope = {
        "schema": SCHEMA_VERSION, "kind": "mediator", "m": m, "H": H,
        "eta": run.eta, "prediction": run.prediction,
        "games": [[u.tolist() for u in g.utilities] for g in games],
        "mu": run.mu.tolist(),
        "xbars": [x.tolist() for x in run.xbars],
    }
    extras = {"_columns": cols, "_envelope": envelope,
              "iterations_to_eps": meta.iterations_to_eps,
              "similarity": meta.similarity,
              "final_mu_avg": run.final_average().tolist()}
    return RunSummary(
        name=name, seed=cfg["seed"], kind="mediator", T=run.T, config=cfg,
        cum_gap_sq=float(np.sum(run.gap_last ** 2)),
        final_gap=float(run.gap_avg[-1]), avg_gap=float(np.mean(run.gap_last)),
        regrets=[float(cols[f"reg_{i + 1}"][-1]) for i in range(run.n)],
        max_dregs=[float(med_dreg[-1])], path2=0.0, variation={},
        checks=checks, violations=violations, extras=extras)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _run_cell(args):
    name, overrides, seed, out_dir, cell = args
    out = os.path.join(out_dir, f"cell{cell:03d}") if out_dir else None
    return run_named(name, overrides=overrides, seed=seed, out_dir=out,
                     write=out_dir is not None)


def sweep(name: str, grid: dict, base_seed: int = 1,
          out_dir: str | None = None, workers: int | None = None,
          overrides: dict | None = None) -> list:
    """Cross-product sweep; cell seeds derive from (base seed, cell index).

    grid maps dotted config keys to value lists; a 'seed' key sweeps seeds
    directly. Cells run in separate processes when workers > 1; results are
    independent of scheduling.
    """
    import itertools
    keys = sorted(grid)
    values = [grid[k] if isinstance(grid[k], (list, tuple)) else [grid[k]]
              for k in keys]
    cells = []
    for idx, combo in enumerate(itertools.product(*values)):
        cell_over = dict(overrides or {})
        seed = derive_seed(base_seed, idx)
        for k, v in zip(keys, combo):
            if k == "seed":
                seed = v
            else:
                cell_over[k] = v
        cells.append((name, cell_over, seed, out_dir, idx))
    if not cells:
        cells = [(name, dict(overrides or {}), base_seed, out_dir, 0)]

    if workers is None:
        workers = min(len(cells), os.cpu_count() or 1)
    if workers > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            summaries = list(ex.map(_run_cell, cells))
    else:
        summaries = [_run_cell(c) for c in cells]

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{name}.sweep.csv")
        with open(path, "w") as f:
            cols = ["cell", "seed"] + keys + ["cum_gap_sq", "final_gap",
                                              "avg_gap", "ok"]
            f.write(",".join(cols) + "\n")
            for idx, (cell, s) in enumerate(zip(cells, summaries)):
                vals = [str(idx), str(s.seed)]
                vals += [str(s.seed) if k == "seed" else json.dumps(cell[1][k])
                         for k in keys]
                vals += [repr(float(s.cum_gap_sq)), repr(float(s.final_gap)),
                         repr(float(s.avg_gap)), str(int(s.ok))]
                f.write(",".join(vals) + "\n")
    return summaries


# ---------------------------------------------------------------------------
# Re-checking stored traces
# ---------------------------------------------------------------------------

def check_stored(path: str) -> tuple:
    """Re-run the checkers on a stored trace.

    Accepts either the metrics CSV or the JSON trace envelope; when both
    exist, the CSV is recomputed from the envelope and compared byte for
    byte. Returns (ok, messages).
    """
    msgs = []
    if path.endswith(".csv"):
        csv_path = path
        env_path = path[:-4] + ".trace.json"
    elif path.endswith(".trace.json"):
        env_path = path
        csv_path = path[: -len(".trace.json")] + ".csv"
    else:
        raise IOError(f"expected a .csv or .trace.json path, got {path!r}")
    if not os.path.exists(env_path):
        raise IOError(f"trace envelope {env_path} not found")
    with open(env_path) as f:
        env = json.load(f)

    if env.get("kind") == "mediator":
        games = [NormalFormGame(tuple(np.array(u) for u in gu))
                 for gu in env["games"]]
        m, H = env["m"], env["H"]
        per_round = [g for g in games for _ in range(m)]
        mu = np.array(env["mu"])
        ok = True
        meds = {id(g): med.build_mediator_game(g) for g in games}
        worst = 0.0
        for t in range(0, mu.shape[0], max(1, mu.shape[0] // 50)):
            g = per_round[t]
            gap = med.ce_certificate(g, mu[t], meds[id(g)])
            worst = max(worst, gap)
        msgs.append(f"mediator trace: {mu.shape[0]} rounds, "
                    f"max sampled ce gap {worst:.3e}")
        return ok, msgs

    trace = Trace.from_envelope(env)
    trace.validate()
    seq = sequence_from_descriptor(trace.descriptor)
    trace.seq = seq
    results = []
    if trace.learner_kinds[0] != "avg-two-point":
        certs = uniform_certificates(seq) if seq.kind in ("zero-sum", "polymatrix") \
            else None
        report = None
        if seq.kind in ("zero-sum", "polymatrix"):
            report = variation_report(seq, certificates=certs)
        elif seq.kind in ("identical-interest", "saddle"):
            report = variation_report(seq)
        results = standard_checks(trace, report)
    ok = all(r.ok for r in results)
    for r in results:
        msgs.append(f"{r.name}: margin={r.margin:+.3e} "
                    f"applicable={r.applicable} ok={r.ok}")
    if os.path.exists(csv_path):
        stored = open(csv_path).read()
        if stored == csv_text(trace_columns(trace)):
            msgs.append("csv matches recomputation byte for byte")
        else:
            ok = False
            msgs.append("csv DIFFERS from recomputation")
    return ok, msgs
