"""Figure assembly from tvgames experiment CSVs.

A FigureSpec is a grid: one row per seed/instance, one column per metric
column of the CSV schema, with one curve per overlay value (the swept
parameter, e.g. alpha). Inputs are never modified; a CSV whose header lacks a
requested column fails the render with a message listing expectations
against the actual header.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .svg import Panel, render_svg

GAP_COLUMNS = {"eq_gap", "ce_gap_last", "ce_gap_avg"}

# metric columns per known schema, in figure order
DEFAULT_METRICS = {
    "zero-sum": ["eq_gap", "cum_gap_sq", "reg_x", "reg_y"],
    "mediator": ["ce_gap_last", "ce_gap_avg", "mediator_dreg"],
}


class SchemaError(ValueError):
    pass


def load_csv(path: str) -> dict:
    """Parse a metrics CSV into {column: list of floats}."""
    with open(path) as f:
        lines = [ln for ln in f.read().splitlines() if ln]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for ln in lines[1:]:
        vals = ln.split(",")
        if len(vals) != len(header):
            raise SchemaError(f"{path}: ragged row with {len(vals)} fields, "
                              f"header has {len(header)}")
        for h, v in zip(header, vals):
            cols[h].append(float(v))
    return cols


def metrics_for_header(header) -> list:
    if "ce_gap_last" in header:
        return [c for c in DEFAULT_METRICS["mediator"] if c in header]
    return DEFAULT_METRICS["zero-sum"]


@dataclass
class FigureSpec:
    """rows: [(row_label, [(overlay_label, csv_path), ...]), ...]."""

    rows: list
    metrics: list | None = None   # None: infer from the first CSV's schema
    title: str = ""
    out_path: str = "figure.svg"
    fmt: str = "svg"
    log_gap: bool = True

    def csv_paths(self):
        for _, curves in self.rows:
            for _, path in curves:
                yield path


def render(spec: FigureSpec) -> list:
    """Render the figure; returns the list of files written."""
    loaded = {}
    for path in spec.csv_paths():
        if path not in loaded:
            loaded[path] = load_csv(path)

    any_cols = next(iter(loaded.values()))
    metrics = spec.metrics or metrics_for_header(list(any_cols))
    for path, cols in loaded.items():
        missing = [c for c in ["t"] + list(metrics) if c not in cols]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {missing}; expected "
                f"{['t'] + list(metrics)}, header has {list(cols)}")

    legend = []
    for _, curves in spec.rows:
        for label, _ in curves:
            if label not in legend:
                legend.append(label)

    grid = []
    row_labels = []
    for row_label, curves in spec.rows:
        row_labels.append(row_label)
        prow = []
        for mcol in metrics:
            panel = Panel(mcol, log_y=spec.log_gap and mcol in GAP_COLUMNS)
            for label, path in curves:
                cols = loaded[path]
                panel.add_curve(label, cols["t"], cols[mcol])
            prow.append(panel)
        grid.append(prow)

    written = []
    if spec.fmt == "svg":
        text = render_svg(grid, row_labels, legend, out_title=spec.title)
        with open(spec.out_path, "w") as f:
            f.write(text)
        written.append(spec.out_path)
    elif spec.fmt == "png":
        written.append(_render_png(spec, grid, row_labels, legend))
    else:
        raise ValueError(f"unknown format {spec.fmt!r} (svg or png)")
    return written


def _render_png(spec: FigureSpec, grid, row_labels, legend) -> str:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        raise RuntimeError("png output needs matplotlib (pip install "
                           "tvplots[png])") from e
    n_rows = len(grid)
    n_cols = max(len(r) for r in grid)
    fig, axes = plt.subplots(n_rows, n_cols,
                             figsize=(3.2 * n_cols, 2.4 * n_rows),
                             squeeze=False)
    for r, prow in enumerate(grid):
        for c, panel in enumerate(prow):
            ax = axes[r][c]
            for k, (label, xs, ys) in enumerate(panel.curves):
                ax.plot(xs, ys, label=label, linewidth=1.0)
            if panel.log_y and any(v > 0 for v in panel.y_values()):
                ax.set_yscale("log")
            if r == 0:
                ax.set_title(panel.title, fontsize=9)
            if c == 0 and row_labels[r]:
                ax.set_ylabel(row_labels[r], fontsize=8)
    axes[0][0].legend(fontsize=7)
    if spec.title:
        fig.suptitle(spec.title, fontsize=10)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return spec.out_path


# ---------------------------------------------------------------------------
# Discovery of tvgames output layouts
# ---------------------------------------------------------------------------

def discover_figures(input_dir: str, out_dir: str, fmt: str = "svg",
                     experiment: str | None = None) -> list:
    """Build FigureSpecs from a tvgames output directory.

    Sweep layouts (<name>.sweep.csv + cellNNN/ subdirectories) become a grid
    with one row per seed and one curve per overlay value; single runs
    (<name>.csv) become a one-row, one-curve figure.
    """
    specs = []
    entries = sorted(os.listdir(input_dir))
    sweeps = [e for e in entries if e.endswith(".sweep.csv")]
    for sw in sweeps:
        name = sw[: -len(".sweep.csv")]
        if experiment and name != experiment:
            continue
        table = load_sweep_table(os.path.join(input_dir, sw))
        overlay_keys = [k for k in table["_keys"] if k != "seed"]
        overlay = overlay_keys[0] if overlay_keys else None
        rows = {}
        for rec in table["rows"]:
            cell_dir = os.path.join(input_dir, f"cell{int(rec['cell']):03d}")
            csv_path = os.path.join(cell_dir, f"{name}.csv")
            if not os.path.exists(csv_path):
                continue
            seed = rec.get("seed", "0")
            label = (f"{overlay.split('.')[-1]}={rec[overlay]}" if overlay
                     else f"cell {rec['cell']}")
            rows.setdefault(seed, []).append((label, csv_path))
        spec = FigureSpec(
            rows=[(f"seed {s}", curves) for s, curves in sorted(rows.items())],
            title=name,
            out_path=os.path.join(out_dir, f"{name}.{fmt}"), fmt=fmt)
        specs.append(spec)

    for e in entries:
        if not e.endswith(".csv") or e.endswith(".sweep.csv"):
            continue
        name = e[:-4]
        if name.endswith(".trace"):
            continue
        if experiment and name != experiment:
            continue
        specs.append(FigureSpec(
            rows=[("", [("run", os.path.join(input_dir, e))])],
            title=name, out_path=os.path.join(out_dir, f"{name}.{fmt}"),
            fmt=fmt))
    return specs


def load_sweep_table(path: str) -> dict:
    with open(path) as f:
        lines = [ln for ln in f.read().splitlines() if ln]
    header = lines[0].split(",")
    keys = [h for h in header if h not in
            {"cell", "cum_gap_sq", "final_gap", "avg_gap", "ok"}]
    rows = []
    for ln in lines[1:]:
        rows.append(dict(zip(header, ln.split(","))))
    return {"_keys": keys, "rows": rows}
