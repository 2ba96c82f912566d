"""Figures written next to the run reports."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
}
# fixed metadata keeps PNG bytes stable across runs
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_score_trace(splits, path):
    """Validation score per epoch with PSO triggers marked."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        for sp in splits:
            epochs = range(1, len(sp["score_trace"]) + 1)
            (line,) = ax.plot(epochs, sp["score_trace"], marker="o", ms=3, label=f"split {sp['split_id']}")
            trig = [t["epoch"] for t in sp["pso_triggers"]]
            if trig:
                ax.plot(trig, [sp["score_trace"][e - 1] for e in trig], "x", color=line.get_color(), ms=8)
        ax.set_xlabel("epoch")
        ax.set_ylabel("validation score")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_pso_history(splits, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        for sp in splits:
            by_epoch = {}
            for row in sp["pso_history"]:
                by_epoch.setdefault(row["epoch"], []).append(row["best_fitness"])
            for epoch, vals in by_epoch.items():
                ax.plot(range(1, len(vals) + 1), vals, label=f"split {sp['split_id']}, epoch {epoch}")
        ax.set_xlabel("PSO iteration")
        ax.set_ylabel("global best fitness")
        if ax.lines:
            ax.legend(frameon=False)
        else:
            ax.text(0.5, 0.5, "PSO never triggered", ha="center", va="center", transform=ax.transAxes)
        return _save(fig, path)


def plot_hits(splits, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        keys = ("hit1", "hit3", "hit10")
        width = 0.8 / max(len(splits), 1)
        for i, sp in enumerate(splits):
            xs = [k + i * width for k in range(len(keys))]
            ax.bar(xs, [sp["metrics"][k] for k in keys], width=width, label=f"split {sp['split_id']}")
        ax.set_xticks([k + 0.4 - width / 2 for k in range(len(keys))], ["Hit@1", "Hit@3", "Hit@10"])
        ax.set_ylabel("%")
        ax.set_ylim(0, 100)
        ax.legend(frameon=False)
        return _save(fig, path)


def render_all(report, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = report["splits"]
    return [
        plot_score_trace(splits, out_dir / "score_trace.png"),
        plot_pso_history(splits, out_dir / "pso_history.png"),
        plot_hits(splits, out_dir / "hits.png"),
    ]
