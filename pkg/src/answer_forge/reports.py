"""Report files: JSON, metrics CSV, PSO history CSV, ranks and score traces."""

import csv
import json
from pathlib import Path

from .errors import ParseError
from .metrics import METRIC_KEYS, aggregate


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_reports(report, out_dir):
    """Write every delimited report for ``report`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    splits = report["splits"]
    paths = {"report": out / "report.json"}
    paths["report"].write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["metrics"] = _write_csv(
        out / "metrics.csv",
        ("split_id",) + METRIC_KEYS,
        [[sp["split_id"]] + [sp["metrics"][k] for k in METRIC_KEYS] for sp in splits],
    )
    history, n = [], 0
    for sp in splits:
        for row in sp["pso_history"]:
            n += 1
            history.append([n, row["best_fitness"], sp["split_id"], row["epoch"]])
    paths["pso_history"] = _write_csv(out / "pso_history.csv", ("iteration", "best_fitness", "split_id", "epoch"), history)
    paths["ranks"] = _write_csv(
        out / "ranks.csv",
        ("split_id", "sample_id", "rank"),
        [[sp["split_id"], r["sample_id"], r["rank"]] for sp in splits for r in sp["per_sample"]],
    )
    trace = []
    for sp in splits:
        trig = {t["epoch"] for t in sp["pso_triggers"]}
        best = float("-inf")
        for epoch, score in enumerate(sp["score_trace"], start=1):
            best = max(best, score)
            trace.append([sp["split_id"], epoch, score, best, int(epoch in trig)])
    paths["score_trace"] = _write_csv(out / "score_trace.csv", ("split_id", "epoch", "score", "s_best", "pso_triggered"), trace)
    return paths


def read_ranks(path):
    """Ranks from a CSV with a ``rank`` column, grouped by ``split_id`` if present."""
    path = Path(path)
    groups = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "rank" not in reader.fieldnames:
            raise ParseError("ranks file needs a 'rank' column", path=path)
        for lineno, row in enumerate(reader, start=2):
            try:
                rank = int(row["rank"])
            except (TypeError, ValueError):
                raise ParseError(f"bad rank {row['rank']!r}", line=lineno, path=path) from None
            if rank < 1:
                raise ParseError(f"rank must be >= 1, got {rank}", line=lineno, path=path)
            key = row.get("split_id") or "all"
            ids, ranks = groups.setdefault(key, ([], []))
            ids.append(row.get("sample_id") or str(len(ids)))
            ranks.append(rank)
    if not groups:
        raise ParseError("ranks file is empty", path=path)
    return {k: aggregate(ranks, sample_ids=ids) for k, (ids, ranks) in groups.items()}
