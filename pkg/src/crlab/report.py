"""Machine-readable run reports: JSON summaries, CSV grids, and rendered
margin figures for the grid-shaped verification campaigns."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class RunReport:
    command: str
    params: dict
    checked: int = 0
    passed: int = 0
    failed: int = 0
    counterexample: str | None = None
    elapsed_ms: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1

    def to_dict(self) -> dict:
        doc = {
            "command": self.command,
            "params": self.params,
            "checked": self.checked,
            "passed": self.passed,
            "failed": self.failed,
            "elapsed_ms": self.elapsed_ms,
        }
        if self.counterexample is not None:
            doc["counterexample"] = self.counterexample
        doc.update(self.extra)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


NORM_CSV_COLUMNS = ["lambda", "i", "k", "clause", "lhs", "rhs", "pass", "note"]


def norm_rows_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(NORM_CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [str(r.lam), str(r.drop), r.k, r.clause, repr(r.lhs), repr(r.rhs),
                 int(r.ok), r.note]
            )


HALVING_CSV_COLUMNS = ["lambda", "i", "k", "kind", "lhs", "rhs", "pass", "note"]


def halving_rows_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HALVING_CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [str(r.lam), str(r.drop), r.k, r.kind, repr(r.lhs), repr(r.rhs),
                 int(r.ok), r.note]
            )


def render_margin_figure(rows, path, title: str, group_key) -> None:
    """One scatter of lhs - rhs margins per group, written as a PNG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups: dict = {}
    for r in rows:
        groups.setdefault(group_key(r), []).append(r.lhs - r.rhs)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label in sorted(groups, key=str):
        margins = groups[label]
        ax.scatter(range(len(margins)), margins, s=6, label=str(label), alpha=0.6)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("grid point")
    ax.set_ylabel("margin (lhs - rhs)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
