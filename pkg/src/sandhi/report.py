"""Evaluation reports and the figures rendered alongside them.

Every report path writes machine-readable output (CSV/JSON) first and a
matplotlib PNG next to it: loss curves for training runs, accuracy bars
for evaluations. The PNG is a convenience view, never the source of
truth.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

MAX_FAILURE_SAMPLES = 50


@dataclass
class MetricResult:
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {"correct": self.correct, "total": self.total, "accuracy": self.accuracy}


@dataclass
class EvalReport:
    kind: str
    metrics: dict[str, MetricResult]
    failures: list[dict] = field(default_factory=list)

    @property
    def primary(self) -> MetricResult:
        return next(iter(self.metrics.values()))

    def add_failure(self, sample: dict) -> None:
        if len(self.failures) < MAX_FAILURE_SAMPLES:
            self.failures.append(sample)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "metrics": {name: m.to_dict() for name, m in self.metrics.items()},
            "failures": self.failures,
        }

    def table(self) -> str:
        width = max(len(name) for name in self.metrics)
        lines = [f"{'metric'.ljust(width)}  correct  total  accuracy"]
        for name, m in self.metrics.items():
            lines.append(f"{name.ljust(width)}  {m.correct:7d}  {m.total:5d}  {m.accuracy:8.4f}")
        return "\n".join(lines)


def write_report(report: EvalReport, json_path: str | Path,
                 failures_path: str | Path | None = None) -> None:
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    if failures_path is not None:
        with open(failures_path, "w", encoding="utf-8") as fh:
            json.dump(report.failures, fh, indent=2)
            fh.write("\n")


def write_history_csv(history: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss"])
        for row in history:
            val = "" if row["val_loss"] is None else f"{row['val_loss']:.6f}"
            writer.writerow([row["epoch"], f"{row['train_loss']:.6f}", val])


def render_history_figure(history: list[dict], path: str | Path, title: str = "") -> None:
    epochs = [row["epoch"] for row in history]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, [row["train_loss"] for row in history], label="train")
    if any(row["val_loss"] is not None for row in history):
        ax.plot(epochs, [row["val_loss"] for row in history], label="validation")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_eval_figure(report: EvalReport, path: str | Path) -> None:
    names = list(report.metrics)
    values = [report.metrics[n].accuracy for n in names]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bars = ax.bar(names, values, color="#4878cf")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("accuracy")
    ax.set_title(f"{report.kind} evaluation")
    for bar, value in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, value + 0.01, f"{value:.3f}",
                ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
