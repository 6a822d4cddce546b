"""Law run reports on disk: a CSV table plus rendered figures.

matplotlib is imported lazily and driven through the Agg backend, so
report writing works headless and importing this module stays cheap.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List

from .laws import SuiteResult

_PASS_COLOR = "#2a7e43"
_FAIL_COLOR = "#b03a2e"
_SKIP_COLOR = "#b8b8b8"


def write_report(result: SuiteResult, out_dir) -> List[Path]:
    """Write laws.csv and the figures into out_dir; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [_write_csv(result, out / "laws.csv")]
    paths.extend(_write_figures(result, out))
    return paths


def _write_csv(result: SuiteResult, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["law", "kind", "verdict", "expected_met",
                         "instances_checked", "skipped", "has_witness", "notes"])
        for r in result.reports:
            writer.writerow([r.law, r.kind, r.verdict, str(r.expected_met).lower(),
                             r.instances_checked, r.skipped,
                             str(r.witness is not None).lower(),
                             "; ".join(r.notes)])
    return path


def _write_figures(result: SuiteResult, out: Path) -> List[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    reports = list(result.reports)
    labels = [r.law for r in reports]
    ys = range(len(reports))

    # instances per law, skipped models stacked in grey
    fig, ax = plt.subplots(figsize=(9, 0.38 * len(reports) + 1.6))
    checked = [r.instances_checked for r in reports]
    skipped = [r.skipped for r in reports]
    colors = [_PASS_COLOR if r.expected_met else _FAIL_COLOR for r in reports]
    ax.barh(ys, checked, color=colors, label="instances checked")
    ax.barh(ys, skipped, left=checked, color=_SKIP_COLOR, label="models skipped")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(labels, fontsize=8, family="monospace")
    ax.invert_yaxis()
    ax.set_xlabel("instances")
    ax.set_title("law instances (seed %d, budget %d)" % (result.seed, result.budget))
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    instances_path = out / "law_instances.png"
    fig.savefig(instances_path, dpi=120)
    plt.close(fig)

    # outcome matrix: verdict and expectation side by side
    fig, ax = plt.subplots(figsize=(5, 0.32 * len(reports) + 1.4))
    for y, r in enumerate(reports):
        ax.barh(y, 1, left=0, color=_PASS_COLOR if r.verdict == "all_pass" else _FAIL_COLOR)
        ax.barh(y, 1, left=1.1, color=_PASS_COLOR if r.expected_met else _FAIL_COLOR)
    ax.set_yticks(list(range(len(reports))))
    ax.set_yticklabels(labels, fontsize=8, family="monospace")
    ax.invert_yaxis()
    ax.set_xticks([0.5, 1.6])
    ax.set_xticklabels(["verdict", "expected met"], fontsize=9)
    ax.set_xlim(-0.05, 2.15)
    ax.set_title("law outcomes")
    for side in ("top", "right", "left", "bottom"):
        ax.spines[side].set_visible(False)
    ax.tick_params(length=0)
    fig.tight_layout()
    outcomes_path = out / "law_outcomes.png"
    fig.savefig(outcomes_path, dpi=120)
    plt.close(fig)

    return [instances_path, outcomes_path]
