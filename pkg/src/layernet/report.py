"""Report files for one topology: delimited tables plus rendered charts.

`write_report` drops five files into a directory:

  rules.csv       per-member rule counts by function
  stages.csv      per-machine stage counts, unfused vs fused, plus the
                  flattened single-table estimate
  properties.csv  verdict of every declared property check
  rule_counts.png bar chart of rules per member
  stage_counts.png grouped bars, unfused vs fused stages per machine

CSV content is deterministic; the charts are drawn with the Agg backend so
no display is needed.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import fusion, verify
from .model import Topology

REPORT_FILES = (
    "rules.csv",
    "stages.csv",
    "properties.csv",
    "rule_counts.png",
    "stage_counts.png",
)


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _rule_rows(topology: Topology) -> list[list[object]]:
    rows: list[list[object]] = []
    for (network_id, name), tables in sorted(topology.tables.items()):
        rows.append(
            [
                network_id,
                name,
                len(tables.transmit),
                len(tables.send),
                len(tables.forward),
                len(tables.acquire),
                len(tables.receive),
                tables.rule_count(),
            ]
        )
    return rows


def _stage_rows(stats: fusion.RuleStats) -> list[list[object]]:
    rows: list[list[object]] = []
    for machine_id, machine in sorted(stats.machines.items()):
        rows.append(
            [
                machine_id,
                machine.unfused_stages,
                machine.fused_stages,
                machine.flattened_rules,
                ";".join(machine.assumptions),
            ]
        )
    return rows


def _property_rows(results: list[verify.PropertyResult]) -> list[list[object]]:
    rows: list[list[object]] = []
    for result in results:
        first = result.witnesses[0].render() if result.witnesses else ""
        rows.append(
            [result.name, result.kind, result.network_id, result.verdict, len(result.witnesses), first]
        )
    return rows


def _bar_chart(path: Path, labels: list[str], series: dict[str, list[int]], title: str, ylabel: str) -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(labels) + 2), 3.5))
    width = 0.8 / max(1, len(series))
    for i, (name, values) in enumerate(series.items()):
        offsets = [x + i * width for x in range(len(labels))]
        ax.bar(offsets, values, width=width, label=name)
    ax.set_xticks([x + width * (len(series) - 1) / 2 for x in range(len(labels))])
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(topology: Topology, out_dir: str | Path) -> list[str]:
    """Write all report files; returns their names in a fixed order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rule_rows = _rule_rows(topology)
    _write_csv(
        out / "rules.csv",
        ["network", "member", "transmit", "send", "forward", "acquire", "receive", "total"],
        rule_rows,
    )

    stats = fusion.rule_stats(topology)
    _write_csv(
        out / "stages.csv",
        ["machine", "unfused_stages", "fused_stages", "flattened_rules", "assumptions"],
        _stage_rows(stats),
    )

    results = verify.run_checks(topology)
    _write_csv(
        out / "properties.csv",
        ["name", "kind", "network", "verdict", "witnesses", "first_witness"],
        _property_rows(results),
    )

    _bar_chart(
        out / "rule_counts.png",
        [f"{r[0]}.{r[1]}" for r in rule_rows],
        {"rules": [int(r[7]) for r in rule_rows]},
        "Rules per member",
        "rules",
    )

    machines = sorted(stats.machines)
    _bar_chart(
        out / "stage_counts.png",
        machines,
        {
            "unfused": [stats.machines[m].unfused_stages for m in machines],
            "fused": [stats.machines[m].fused_stages for m in machines],
        },
        "Pipeline stages per machine",
        "stages",
    )
    return list(REPORT_FILES)
