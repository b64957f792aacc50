"""Structured run reports: self-describing JSON, human-readable when pretty.

Probabilities are emitted in both log and linear scale at 15 significant
digits; every report echoes the full effective configuration, so a run is
reproducible from its report alone.  Reports are deterministic byte for
byte given the same configuration and seed (keys sorted, no timestamps).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__

STRUCTURE_TABLE_CAP = 100
_RENORMALIZATION_TOL = 1e-9


def sig(x: float) -> float:
    """Round to 15 significant digits (the report's stated precision)."""
    if not math.isfinite(x):
        return x
    return float(f"{x:.14e}")


def prob_entry(log_value: float) -> dict:
    return {"log": sig(float(log_value)), "linear": sig(math.exp(log_value))}


def classification_report(
    config: dict,
    result,
    class_labels=None,
) -> dict:
    """Assemble the report dict for any classifier result object."""
    report: dict = {
        "format": "predclass-classification-report",
        "version": __version__,
        "config": config,
    }
    labels = None
    if class_labels is not None:
        labels = [v.item() if hasattr(v, "item") else v for v in class_labels]

    def as_label(c: int):
        return labels[c - 1] if labels else c

    if hasattr(result, "log_posteriors"):
        table = np.asarray(result.log_posteriors, dtype=float)
        report["items"] = [
            {
                "item": i + 1,
                "posterior": [prob_entry(v) for v in row],
                "argmax": as_label(result.labels[i]),
            }
            for i, row in enumerate(table)
        ]
        report["argmax_labels"] = [as_label(c) for c in result.labels]
    if hasattr(result, "implied_structure") and result.implied_structure:
        report["implied_structure"] = [as_label(c) for c in result.implied_structure]
        report["log_product_predictive"] = sig(result.log_product_predictive)
    joint = getattr(result, "joint", None) or getattr(result, "posterior", None)
    if joint is not None:
        order = np.argsort(joint.log_unnormalized)[::-1][:STRUCTURE_TABLE_CAP]
        report["structures"] = {
            "total": len(joint.structures),
            "shown": int(len(order)),
            "table": [
                {
                    "structure": [as_label(c) for c in joint.structures[i]],
                    "log_unnormalized": sig(float(joint.log_unnormalized[i])),
                    "posterior": prob_entry(float(joint.log_posterior[i])),
                }
                for i in order
            ],
        }
    if hasattr(result, "best"):
        report["argmax_structures"] = [[as_label(c) for c in s] for s in result.best]
        report["canonical_structure"] = [as_label(c) for c in result.canonical]
    return report


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def parse_report(path) -> dict:
    """Read a report back, checking that emitted posteriors renormalize to 1."""
    report = json.loads(Path(path).read_text())
    for item in report.get("items", []):
        total = sum(entry["linear"] for entry in item["posterior"])
        if abs(total - 1.0) > _RENORMALIZATION_TOL:
            raise ValueError(
                f"item {item['item']} posterior sums to {total}, not 1"
            )
    structures = report.get("structures")
    if structures and structures["shown"] == structures["total"]:
        total = sum(row["posterior"]["linear"] for row in structures["table"])
        if abs(total - 1.0) > _RENORMALIZATION_TOL:
            raise ValueError(f"structure posterior sums to {total}, not 1")
    return report
