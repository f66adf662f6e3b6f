"""Test-by-condition tables of battery results."""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.utilities.io import atomic_write_csv, atomic_write_text

from .battery import BatteryReport


def _tests_in_order(conditions: Mapping[str, BatteryReport]) -> list[RandomnessTest]:
    seen: list[RandomnessTest] = []
    for report in conditions.values():
        for item in report.results:
            if item.test not in seen:
                seen.append(item.test)
    return seen


def battery_table_rows(
    conditions: Mapping[str, BatteryReport],
) -> tuple[list[str], list[list[object]]]:
    header = ["test"]
    for name in conditions:
        header.extend([f"{name}_p", f"{name}_pass"])
    rows: list[list[object]] = []
    for test in _tests_in_order(conditions):
        row: list[object] = [test.value]
        for report in conditions.values():
            item = report.result_for(test)
            if item is None or item.skipped:
                row.extend(["", "skipped"])
            else:
                row.extend([float(item.p_value or 0.0), "pass" if item.passed else "fail"])
        rows.append(row)
    counts: list[object] = ["passed"]
    for report in conditions.values():
        counts.extend([report.passed_count, f"of {report.applicable_count}"])
    rows.append(counts)
    return header, rows


def battery_table_csv(conditions: Mapping[str, BatteryReport], path: str | Path) -> Path:
    header, rows = battery_table_rows(conditions)
    return atomic_write_csv(path, header, rows)


def battery_table_text(conditions: Mapping[str, BatteryReport]) -> str:
    """Aligned table; a failing test shows ``-`` followed by its p-value."""
    names = list(conditions)
    lines = [
        "stream lengths: "
        + ", ".join(f"{name}={report.n}" for name, report in conditions.items())
    ]
    cells: list[list[str]] = [["Test", *names]]
    for test in _tests_in_order(conditions):
        row = [test.value]
        for report in conditions.values():
            item = report.result_for(test)
            if item is None or item.skipped:
                row.append("skipped")
            elif item.passed:
                row.append(f"{item.p_value:.4f}")
            else:
                row.append(f"- ({item.p_value:.4g})")
        cells.append(row)
    cells.append(
        ["Passed", *(f"{r.passed_count}/{r.applicable_count}" for r in conditions.values())]
    )
    widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
    for row in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths, strict=True)).rstrip())
    return "\n".join(lines) + "\n"


def write_battery_text(conditions: Mapping[str, BatteryReport], path: str | Path) -> Path:
    return atomic_write_text(path, battery_table_text(conditions))
