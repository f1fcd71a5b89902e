"""Run reports: deterministic text rendering, a JSON mirror, plot tables.

A report is an ordered set of named sections holding scalar values or small
lists. Everything except the timings section renders byte-for-byte
reproducibly from the same inputs, which is what the determinism guarantee
is measured against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

__all__ = ["RunReport", "emit_plot_data"]


def _format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class RunReport:
    """Ordered sections of key/value pairs, with timings kept separate."""

    config: dict[str, object] = field(default_factory=dict)
    sections: list[tuple[str, dict[str, object]]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, name: str, values: dict[str, object]) -> None:
        self.sections.append((name, values))

    def section(self, name: str) -> dict[str, object]:
        for key, values in self.sections:
            if key == name:
                return values
        raise KeyError(name)

    def hashable_text(self) -> str:
        """The reproducible part of the report: everything but timings."""
        lines = ["[config]"]
        for key, value in self.config.items():
            lines.append(f"{key} = {_format_value(value)}")
        for name, values in self.sections:
            lines.append(f"[{name}]")
            for key, value in values.items():
                if isinstance(value, (list, tuple)):
                    lines.append(f"{key}:")
                    for item in value:
                        if isinstance(item, (list, tuple)):
                            lines.append("  - " + " ".join(_format_value(x) for x in item))
                        else:
                            lines.append(f"  - {_format_value(item)}")
                else:
                    lines.append(f"{key} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    def render_text(self) -> str:
        lines = [self.hashable_text().rstrip("\n"), "[timings]"]
        for key, value in self.timings.items():
            lines.append(f"{key} = {value:.6f}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict[str, object]:
        out: dict[str, object] = {"config": self.config}
        for name, values in self.sections:
            out[name] = values
        out["timings"] = self.timings
        return out

    def save(self, base: str) -> None:
        """Write ``<base>.report`` (text) and ``<base>.json`` (mirror)."""
        with open(base + ".report", "w", encoding="utf-8") as fh:
            fh.write(self.render_text())
        with open(base + ".json", "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=False)
            fh.write("\n")


def emit_plot_data(reports: Iterable[RunReport]) -> str:
    """Tab-separated (family, n, epsilon, metric, value) rows, sorted.

    Scalars from every non-timing section become one row each, keyed as
    ``section.key``; non-numeric and missing values are omitted.
    """
    rows: list[tuple[str, str, str, str, str]] = []
    for report in reports:
        family = str(report.config.get("family", "-"))
        n = report.config.get("n", "-")
        eps = report.config.get("epsilon", "-")
        for name, values in report.sections:
            for key, value in values.items():
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    continue
                rows.append(
                    (family, str(n), _format_value(eps), f"{name}.{key}", _format_value(value))
                )
    rows.sort()
    header = "family\tn\tepsilon\tmetric\tvalue"
    return "\n".join([header] + ["\t".join(row) for row in rows]) + "\n"
