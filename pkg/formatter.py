# formatter.py

"""
Output formatters for bound, verification and sweep reports.

A report is any object with `to_dict()` and `table()` returning
(title, headers, rows); plain mappings are shown as field/value tables.
"""

import json
import logging
from typing import Any, List, Mapping, Tuple

from rich.console import Console
from rich.table import Table
from tabulate import tabulate

logger = logging.getLogger(__name__)


def report_table(report: Any) -> Tuple[str, List[str], List[List[Any]]]:
    if isinstance(report, Mapping):
        return "Result", ["Field", "Value"], [[key, value] for key, value in report.items()]
    return report.table()


def report_dict(report: Any) -> Any:
    if isinstance(report, Mapping):
        return dict(report)
    return report.to_dict()


class BaseFormatter:
    """Base formatter interface."""

    def format(self, report: Any) -> str:
        """Format a report and return it as a string."""
        raise NotImplementedError


class RichTableFormatter(BaseFormatter):
    """Rich table formatter for console output."""

    def __init__(self):
        self.console = Console()

    def format(self, report: Any) -> str:
        """Print the report as a Rich table and return an empty string."""
        title, headers, rows = report_table(report)
        table = Table(
            title=title,
            show_header=True,
            header_style="bold cyan",
            border_style="bright_blue",
            title_style="bold magenta",
        )
        for k, header in enumerate(headers):
            table.add_column(str(header), style="yellow" if k == 0 else "white", no_wrap=(k == 0))
        for row in rows:
            table.add_row(*[str(cell) for cell in row])
        if not rows:
            table.caption = "nothing to report"

        self.console.print(table)
        return ""


class SimpleFormatter(BaseFormatter):
    """Plain text tables."""

    def format(self, report: Any) -> str:
        title, headers, rows = report_table(report)
        lines = [title, "=" * max(len(title), 20)]
        if rows:
            lines.append(tabulate(rows, headers=headers, tablefmt="simple"))
        else:
            lines.append("(nothing to report)")
        return "\n".join(lines)


class JSONFormatter(BaseFormatter):
    """JSON formatter for structured output."""

    def format(self, report: Any) -> str:
        return json.dumps(report_dict(report), indent=2)


class FormatterFactory:
    """Factory to create appropriate formatters."""

    @staticmethod
    def create(format_type: str) -> BaseFormatter:
        """Create formatter based on format type."""
        if format_type == "json":
            return JSONFormatter()
        elif format_type == "simple":
            return SimpleFormatter()
        else:  # default to rich
            return RichTableFormatter()
