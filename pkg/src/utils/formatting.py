"""
Output Formatting
=================
Locale-independent number formatting and CSV writers for machine outputs.
"""

import csv
import io
from typing import Iterable, Optional, Sequence


def fmt(value: Optional[float]) -> str:
    """Format a float with 9 significant digits ('' for None)."""
    if value is None:
        return ""
    return f"{value:.9g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Render rows as CSV text with '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_text(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as file:
        file.write(text)
