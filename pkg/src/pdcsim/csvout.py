"""Deterministic CSV serialization.

Comma separator, ``.`` decimal point, one header row, Unix newlines,
and 17 significant digits so every double round-trips exactly.  Output
is written to a temporary file and atomically renamed, so a failing run
leaves no partial CSV behind.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Sequence


def format_number(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(format_number(cell) for cell in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
