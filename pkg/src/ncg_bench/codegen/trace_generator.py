"""
Iteration trace CSV generator.

One row per accepted step with the columns of IterationRecord.to_row();
floats are written with 17 significant digits so traces compare bitwise.
"""

import csv
import io
from pathlib import Path
from typing import List, Sequence, Union

from ncg_bench.core.solver import IterationRecord

TRACE_COLUMNS = (
    "k",
    "f",
    "g_norm",
    "alpha",
    "beta",
    "theta",
    "gTd",
    "restarted",
    "alpha_trial",
    "d_norm",
)


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


class TraceGenerator:
    """Writes solver traces as CSV."""

    def generate(self, trace: Sequence[IterationRecord]) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in trace:
            row = record.to_row()
            writer.writerow([_cell(row[c]) for c in TRACE_COLUMNS])
        return buf.getvalue()

    def write(self, path: Union[str, Path], trace: Sequence[IterationRecord]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.generate(trace))
        return path


def read_trace_csv(text: str) -> List[dict]:
    """Parse a trace CSV back into dicts of floats (k and restarted as ints)."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {c: float(raw[c]) for c in TRACE_COLUMNS}
        row["k"] = int(raw["k"])
        row["restarted"] = int(raw["restarted"])
        rows.append(row)
    return rows
