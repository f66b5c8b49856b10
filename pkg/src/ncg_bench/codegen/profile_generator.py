"""
Performance-profile document generator.

Emits a set of ProfileCurve objects (sharing one tau grid) as CSV or SVG.
Both outputs are byte-for-byte reproducible for identical curves.
"""

import csv
import io
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

from ncg_bench.profiles.performance import Metric, ProfileCurve

_SVG_RC = {"svg.hashsalt": "ncg-bench", "svg.fonttype": "none"}


class ProfileFormat(Enum):
    CSV = "csv"
    SVG = "svg"


class ProfileGenerator:
    """Generates CSV tables and SVG step plots of performance profiles.

    CSV layout: header ``tau,<solver>...``, one row per grid point, values
    written with 17 significant digits.

    SVG layout: one step curve per solver, tau on a log2 axis, rho in [0, 1],
    legend in the lower right.
    """

    def _check(self, curves: Sequence[ProfileCurve]) -> None:
        if not curves:
            raise ValueError("At least one profile curve is required")
        taus = curves[0].taus
        for curve in curves[1:]:
            if curve.taus.shape != taus.shape or (curve.taus != taus).any():
                raise ValueError(f"Curve '{curve.solver}' uses a different tau grid")

    def generate_csv(self, curves: Sequence[ProfileCurve]) -> str:
        """Render the curves as CSV text."""
        self._check(curves)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau"] + [c.solver for c in curves])
        for i, tau in enumerate(curves[0].taus):
            writer.writerow([f"{tau:.17g}"] + [f"{c.rhos[i]:.17g}" for c in curves])
        return buf.getvalue()

    def generate_svg(
        self, curves: Sequence[ProfileCurve], metric: Optional[Metric] = None
    ) -> str:
        """Render the curves as an SVG document."""
        self._check(curves)
        with rc_context(_SVG_RC):
            fig = Figure(figsize=(6.4, 4.8))
            ax = fig.add_subplot(1, 1, 1)
            for curve in curves:
                ax.step(curve.taus, curve.rhos, where="post", label=curve.solver, lw=1.5)
            ax.set_xscale("log", base=2)
            ax.set_xlim(curves[0].taus[0], curves[0].taus[-1])
            ax.set_ylim(0.0, 1.02)
            ax.set_xlabel(r"$\tau$")
            ax.set_ylabel(r"$\rho_s(\tau)$")
            if metric is not None:
                ax.set_title(f"Performance profile ({metric.title})")
            ax.grid(visible=True, which="both", linestyle="--", linewidth=0.5)
            ax.legend(loc="lower right")
            fig.tight_layout()
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
        return buf.getvalue()

    def generate(
        self,
        curves: Sequence[ProfileCurve],
        fmt: Union[ProfileFormat, str] = ProfileFormat.CSV,
        metric: Optional[Metric] = None,
    ) -> str:
        fmt = ProfileFormat(fmt)
        if fmt is ProfileFormat.CSV:
            return self.generate_csv(curves)
        return self.generate_svg(curves, metric)

    def write(
        self,
        path: Union[str, Path],
        curves: Sequence[ProfileCurve],
        fmt: Union[ProfileFormat, str] = ProfileFormat.CSV,
        metric: Optional[Metric] = None,
    ) -> Path:
        """Generate and write the document to ``path``.

        Returns:
            Path to the written file.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.generate(curves, fmt, metric))
        return path


def read_profile_csv(text: str) -> List[ProfileCurve]:
    """Parse CSV produced by ProfileGenerator back into curves."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    table = np.array([[float(v) for v in row] for row in body]).reshape(len(body), len(header))
    taus = table[:, 0].copy()
    return [ProfileCurve(name, taus, table[:, j].copy()) for j, name in enumerate(header) if j]
