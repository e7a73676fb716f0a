"""
CSV output for trajectories and plot data.

Every float is written with repr() so a file read back gives the same
numbers bit for bit. An empty input still produces the header row.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)

FRAME_CURVATURE_FIELDS = ["t", "value", "predicted", "relative_error"]
K_GEODESIC_FIELDS = ["t", "x", "y", "x_closed_form", "flag"]


class CSVManager:
    """Loads and saves lists of row dictionaries."""

    def load_dicts(self, path: Path) -> list[dict]:
        """
        Load a CSV file as a list of dictionaries.

        Returns an empty list if the file doesn't exist.
        """
        if not path.exists():
            logger.warning("CSV file not found: %s", path)
            return []
        with open(path, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))

    def save_dicts(self, path: Path, rows: Iterable[dict], fieldnames: list[str]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = list(rows)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        logger.info("Saved CSV: %s (%d rows)", path, len(rows))

    # ------------------------------------------------------------------
    # Typed writers
    # ------------------------------------------------------------------

    def save_trajectory(self, path: Path, trajectory) -> None:
        self.save_dicts(path, trajectory.to_rows(), trajectory.fieldnames)

    def save_frame_curvature(self, path: Path, samples) -> None:
        rows = [
            {
                "t": repr(s.t),
                "value": repr(s.value),
                "predicted": repr(s.predicted),
                "relative_error": repr(s.relative_error),
            }
            for s in samples
        ]
        self.save_dicts(path, rows, FRAME_CURVATURE_FIELDS)

    def save_k_geodesic(self, path: Path, geodesic, k: float) -> None:
        closed = geodesic.closed_form(k)
        last = len(geodesic.t) - 1
        rows = [
            {
                "t": repr(float(t)),
                "x": repr(float(x)),
                "y": repr(float(y)),
                "x_closed_form": repr(float(c)),
                "flag": geodesic.flag if i == last else "ok",
            }
            for i, (t, x, y, c) in enumerate(zip(geodesic.t, geodesic.x, geodesic.y, closed[0]))
        ]
        self.save_dicts(path, rows, K_GEODESIC_FIELDS)
