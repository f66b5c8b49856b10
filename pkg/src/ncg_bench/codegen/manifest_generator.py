"""
Run manifest generator.

Every CLI run writes a manifest.json beside its outputs recording the full
solver configuration, the suite selection, the seed, the tool version and a
timestamp. Loading a manifest back gives everything needed to repeat the run.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ncg_bench.core.solver import SolverConfig

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """Reproducibility record of one CLI run.

    Attributes:
        command: Subcommand that produced the run.
        config: Solver configuration snapshot.
        selection: Suite selection (function ids, dims, methods, metric, ...).
        seed: Random seed, if the command uses one.
        version: ncg-bench version.
        timestamp: ISO-8601 creation time.
    """

    command: str
    config: SolverConfig = field(default_factory=SolverConfig)
    selection: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    version: str = ""
    timestamp: str = ""

    def __post_init__(self):
        if isinstance(self.config, dict):
            self.config = SolverConfig.from_dict(self.config)
        if not self.version:
            from ncg_bench import __version__

            self.version = __version__
        if not self.timestamp:
            self.timestamp = datetime.now().isoformat(timespec="seconds")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config.to_dict(),
            "selection": self.selection,
            "seed": self.seed,
            "version": self.version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        missing = [key for key in ("command", "config") if key not in data]
        if missing:
            raise ValueError(f"Manifest is missing {missing}")
        return cls(
            command=data["command"],
            config=SolverConfig.from_dict(dict(data["config"])),
            selection=dict(data.get("selection", {})),
            seed=data.get("seed"),
            version=data.get("version", ""),
            timestamp=data.get("timestamp", ""),
        )


class ManifestGenerator:
    """Writes and loads manifest.json files."""

    def generate(self, manifest: RunManifest) -> str:
        return json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, run_dir: Union[str, Path], manifest: RunManifest) -> Path:
        """Write ``manifest`` as ``<run_dir>/manifest.json``.

        Returns:
            Path to the written file.
        """
        path = Path(run_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.generate(manifest))
        return path

    def load(self, path: Union[str, Path]) -> RunManifest:
        """Load a manifest from a file or from a run directory containing one."""
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        return RunManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))


def selection_list(selection: Dict[str, Any], key: str) -> Optional[List[Any]]:
    """Return ``selection[key]`` as a list, or None when absent."""
    value = selection.get(key)
    if value is None:
        return None
    return list(value) if isinstance(value, (list, tuple)) else [value]
