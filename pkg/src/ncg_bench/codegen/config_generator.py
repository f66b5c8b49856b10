"""
Solver configuration file generator and parser.

Config files are flat ``key=value`` text mirroring SolverConfig field names.
HybridParams fields use a ``hybrid.`` prefix; ``tau``, ``u`` and ``t`` are
also accepted bare. ``#`` starts a comment and blank lines are ignored.
"""

from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ncg_bench.core.directions import HybridParams
from ncg_bench.core.solver import SolverConfig

_HYBRID_PREFIX = "hybrid."
_BARE_HYBRID_KEYS = ("tau", "u", "t")


class ConfigFormatError(ValueError):
    """A config file line cannot be parsed."""

    pass


def _field_types(cls) -> Dict[str, Any]:
    return {f.name: f.default for f in fields(cls)}


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(key: str, raw: str, default: Any) -> Any:
    text = raw.strip()
    if text.lower() == "none":
        return None
    if isinstance(default, bool):
        lowered = text.lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ConfigFormatError(f"'{key}' expects a boolean, got '{raw}'")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError:
            raise ConfigFormatError(f"'{key}' expects an integer, got '{raw}'") from None
    if isinstance(default, float) or default is None:
        try:
            return float(text)
        except ValueError:
            raise ConfigFormatError(f"'{key}' expects a number, got '{raw}'") from None
    return text


class ConfigGenerator:
    """Writes and reads flat solver config files.

    Example output:
        # ncg-bench solver configuration
        method=awhm
        delta=0.0001
        sigma=0.9
        ...
        hybrid.tau=0.4
        hybrid.u=1.1
    """

    def generate(self, config: SolverConfig) -> str:
        """Render ``config`` as key=value lines.

        Args:
            config: Configuration to serialize.

        Returns:
            File content, one field per line.
        """
        lines = ["# ncg-bench solver configuration"]
        for f in fields(SolverConfig):
            if f.name == "hybrid":
                continue
            value = getattr(config, f.name)
            if f.name == "method":
                value = config.method.value
            lines.append(f"{f.name}={_format_value(value)}")
        for f in fields(HybridParams):
            value = getattr(config.hybrid, f.name)
            lines.append(f"{_HYBRID_PREFIX}{f.name}={_format_value(value)}")
        lines.append("")
        return "\n".join(lines)

    def write(self, path: Union[str, Path], config: SolverConfig) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.generate(config))
        return path

    def parse(self, text: str) -> Dict[str, Any]:
        """Parse file content into SolverConfig keyword overrides.

        Hybrid keys are collected into a nested ``hybrid`` dict.

        Raises:
            ConfigFormatError: Malformed line, unknown key or bad value.
        """
        solver_defaults = _field_types(SolverConfig)
        hybrid_defaults = _field_types(HybridParams)
        values: Dict[str, Any] = {}
        hybrid: Dict[str, Any] = {}

        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigFormatError(f"line {lineno}: expected key=value, got '{line}'")
            key, raw = (part.strip() for part in line.split("=", 1))

            if key.startswith(_HYBRID_PREFIX) or key in _BARE_HYBRID_KEYS:
                name = key[len(_HYBRID_PREFIX) :] if key.startswith(_HYBRID_PREFIX) else key
                if name not in hybrid_defaults:
                    raise ConfigFormatError(f"line {lineno}: unknown hybrid key '{key}'")
                hybrid[name] = _parse_value(key, raw, hybrid_defaults[name])
            elif key == "method":
                values["method"] = raw
            elif key in solver_defaults and key != "hybrid":
                values[key] = _parse_value(key, raw, solver_defaults[key])
            else:
                raise ConfigFormatError(f"line {lineno}: unknown key '{key}'")

        if hybrid:
            values["hybrid"] = hybrid
        return values

    def load(
        self, path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None
    ) -> SolverConfig:
        """Build a SolverConfig from a file, then apply ``overrides`` on top."""
        return build_config(self.parse(Path(path).read_text(encoding="utf-8")), overrides)


def build_config(
    values: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None
) -> SolverConfig:
    """Merge file values and command-line overrides into a SolverConfig.

    Override keys follow the same naming as config files; ``None`` values are
    skipped so unset flags keep the file value.
    """
    merged: Dict[str, Any] = dict(values or {})
    hybrid: Dict[str, Any] = dict(merged.pop("hybrid", {}) or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key.startswith(_HYBRID_PREFIX):
            hybrid[key[len(_HYBRID_PREFIX) :]] = value
        elif key in _BARE_HYBRID_KEYS:
            hybrid[key] = value
        else:
            merged[key] = value
    if hybrid:
        merged["hybrid"] = HybridParams(**hybrid)
    return SolverConfig.from_dict(merged)
