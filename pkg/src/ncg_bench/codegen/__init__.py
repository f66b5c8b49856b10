"""
Output generators for ncg-bench.

- profile_generator: performance profile curves -> CSV / SVG
- manifest_generator: run configuration -> manifest.json
- config_generator: SolverConfig <-> flat key=value config files
- trace_generator: iteration traces -> CSV
"""

from ncg_bench.codegen.config_generator import ConfigGenerator
from ncg_bench.codegen.manifest_generator import ManifestGenerator, RunManifest
from ncg_bench.codegen.profile_generator import ProfileFormat, ProfileGenerator
from ncg_bench.codegen.trace_generator import TraceGenerator

__all__ = [
    "ConfigGenerator",
    "ManifestGenerator",
    "RunManifest",
    "ProfileFormat",
    "ProfileGenerator",
    "TraceGenerator",
]
