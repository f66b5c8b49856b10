"""
Tests for config files, run manifests and trace CSV output.
"""

import json

import pytest

from ncg_bench import __version__
from ncg_bench.bench.suite import instantiate
from ncg_bench.codegen.config_generator import ConfigFormatError, ConfigGenerator, build_config
from ncg_bench.codegen.manifest_generator import (
    MANIFEST_NAME,
    ManifestGenerator,
    RunManifest,
    selection_list,
)
from ncg_bench.codegen.trace_generator import TRACE_COLUMNS, TraceGenerator, read_trace_csv
from ncg_bench.core.directions import HybridParams
from ncg_bench.core.solver import Method, SolverConfig, solve_traced


class TestConfigGenerator:
    """key=value solver config files."""

    def test_generated_file_reloads_to_same_config(self, tmp_path):
        config = SolverConfig(
            method="nhs",
            sigma=0.45,
            max_iter=250,
            refine=False,
            hybrid=HybridParams(tau=0.25, theta_override=0.5),
        )
        generator = ConfigGenerator()
        path = generator.write(tmp_path / "solver.cfg", config)
        assert generator.load(path) == config

    def test_generated_layout(self):
        lines = ConfigGenerator().generate(SolverConfig()).splitlines()
        assert lines[0].startswith("#")
        assert "method=awhm" in lines
        assert "refine=true" in lines
        assert "hybrid.theta_override=none" in lines

    def test_parse_comments_and_bare_hybrid_keys(self):
        text = "# tuned\nmethod = hrm  # inline\n\ntau=0.3\nhybrid.u=1.5\nmax_iter=50\n"
        values = ConfigGenerator().parse(text)
        assert values == {"method": "hrm", "max_iter": 50, "hybrid": {"tau": 0.3, "u": 1.5}}

    @pytest.mark.parametrize(
        "text,match",
        [
            ("method awhm", "key=value"),
            ("gamma=1", "unknown key"),
            ("hybrid.kappa=1", "unknown hybrid key"),
            ("max_iter=ten", "integer"),
            ("refine=maybe", "boolean"),
            ("sigma=high", "number"),
        ],
    )
    def test_parse_errors(self, text, match):
        with pytest.raises(ConfigFormatError, match=match):
            ConfigGenerator().parse(text)

    def test_overrides_win_and_none_is_skipped(self):
        values = {"method": "nhs", "epsilon": 1e-4, "hybrid": {"tau": 0.3}}
        overrides = {"method": None, "epsilon": 1e-8, "hybrid.t": 2.0, "u": 1.2}
        config = build_config(values, overrides)
        assert config.method is Method.NHS
        assert config.epsilon == 1e-8
        assert config.hybrid == HybridParams(tau=0.3, u=1.2, t=2.0)

    def test_invalid_value_is_rejected_by_config(self):
        with pytest.raises(ValueError):
            build_config({"sigma": 2.0})


class TestManifestGenerator:
    """manifest.json beside every run."""

    def test_round_trip(self, tmp_path):
        manifest = RunManifest(
            "bench",
            SolverConfig(method="hrm"),
            {"methods": ["hrm"], "dims": [2, 10]},
            seed=3,
        )
        path = ManifestGenerator().write(tmp_path, manifest)
        assert path.name == MANIFEST_NAME
        loaded = ManifestGenerator().load(tmp_path)
        assert loaded == manifest
        assert loaded.version == __version__
        assert loaded.timestamp

    def test_written_json_is_sorted(self, tmp_path):
        path = ManifestGenerator().write(tmp_path, RunManifest("solve"))
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)
        assert data["config"]["method"] == "awhm"

    def test_dict_config_is_converted(self):
        manifest = RunManifest("solve", {"method": "fr"})
        assert manifest.config.method is Method.FR

    def test_missing_fields(self):
        with pytest.raises(ValueError, match="config"):
            RunManifest.from_dict({"command": "solve"})

    def test_selection_list(self):
        assert selection_list({"dims": [2, 10]}, "dims") == [2, 10]
        assert selection_list({"dims": 2}, "dims") == [2]
        assert selection_list({}, "dims") is None


class TestTraceGenerator:
    def test_rows_match_trace(self, tmp_path):
        result = solve_traced(instantiate("ext_rosenbrock", 2).problem)
        path = TraceGenerator().write(tmp_path / "traces" / "trace.csv", result.trace)
        text = path.read_text()
        assert text.splitlines()[0] == ",".join(TRACE_COLUMNS)
        rows = read_trace_csv(text)
        assert len(rows) == result.iterations
        for row, record in zip(rows, result.trace):
            assert row["k"] == record.k
            assert row["f"] == record.f
            assert row["alpha"] == record.alpha
            assert row["restarted"] == int(record.restarted)

    def test_empty_trace_has_header_only(self):
        assert TraceGenerator().generate([]) == ",".join(TRACE_COLUMNS) + "\n"
