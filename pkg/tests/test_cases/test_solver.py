"""
Tests for the conjugate gradient solver, its configuration and the run validators.
"""

import numpy as np
import pytest

from ncg_bench.bench.suite import instantiate
from ncg_bench.core.directions import HybridParams
from ncg_bench.core.objective import DimensionMismatch, ObjectiveProblem
from ncg_bench.core.solver import (
    Method,
    SolverConfig,
    SolveStatus,
    solve,
    solve_traced,
)
from ncg_bench.core.validators import AuditReport, StepAuditor, TraceValidator


class TestMethod:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("awhm", Method.AWHM),
            ("AWHM", Method.AWHM),
            ("prp", Method.PRP),
            ("steepest-descent", Method.SD),
            (Method.HS, Method.HS),
        ],
    )
    def test_parse(self, raw, expected):
        assert Method.parse(raw) is expected

    def test_parse_unknown_lists_choices(self):
        with pytest.raises(ValueError, match="awhm"):
            Method.parse("bfgs")


class TestSolverConfig:
    def test_defaults(self, solver_config):
        assert solver_config.method is Method.AWHM
        assert (solver_config.delta, solver_config.sigma) == (1e-4, 0.9)
        assert solver_config.epsilon == 1e-6
        assert solver_config.nu == 0.2
        assert solver_config.hybrid == HybridParams()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": 0.0},
            {"max_iter": 0},
            {"nu": 0.0},
            {"delta": 0.6},
            {"sigma": 1e-5},
            {"max_evals": 0},
            {"method": "newton"},
        ],
    )
    def test_invalid_values_raise(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_dict_round_trip(self):
        config = SolverConfig(method="nhs", epsilon=1e-8, hybrid=HybridParams(tau=0.3))
        data = config.to_dict()
        assert data["method"] == "nhs"
        assert data["hybrid"]["tau"] == 0.3
        assert SolverConfig.from_dict(data) == config

    def test_from_dict_rejects_unknown_fields(self):
        with pytest.raises(ValueError, match="bogus"):
            SolverConfig.from_dict({"bogus": 1})


class TestSolve:
    """Terminal states and hand-checked runs."""

    def test_half_norm_converges_in_one_step(self, quadratic):
        problem = quadratic([1.0, 1.0], [0.0, 0.0], x0=np.array([3.0, 4.0]))
        result = solve_traced(problem, SolverConfig())
        assert result.status is SolveStatus.GRADIENT_CONVERGED
        assert result.iterations == 1
        np.testing.assert_array_equal(result.x_final, [0.0, 0.0])
        assert result.trace[0].alpha_trial == pytest.approx(0.2, rel=1e-15)
        assert result.trace[0].alpha == 1.0
        assert result.counters.f_evals == 3

    def test_start_at_minimizer_takes_no_steps(self):
        problem = instantiate("sum_squares", 10).problem
        result = solve(problem, x_start=np.zeros(10))
        assert result.converged
        assert result.iterations == 0
        assert result.counters.to_dict() == {"f_evals": 1, "g_evals": 1}

    @pytest.mark.parametrize("method", ["fr", "prp", "hs"])
    def test_quadratic_terminates_in_dimension_steps(self, quadratic, method):
        problem = quadratic([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        result = solve(problem, SolverConfig(method=method, epsilon=1e-8))
        assert result.converged
        assert result.iterations <= 4
        np.testing.assert_allclose(result.x_final, [1.0, 0.5, 1.0 / 3.0], atol=1e-7)

    def test_diagonal_quadratic_reaches_exact_minimum(self, quadratic):
        diag = np.arange(1.0, 11.0)
        b = np.random.default_rng(0).standard_normal(10)
        result = solve(quadratic(diag, b), SolverConfig(epsilon=1e-8))
        assert result.converged
        assert result.iterations <= 100
        assert result.g_norm_final <= 1e-8
        f_star = -0.5 * float(np.dot(b, np.linalg.solve(np.diag(diag), b)))
        assert abs(result.f_final - f_star) <= 1e-10

    def test_max_iterations(self):
        problem = instantiate("ext_rosenbrock", 10).problem
        result = solve(problem, SolverConfig(max_iter=1))
        assert result.status is SolveStatus.MAX_ITERATIONS
        assert result.iterations == 1

    def test_non_finite_start(self):
        problem = ObjectiveProblem("nan", 2, [0.0, 0.0], lambda x: float("nan"), lambda x: x)
        result = solve(problem)
        assert result.status is SolveStatus.NON_FINITE
        assert result.iterations == 0

    def test_wrong_start_length_raises(self):
        problem = instantiate("sum_squares", 3).problem
        with pytest.raises(DimensionMismatch):
            solve(problem, x_start=np.zeros(4))

    @pytest.mark.parametrize(
        "status,code",
        [
            (SolveStatus.GRADIENT_CONVERGED, 0),
            (SolveStatus.MAX_ITERATIONS, 2),
            (SolveStatus.LINE_SEARCH_FAILED, 3),
            (SolveStatus.NON_FINITE, 4),
        ],
    )
    def test_exit_codes(self, status, code):
        assert status.exit_code == code

    @pytest.mark.parametrize("method", ["awhm", "hrm", "nhs", "prp"])
    @pytest.mark.parametrize("fid", ["ext_rosenbrock", "ext_beale", "diagonal2"])
    def test_converges_on_small_problems(self, method, fid):
        problem = instantiate(fid, 10).problem
        result = solve(problem, SolverConfig(method=method))
        assert result.converged, str(result)
        assert result.g_norm_final <= 1e-6

    def test_steepest_descent_on_quadratic(self, quadratic):
        problem = quadratic([1.0, 4.0], [2.0, -4.0])
        result = solve(problem, SolverConfig(method="sd"))
        assert result.converged
        np.testing.assert_allclose(result.x_final, [2.0, -1.0], atol=1e-5)

    def test_result_dict(self):
        result = solve(instantiate("sum_squares", 2).problem)
        data = result.to_dict(include_x=False)
        assert "x_final" not in data
        assert data["status"] == "gradient_converged"
        assert data["problem"] == "sum_squares-2"
        assert set(result.to_dict()) - set(data) == {"x_final"}


class TestTrace:
    """Per-iteration records and the invariants they carry."""

    def test_trace_length_matches_iterations(self):
        result = solve_traced(instantiate("ext_rosenbrock", 2).problem)
        assert len(result.trace) == result.iterations
        assert [rec.k for rec in result.trace] == list(range(result.iterations))

    def test_untraced_solve_has_no_trace(self):
        assert solve(instantiate("ext_rosenbrock", 2).problem).trace is None

    def test_every_direction_is_descent(self):
        result = solve_traced(instantiate("ext_white_holst", 10).problem)
        assert all(rec.gTd < 0 for rec in result.trace)
        assert result.min_descent_ratio > 0

    def test_first_record_is_steepest_descent(self):
        result = solve_traced(instantiate("ext_beale", 2).problem, keep_iterates=True)
        first = result.trace[0]
        assert first.beta == 0.0
        assert first.alpha_trial == pytest.approx(1.0 / first.g_norm, rel=1e-15)
        np.testing.assert_array_equal(first.x, instantiate("ext_beale", 2).problem.x0)

    @pytest.mark.parametrize("method", ["awhm", "nhs", "hrm", "prp"])
    def test_trace_validator_passes(self, method):
        problem = instantiate("ext_rosenbrock", 10).problem
        result = solve_traced(problem, SolverConfig(method=method), keep_iterates=True)
        report = TraceValidator().validate(result)
        assert report.passed, report.error
        assert report.steps == result.iterations

    def test_step_auditor_passes(self):
        auditor = StepAuditor()
        result = solve(instantiate("gen_tridiagonal1", 100).problem, callback=auditor)
        assert auditor.report.passed, auditor.report.error
        assert auditor.report.steps == result.iterations

    def test_callback_does_not_change_counters(self):
        problem = instantiate("ext_rosenbrock", 2).problem
        plain = solve(problem)
        audited = solve(problem, callback=StepAuditor())
        assert plain.counters.to_dict() == audited.counters.to_dict()
        np.testing.assert_array_equal(plain.x_final, audited.x_final)

    def test_trace_row_columns(self):
        result = solve_traced(instantiate("booth", 2).problem)
        row = result.trace[0].to_row()
        assert list(row) == [
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
        ]
        assert row["restarted"] in (0, 1)

    def test_restarted_records_carry_zero_beta(self):
        # nu this small makes the restart test fire on almost every step
        config = SolverConfig(nu=1e-8, max_iter=50)
        result = solve_traced(instantiate("ext_rosenbrock", 10).problem, config)
        restarted = [rec for rec in result.trace if rec.restarted]
        assert restarted
        assert all(rec.beta == 0.0 for rec in restarted)

    def test_zero_direction_falls_back_to_steepest_descent(self, monkeypatch):
        monkeypatch.setattr("ncg_bench.core.solver.restart_check", lambda g, g_old, nu: False)
        monkeypatch.setattr(
            "ncg_bench.core.solver.direction", lambda g, beta, d_old: np.zeros_like(g)
        )
        problem = instantiate("ext_rosenbrock", 2).problem
        result = solve_traced(problem, SolverConfig(max_iter=5), keep_iterates=True)
        assert result.status in (SolveStatus.MAX_ITERATIONS, SolveStatus.GRADIENT_CONVERGED)
        assert len(result.trace) >= 2
        for rec in result.trace[1:]:
            assert rec.restarted and rec.fallback
            assert rec.beta == 0.0
            assert rec.alpha_trial == pytest.approx(1.0 / rec.g_norm, rel=1e-15)
        report = TraceValidator().validate(result)
        assert report.passed, report.error


ENDPOINT_PROBLEMS = [
    ("ext_rosenbrock", 10),
    ("ext_beale", 10),
    ("diagonal2", 100),
    ("ext_white_holst", 10),
    ("perturbed_quadratic", 100),
]


class TestThetaOverride:
    """Fixed theta reproduces the endpoint rules."""

    @pytest.mark.parametrize("fid,n", ENDPOINT_PROBLEMS)
    @pytest.mark.parametrize("theta,method", [(0.0, "nhs"), (1.0, "hrm")])
    def test_endpoint_reproduces_single_rule_iterates(self, fid, n, theta, method):
        problem = instantiate(fid, n).problem
        fixed_config = SolverConfig(hybrid=HybridParams(theta_override=theta))
        fixed = solve_traced(problem, fixed_config, keep_iterates=True)
        single = solve_traced(problem, SolverConfig(method=method), keep_iterates=True)
        assert fixed.iterations == single.iterations
        for a, b in zip(fixed.trace, single.trace):
            np.testing.assert_allclose(a.x, b.x, rtol=0.0, atol=1e-12)
        np.testing.assert_allclose(fixed.x_final, single.x_final, rtol=0.0, atol=1e-12)

    def test_interior_theta_converges(self):
        problem = instantiate("ext_rosenbrock", 10).problem
        result = solve_traced(problem, SolverConfig(hybrid=HybridParams(theta_override=0.5)))
        assert result.converged
        assert all(rec.theta in (0.0, 0.5, 1.0) for rec in result.trace)


class TestAuditReport:
    def test_merge_accumulates(self):
        first = AuditReport(steps=3, min_descent_ratio=0.5)
        second = AuditReport(steps=2, wolfe_violations=1, min_descent_ratio=0.1, messages=["x"])
        first.merge(second)
        assert first.steps == 5
        assert first.min_descent_ratio == 0.1
        assert not first.passed
        assert first.error == "x"

    def test_empty_report_passes(self):
        report = AuditReport()
        assert report.passed
        assert report.to_dict()["min_descent_ratio"] is None
