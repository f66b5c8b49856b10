"""
Tests for the strong Wolfe-Powell line search.
"""

import numpy as np
import pytest

from ncg_bench.bench.suite import instantiate
from ncg_bench.core.linesearch import (
    LineSearchStatus,
    WolfeParams,
    satisfies_strong_wolfe,
    strong_wolfe_search,
)
from ncg_bench.core.objective import EvalCounters, ObjectiveProblem, evaluate, gradient


def one_dim(f, g, name="phi"):
    return ObjectiveProblem(
        name=name,
        n=1,
        x0=[0.0],
        eval_f=lambda x: f(float(x[0])),
        eval_g=lambda x: np.array([g(float(x[0]))]),
    )


def search(problem, x, d, alpha_init, params=None, counters=None):
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    f0 = evaluate(problem, x)
    g0 = gradient(problem, x)
    return strong_wolfe_search(problem, x, d, f0, g0, alpha_init, params, counters), f0, g0


def assert_strong_wolfe(problem, x, d, f0, g0, alpha, params):
    x_new = np.asarray(x) + alpha * np.asarray(d)
    sufficient, curvature = satisfies_strong_wolfe(
        f0,
        float(np.dot(g0, d)),
        alpha,
        evaluate(problem, x_new),
        float(np.dot(gradient(problem, x_new), d)),
        params.delta,
        params.sigma,
    )
    assert sufficient and curvature


class TestWolfeParams:
    """Parameter validation."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"delta": 0.0},
            {"delta": 0.5},
            {"delta": 0.3, "sigma": 0.2},
            {"sigma": 1.0},
            {"max_evals": 0},
            {"alpha_max": 0.0},
            {"refine_ratio": 1.0},
        ],
    )
    def test_invalid_values_raise(self, kwargs):
        with pytest.raises(ValueError):
            WolfeParams(**kwargs)

    def test_defaults(self):
        params = WolfeParams()
        assert (params.delta, params.sigma) == (1e-4, 0.9)


class TestStrongWolfeSearch:
    """Acceptance, failure paths and evaluation accounting."""

    def test_exact_unit_step_on_half_square(self):
        problem = one_dim(lambda t: 0.5 * t * t, lambda t: t)
        result, _, _ = search(problem, [1.0], [-1.0], 1.0)
        assert result.status is LineSearchStatus.CONVERGED
        assert result.alpha == 1.0
        assert result.f_new == 0.0
        assert result.evals_used == 1

    def test_refinement_finds_exact_minimizer_on_quadratic(self):
        problem = one_dim(lambda t: 0.5 * (t - 2.0) ** 2, lambda t: t - 2.0)
        result, _, _ = search(problem, [0.0], [1.0], 1.0)
        assert result.converged
        assert result.alpha == 2.0
        assert result.evals_used == 2

    def test_without_refinement_first_acceptable_step_is_kept(self):
        problem = one_dim(lambda t: 0.5 * (t - 2.0) ** 2, lambda t: t - 2.0)
        result, _, _ = search(problem, [0.0], [1.0], 1.0, WolfeParams(refine=False))
        assert result.alpha == 1.0
        assert result.evals_used == 1

    @pytest.mark.parametrize("alpha_init", [0.01, 1.0, 3.9, 50.0])
    def test_result_lies_in_grid_scanned_acceptable_set(self, alpha_init):
        problem = one_dim(lambda t: (t - 2.0) ** 2, lambda t: 2.0 * (t - 2.0))
        params = WolfeParams()
        result, f0, g0 = search(problem, [0.0], [1.0], alpha_init, params)
        assert result.converged

        grid = np.round(np.arange(0.0, 4.0 + 1e-12, 1e-4), 4)
        phi = (grid - 2.0) ** 2
        dphi = 2.0 * (grid - 2.0)
        acceptable = (phi <= f0 + params.delta * grid * g0[0]) & (
            np.abs(dphi) <= params.sigma * abs(g0[0])
        )
        lo, hi = grid[acceptable].min(), grid[acceptable].max()
        assert lo - 1e-4 <= result.alpha <= hi + 1e-4
        assert_strong_wolfe(problem, [0.0], [1.0], f0, g0, result.alpha, params)

    def test_non_descent_direction_costs_nothing(self):
        problem = one_dim(lambda t: 0.5 * t * t, lambda t: t)
        counters = EvalCounters()
        result, f0, _ = search(problem, [1.0], [1.0], 1.0, counters=counters)
        assert result.status is LineSearchStatus.NON_DESCENT
        assert result.evals_used == 0
        assert counters.f_evals == 0
        assert result.alpha == 0.0 and result.f_new == f0

    def test_rejects_non_positive_initial_step(self):
        problem = one_dim(lambda t: 0.5 * t * t, lambda t: t)
        with pytest.raises(ValueError):
            search(problem, [1.0], [-1.0], 0.0)

    def test_budget_exhaustion_reports_max_evals(self):
        problem = one_dim(lambda t: 0.5 * t * t, lambda t: t)
        result, f0, _ = search(problem, [1.0], [-1.0], 10.0, WolfeParams(max_evals=1))
        assert result.status is LineSearchStatus.MAX_EVALS
        assert result.alpha == 0.0
        assert result.f_new == f0

    def test_recovers_from_non_finite_trial(self):
        def f(t):
            return (t - 0.5) ** 2 if t < 1.0 else float("inf")

        problem = one_dim(f, lambda t: 2.0 * (t - 0.5))
        result, _, _ = search(problem, [0.0], [1.0], 4.0)
        assert result.converged
        assert result.alpha == 0.5

    def test_all_non_finite_reports_non_finite(self):
        problem = ObjectiveProblem(
            "nan_everywhere",
            1,
            [0.0],
            lambda x: 0.0 if x[0] == 0.0 else float("nan"),
            lambda x: np.array([-1.0]),
        )
        result, _, _ = search(problem, [0.0], [1.0], 1.0)
        assert result.status is LineSearchStatus.NON_FINITE
        assert result.alpha == 0.0

    def test_counters_match_trials(self):
        problem = instantiate("ext_rosenbrock", 2).problem
        x = problem.x0
        g0 = gradient(problem, x)
        counters = EvalCounters()
        result = strong_wolfe_search(
            problem, x, -g0, evaluate(problem, x), g0, 1.0 / np.linalg.norm(g0), None, counters
        )
        assert counters.f_evals == result.evals_used
        assert counters.g_evals == result.evals_used

    def test_accepted_point_matches_returned_values(self):
        problem = instantiate("ext_beale", 2).problem
        x = problem.x0
        g0 = gradient(problem, x)
        result = strong_wolfe_search(problem, x, -g0, evaluate(problem, x), g0, 1.0)
        assert result.converged
        np.testing.assert_array_equal(result.x_new, x + result.alpha * -g0)
        assert result.f_new == evaluate(problem, result.x_new)

    @pytest.mark.parametrize(
        "fid,n", [("ext_rosenbrock", 10), ("ext_white_holst", 2), ("diagonal2", 100)]
    )
    def test_steepest_descent_steps_satisfy_strong_wolfe(self, fid, n):
        problem = instantiate(fid, n).problem
        params = WolfeParams()
        x = problem.x0
        for _ in range(5):
            f0 = evaluate(problem, x)
            g0 = gradient(problem, x)
            result = strong_wolfe_search(problem, x, -g0, f0, g0, 1.0 / np.linalg.norm(g0))
            assert result.converged
            assert_strong_wolfe(problem, x, -g0, f0, g0, result.alpha, params)
            x = result.x_new

    def test_random_quadratics(self, quadratic, fuzz_seed, fuzz_count):
        rng = np.random.default_rng(fuzz_seed)
        params = WolfeParams()
        for _ in range(fuzz_count):
            n = int(rng.integers(2, 8))
            problem = quadratic(rng.uniform(0.1, 10.0, n), rng.normal(size=n))
            x = rng.normal(size=n)
            f0, g0 = evaluate(problem, x), gradient(problem, x)
            d = -g0 + 0.1 * rng.normal(size=n)
            if not np.dot(g0, d) < 0:
                continue
            result = strong_wolfe_search(problem, x, d, f0, g0, float(rng.uniform(1e-3, 10.0)))
            assert result.converged, f"seed {fuzz_seed}"
            assert_strong_wolfe(problem, x, d, f0, g0, result.alpha, params)


class TestSatisfiesStrongWolfe:
    def test_both_conditions(self):
        assert satisfies_strong_wolfe(0.5, -1.0, 1.0, 0.0, 0.0, 1e-4, 0.9) == (True, True)

    def test_insufficient_decrease(self):
        assert satisfies_strong_wolfe(0.5, -1.0, 1.0, 0.5, 0.0, 1e-4, 0.9) == (False, True)

    def test_curvature_is_two_sided(self):
        assert satisfies_strong_wolfe(0.5, -1.0, 1.0, 0.0, 0.95, 1e-4, 0.9) == (True, False)
