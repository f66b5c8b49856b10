"""
pytest configuration and fixtures for ncg-bench.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add framework src path first
_FRAMEWORK_ROOT = Path(__file__).parent.parent
_SRC_PATH = _FRAMEWORK_ROOT / "src"
if _SRC_PATH.exists() and str(_SRC_PATH) not in sys.path:
    sys.path.insert(0, str(_SRC_PATH))

from ncg_bench.bench.functions import DEFAULT_DIMS
from ncg_bench.core.objective import ObjectiveProblem
from ncg_bench.core.solver import SolverConfig


def pytest_addoption(parser):
    """Add custom command line options."""
    parser.addoption(
        "--fuzz-count",
        action="store",
        default=10,
        type=int,
        help="Number of seeded random cases per property test (default: 10)",
    )
    parser.addoption(
        "--fuzz-seed",
        action="store",
        default=None,
        type=int,
        help="Random seed for property tests (default: random)",
    )
    parser.addoption(
        "--bench-dims",
        action="store",
        default=None,
        help="Comma-separated dimensions for sweep tests (default: 2,10,100,1000)",
    )
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run long benchmark sweeps marked slow (default: False)",
    )


@pytest.fixture(scope="session")
def solver_config() -> SolverConfig:
    """Default solver settings (hybrid method, delta=1e-4, sigma=0.9, eps=1e-6)."""
    return SolverConfig()


@pytest.fixture
def fuzz_count(request) -> int:
    """Fixture providing the number of random cases."""
    return request.config.getoption("--fuzz-count")


@pytest.fixture
def fuzz_seed(request) -> int:
    """Fixture providing the property-test seed."""
    seed = request.config.getoption("--fuzz-seed")
    if seed is None:
        import random

        seed = random.randint(0, 2**31 - 1)
    return seed


@pytest.fixture(scope="session")
def bench_dims(request):
    """Dimensions used by sweep tests."""
    raw = request.config.getoption("--bench-dims")
    if raw is None:
        return list(DEFAULT_DIMS)
    return [int(v) for v in raw.split(",") if v.strip()]


def make_quadratic(diag, b, name="quadratic", x0=None) -> ObjectiveProblem:
    """f(x) = 1/2 x'Ax - b'x with A = diag(diag)."""
    diag = np.asarray(diag, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    start = np.zeros_like(b) if x0 is None else x0
    return ObjectiveProblem(
        name=name,
        n=b.size,
        x0=start,
        eval_f=lambda x: 0.5 * float(np.dot(x, diag * x)) - float(np.dot(b, x)),
        eval_g=lambda x: diag * x - b,
    )


@pytest.fixture
def quadratic():
    """Factory fixture for diagonal quadratics."""
    return make_quadratic


# Skip markers
def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "slow: long-running benchmark sweeps (--run-slow)")
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance checks")


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --run-slow is given."""
    if config.getoption("--run-slow"):
        return

    skip_slow = pytest.mark.skip(reason="slow sweep, enable with --run-slow")

    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
