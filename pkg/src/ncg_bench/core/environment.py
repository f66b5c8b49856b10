"""Environment variable management module

This module provides a unified interface for the environment variables that
tune benchmark sweeps and CLI outputs. Environment variables take priority,
then the built-in defaults apply.
"""

import os
from pathlib import Path

THREADS_VAR = "NCG_BENCH_THREADS"
LARGE_DIMS_VAR = "NCG_BENCH_LARGE_DIMS"
OUTPUT_ROOT_VAR = "NCG_BENCH_OUTPUT_ROOT"

_TRUE_VALUES = ("1", "true", "yes", "on")
_FALSE_VALUES = ("", "0", "false", "no", "off")


class NcgEnvironmentError(Exception):
    """Environment configuration error exception"""

    pass


def get_framework_root() -> Path:
    """Get the framework root directory

    Returns:
        Path: Framework root directory path
    """
    if "FRAMEWORK_ROOT" in os.environ:
        return Path(os.environ["FRAMEWORK_ROOT"])
    # Default: infer from current file (src/ncg_bench/core/environment.py -> root)
    return Path(__file__).parent.parent.parent.parent


def get_output_root() -> Path:
    """Get the default root directory for CLI run outputs

    Search order:
    1. NCG_BENCH_OUTPUT_ROOT environment variable
    2. build/outputs under the framework root

    Returns:
        Path: Output root directory (not created)
    """
    if OUTPUT_ROOT_VAR in os.environ:
        return Path(os.environ[OUTPUT_ROOT_VAR])
    return get_framework_root() / "build" / "outputs"


def get_thread_cap() -> int:
    """Get the worker cap for parallel benchmark sweeps

    Returns:
        int: NCG_BENCH_THREADS if set, else the hardware concurrency (at least 1)

    Raises:
        NcgEnvironmentError: When NCG_BENCH_THREADS is not a positive integer
    """
    raw = os.environ.get(THREADS_VAR)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise NcgEnvironmentError(
            f"{THREADS_VAR}={raw!r} is not an integer. Please either:\n"
            f"  1. Set {THREADS_VAR} to a positive integer, or\n"
            f"  2. Unset it to use all available cores"
        ) from None
    if value < 1:
        raise NcgEnvironmentError(f"{THREADS_VAR} must be >= 1, got {value}")
    return value


def large_dims_enabled() -> bool:
    """Whether the default benchmark grid includes n = 10**4

    Raises:
        NcgEnvironmentError: When NCG_BENCH_LARGE_DIMS is not a recognised boolean
    """
    raw = os.environ.get(LARGE_DIMS_VAR, "").strip().lower()
    if raw in _TRUE_VALUES:
        return True
    if raw in _FALSE_VALUES:
        return False
    raise NcgEnvironmentError(
        f"{LARGE_DIMS_VAR}={raw!r} is not a boolean; use one of {_TRUE_VALUES + _FALSE_VALUES[1:]}"
    )
