"""
Benchmark instances built from the function registry.

An instance is a (function, dimension) pair with its standard start point;
instance ids are "<function_id>-<n>" and every listing is sorted.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ncg_bench.bench.functions import (
    DEFAULT_DIMS,
    LARGE_DIM,
    REGISTRY,
    UnknownFunction,
    UnsupportedDimension,
    get_function,
)
from ncg_bench.core import environment
from ncg_bench.core.objective import ObjectiveProblem, Vector

__all__ = [
    "ProblemInstance",
    "UnknownFunction",
    "UnsupportedDimension",
    "default_dims",
    "full_grid",
    "instantiate",
    "list_functions",
    "registry_manifest",
    "write_registry_manifest",
]


@dataclass(frozen=True)
class ProblemInstance:
    """A registry function at a fixed dimension.

    Attributes:
        function_id: Registry key.
        n: Dimension.
        x0: Standard start point.
        f_star: Known minimum value, or None.
        problem: The ObjectiveProblem consumed by the solver.
    """

    function_id: str
    n: int
    x0: Vector
    f_star: Optional[float]
    problem: ObjectiveProblem

    @property
    def instance_id(self) -> str:
        return f"{self.function_id}-{self.n}"


def default_dims() -> Tuple[int, ...]:
    """Default sweep dimensions; adds 10**4 when NCG_BENCH_LARGE_DIMS is set."""
    if environment.large_dims_enabled():
        return DEFAULT_DIMS + (LARGE_DIM,)
    return DEFAULT_DIMS


def list_functions(dims: Optional[Sequence[int]] = None) -> List[Tuple[str, List[int]]]:
    """Sorted (function_id, supported dimensions) pairs over ``dims`` (default grid)."""
    candidates = tuple(dims) if dims is not None else default_dims()
    return [(fid, REGISTRY[fid].supported_dims(candidates)) for fid in sorted(REGISTRY)]


def instantiate(function_id: str, n: int) -> ProblemInstance:
    """Build the instance of ``function_id`` at dimension ``n``.

    Raises:
        UnknownFunction: Unknown identifier.
        UnsupportedDimension: The function does not admit this n.
    """
    fn = get_function(function_id)
    fn.check_dim(n)
    x0 = fn.start_point(n)
    problem = ObjectiveProblem(
        name=f"{function_id}-{n}", n=n, x0=x0, eval_f=fn.value, eval_g=fn.grad
    )
    return ProblemInstance(
        function_id=function_id, n=n, x0=problem.x0, f_star=fn.f_star(n), problem=problem
    )


def full_grid(
    dims: Optional[Iterable[int]] = None, functions: Optional[Iterable[str]] = None
) -> List[ProblemInstance]:
    """Registry x dims, filtered to supported pairs, ordered by (function_id, n)."""
    dims = sorted(set(dims)) if dims is not None else list(default_dims())
    ids = sorted(functions) if functions is not None else sorted(REGISTRY)
    grid = []
    for fid in ids:
        fn = get_function(fid)
        for n in dims:
            if fn.supports(n):
                grid.append(instantiate(fid, n))
    return grid


def registry_manifest(dims: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """JSON-ready description of the registry (id, dimensions, start rule, f_star)."""
    entries = []
    for fid, supported in list_functions(dims):
        fn = REGISTRY[fid]
        entries.append(
            {
                "id": fid,
                "title": fn.title,
                "n_values": supported,
                "start_rule": fn.start_rule,
                "f_star": {str(n): fn.f_star(n) for n in supported},
            }
        )
    return {"functions": entries, "instances": sum(len(e["n_values"]) for e in entries)}


def write_registry_manifest(path: Union[str, Path], dims: Optional[Sequence[int]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(registry_manifest(dims), indent=2, sort_keys=True) + "\n")
    return path
