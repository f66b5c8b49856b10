"""
Conjugate-gradient coefficient formulas and the direction update.

Every coefficient is computed from the quintuple (g_new, g_old, d_old, s, y)
with y = g_new - g_old and s = x_new - x_old. Classical formulas raise
DegenerateDenominator on a zero denominator; compute_beta() maps that to
beta = 0 (steepest descent).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np

from ncg_bench.core.objective import DimensionMismatch, Vector

logger = logging.getLogger(__name__)

# theta_new() falls back to 0 when |den| < _THETA_DEN_EPS * (1 + |num|)
_THETA_DEN_EPS = 1e-30


class DegenerateDenominator(ArithmeticError):
    """A coefficient formula hit a zero (or non-positive) denominator."""

    pass


@dataclass(frozen=True)
class BetaInputs:
    """Gradient/direction quintuple consumed by every coefficient formula.

    Attributes:
        g_new: Gradient at the new point.
        g_old: Gradient at the previous point.
        d_old: Previous search direction.
        s: Step x_new - x_old.
        y: Gradient change g_new - g_old (checked componentwise).
    """

    g_new: Vector
    g_old: Vector
    d_old: Vector
    s: Vector
    y: Vector

    def __post_init__(self):
        for name in ("g_new", "g_old", "d_old", "s", "y"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        n = self.g_new.shape
        for name in ("g_old", "d_old", "s", "y"):
            if getattr(self, name).shape != n:
                raise DimensionMismatch(
                    f"BetaInputs.{name} has shape {getattr(self, name).shape}, expected {n}"
                )
        if not np.array_equal(self.y, self.g_new - self.g_old):
            raise ValueError("BetaInputs.y must equal g_new - g_old exactly")

    @classmethod
    def from_step(cls, g_new: Vector, g_old: Vector, d_old: Vector, s: Vector) -> "BetaInputs":
        """Build the quintuple, computing y = g_new - g_old."""
        g_new = np.asarray(g_new, dtype=np.float64)
        g_old = np.asarray(g_old, dtype=np.float64)
        return cls(g_new=g_new, g_old=g_old, d_old=d_old, s=s, y=g_new - g_old)


@dataclass(frozen=True)
class HybridParams:
    """Parameters of the HRM, NHS and hybrid coefficients.

    Attributes:
        tau: HRM mixing weight, in (0, 1).
        u: NHS parameter, > 1.
        t: Conjugacy scale used by theta_new, > 0.
        theta_min: Lower clamp for theta.
        theta_max: Upper clamp for theta.
        theta_override: If set, the hybrid uses this theta instead of theta_new.
    """

    tau: float = 0.4
    u: float = 1.1
    t: float = 1.0
    theta_min: float = 0.0
    theta_max: float = 1.0
    theta_override: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if not self.u > 1.0:
            raise ValueError(f"u must be > 1, got {self.u}")
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t}")
        if not 0.0 <= self.theta_min < self.theta_max <= 1.0:
            raise ValueError(
                f"theta bounds must satisfy 0 <= min < max <= 1, got "
                f"[{self.theta_min}, {self.theta_max}]"
            )
        if self.theta_override is not None and not 0.0 <= self.theta_override <= 1.0:
            raise ValueError(f"theta_override must lie in [0, 1], got {self.theta_override}")


class BetaBranch(Enum):
    """Which case of the coefficient rule produced beta."""

    THETA_ZERO_NHS = "theta_zero_nhs"
    INTERIOR_AWHM = "interior_awhm"
    THETA_ONE_HRM = "theta_one_hrm"
    DEGENERATE_FALLBACK = "degenerate_fallback"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class BetaOutcome:
    beta: float
    theta: float
    branch: BetaBranch


def _sq(v: Vector) -> float:
    return float(np.dot(v, v))


def beta_fr(inputs: BetaInputs) -> float:
    """Fletcher-Reeves: ||g_new||^2 / ||g_old||^2."""
    den = _sq(inputs.g_old)
    if den == 0.0:
        raise DegenerateDenominator("FR: ||g_old||^2 = 0")
    return _sq(inputs.g_new) / den


def beta_prp(inputs: BetaInputs) -> float:
    """Polak-Ribiere-Polyak: g_new'y / ||g_old||^2."""
    den = _sq(inputs.g_old)
    if den == 0.0:
        raise DegenerateDenominator("PRP: ||g_old||^2 = 0")
    return float(np.dot(inputs.g_new, inputs.y)) / den


def beta_hs(inputs: BetaInputs) -> float:
    """Hestenes-Stiefel: g_new'y / y'd_old."""
    den = float(np.dot(inputs.y, inputs.d_old))
    if den == 0.0:
        raise DegenerateDenominator("HS: y'd_old = 0")
    return float(np.dot(inputs.g_new, inputs.y)) / den


def beta_hrm(inputs: BetaInputs, p: HybridParams) -> float:
    """HRM coefficient.

    g_new'(g_new - (||g_new||/||g_old||) g_old) / (tau ||g_old||^2 + (1 - tau) ||d_old||^2)
    """
    g_old_sq = _sq(inputs.g_old)
    den = p.tau * g_old_sq + (1.0 - p.tau) * _sq(inputs.d_old)
    if g_old_sq == 0.0 or den == 0.0:
        raise DegenerateDenominator("HRM: ||g_old|| = 0 or zero denominator")
    ratio = np.sqrt(_sq(inputs.g_new)) / np.sqrt(g_old_sq)
    num = float(np.dot(inputs.g_new, inputs.g_new - ratio * inputs.g_old))
    return num / den


def nhs_denominator(inputs: BetaInputs, p: HybridParams) -> float:
    """max{ max{0, u g_new'd_old} + ||g_old||^2, d_old'y }."""
    truncated = max(0.0, p.u * float(np.dot(inputs.g_new, inputs.d_old)))
    return max(truncated + _sq(inputs.g_old), float(np.dot(inputs.d_old, inputs.y)))


def beta_nhs(inputs: BetaInputs, p: HybridParams) -> float:
    """NHS coefficient; nonnegative for every valid input.

    (||g_new||^2 - (||g_new||/||g_old||) max{0, g_new'g_old}) / D, D as in nhs_denominator().
    """
    g_old_sq = _sq(inputs.g_old)
    if g_old_sq == 0.0:
        raise DegenerateDenominator("NHS: ||g_old|| = 0")
    den = nhs_denominator(inputs, p)
    if not den > 0.0:
        raise DegenerateDenominator(f"NHS: denominator {den} is not positive")
    g_new_sq = _sq(inputs.g_new)
    ratio = np.sqrt(g_new_sq) / np.sqrt(g_old_sq)
    num = g_new_sq - ratio * max(0.0, float(np.dot(inputs.g_new, inputs.g_old)))
    # Cauchy-Schwarz makes num >= 0 up to round-off
    return max(0.0, num) / den


def theta_new(inputs: BetaInputs, b_nhs: float, b_hrm: float, p: HybridParams) -> float:
    """Unclamped hybrid weight from the conjugacy condition.

    (-t s'g_new + g_new'y - b_nhs d_old'y) / ((b_hrm - b_nhs) d_old'y), or 0 when the
    denominator is negligible.
    """
    dy = float(np.dot(inputs.d_old, inputs.y))
    num = (
        -p.t * float(np.dot(inputs.s, inputs.g_new))
        + float(np.dot(inputs.g_new, inputs.y))
        - b_nhs * dy
    )
    den = (b_hrm - b_nhs) * dy
    if abs(den) < _THETA_DEN_EPS * (1.0 + abs(num)):
        return 0.0
    return num / den


def beta_awhm(inputs: BetaInputs, p: HybridParams) -> BetaOutcome:
    """Hybrid coefficient: (1 - theta) beta_NHS + theta beta_HRM with theta clamped."""
    try:
        b_nhs = beta_nhs(inputs, p)
        b_hrm = beta_hrm(inputs, p)
    except DegenerateDenominator as exc:
        logger.debug("hybrid coefficient degenerate: %s", exc)
        return BetaOutcome(0.0, 0.0, BetaBranch.DEGENERATE_FALLBACK)

    if p.theta_override is not None:
        theta = p.theta_override
    else:
        theta = theta_new(inputs, b_nhs, b_hrm, p)

    if theta <= p.theta_min:
        if p.theta_min == 0.0:
            return BetaOutcome(b_nhs, 0.0, BetaBranch.THETA_ZERO_NHS)
        theta = p.theta_min
    elif theta >= p.theta_max:
        if p.theta_max == 1.0:
            return BetaOutcome(b_hrm, 1.0, BetaBranch.THETA_ONE_HRM)
        theta = p.theta_max
    return BetaOutcome((1.0 - theta) * b_nhs + theta * b_hrm, theta, BetaBranch.INTERIOR_AWHM)


def direction(g_new: Vector, beta: float, d_old: Optional[Vector] = None) -> Vector:
    """New search direction -g_new + beta d_old (-g_new when there is no d_old or beta = 0)."""
    g_new = np.asarray(g_new, dtype=np.float64)
    if d_old is None or beta == 0.0:
        return -g_new
    d_old = np.asarray(d_old, dtype=np.float64)
    if d_old.shape != g_new.shape:
        raise DimensionMismatch(f"direction: g_new {g_new.shape} vs d_old {d_old.shape}")
    return -g_new + beta * d_old


def restart_check(g_new: Vector, g_old: Vector, nu: float = 0.2) -> bool:
    """True iff |g_new'g_old| >= nu ||g_new||^2 (restart along -g_new)."""
    if not nu > 0:
        raise ValueError(f"Restart threshold must be positive, got {nu}")
    return bool(abs(float(np.dot(g_new, g_old))) >= nu * _sq(np.asarray(g_new)))


_BETA_FUNCS: Dict[str, Callable[[BetaInputs, HybridParams], float]] = {
    "fr": lambda inputs, p: beta_fr(inputs),
    "prp": lambda inputs, p: beta_prp(inputs),
    "hs": lambda inputs, p: beta_hs(inputs),
    "hrm": beta_hrm,
    "nhs": beta_nhs,
}


def compute_beta(method: str, inputs: BetaInputs, p: HybridParams) -> BetaOutcome:
    """Dispatch to the coefficient rule named by ``method``.

    Args:
        method: One of "fr", "prp", "hs", "hrm", "nhs", "awhm", "sd".
        inputs: The gradient/direction quintuple.
        p: Hybrid parameters.

    Returns:
        BetaOutcome; degenerate denominators give beta = 0 (DEGENERATE_FALLBACK).

    Raises:
        ValueError: Unknown method name.
    """
    if method == "awhm":
        return beta_awhm(inputs, p)
    if method == "sd":
        return BetaOutcome(0.0, 0.0, BetaBranch.CLASSICAL)
    if method not in _BETA_FUNCS:
        raise ValueError(f"Unknown coefficient rule: {method}")
    try:
        beta = _BETA_FUNCS[method](inputs, p)
    except DegenerateDenominator as exc:
        logger.debug("%s coefficient degenerate: %s", method, exc)
        return BetaOutcome(0.0, 0.0, BetaBranch.DEGENERATE_FALLBACK)
    return BetaOutcome(beta, 0.0, BetaBranch.CLASSICAL)
