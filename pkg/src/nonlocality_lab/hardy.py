"""Hardy configurations: direction chains from the unique-partner construction,
the violation probability of the logically forbidden outcome pair, its
maximization over two-qubit states, and the fragility of the exact
correlations under angular misalignment.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .correlation_engine import (
    DEFAULT_TOL,
    Correlation,
    holds,
    normalize,
    partner,
    probability,
    violation,
)
from .spin_observables import Direction, observable_from_direction
from .tensor_core import identity

__all__ = [
    "HardyConfig",
    "HardyOptimum",
    "MAX_VIOLATION",
    "OptimizerConfig",
    "SensitivityReport",
    "build_hardy",
    "max_hardy_probability",
    "schmidt_state",
    "sensitivity",
]

# Largest attainable violation probability over two-qubit states, (5*sqrt(5)-11)/2.
MAX_VIOLATION = (5.0 * math.sqrt(5.0) - 11.0) / 2.0

_PARALLEL_TOL = 1e-6


def schmidt_state(lam: float) -> np.ndarray:
    """Two-qubit state sqrt(lam)|00> + sqrt(1-lam)|11>."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("Schmidt coefficient must lie in [0, 1]")
    psi = np.zeros(4, dtype=complex)
    psi[0] = math.sqrt(lam)
    psi[3] = math.sqrt(1.0 - lam)
    return psi


@dataclass(frozen=True)
class HardyConfig:
    """State plus the four directions realizing the three exact correlations.

    ``degenerate_pairs`` lists direction pairs (j, j+2) found parallel within
    1e-6 rad; such configurations carry no violation.
    """

    psi: np.ndarray
    n1: Direction
    n2: Direction
    n3: Direction
    n4: Direction
    p_violation: float
    degenerate_pairs: tuple[str, ...] = field(default=())

    def observables(self):
        return (
            observable_from_direction(self.n1, 1, 2),
            observable_from_direction(self.n2, 2, 2),
            observable_from_direction(self.n3, 1, 2),
            observable_from_direction(self.n4, 2, 2),
        )

    def correlations(self) -> tuple[Correlation, Correlation, Correlation]:
        s1, s2, s3, s4 = self.observables()
        return (Correlation(s1, s2), Correlation(s2, s3), Correlation(s3, s4))


def build_hardy(psi, n1: Direction, tol: float = DEFAULT_TOL) -> HardyConfig:
    """Derive n2, n3, n4 from (psi, n1) by chaining the unique-partner map.

    Each link is pinned by the uniqueness of the correlation partner; the three
    correlations are re-verified before returning.  The violation probability
    is that of the outcome pair (1, 0) for (S1(n1), S2(n4)).
    """
    v = normalize(psi)
    if v.size != 4:
        raise ValueError("Hardy construction requires a two-qubit state")
    s1 = observable_from_direction(n1, 1, 2)
    links = []
    current = s1
    for name in ("n2", "n3", "n4"):
        try:
            current = partner(v, current, tol)
        except ValueError as exc:
            raise ValueError(f"partner construction failed at {name}: {exc}") from exc
        links.append(current)
    s2, s3, s4 = links
    n2, n3, n4 = s2.direction, s3.direction, s4.direction

    for c in (Correlation(s1, s2), Correlation(s2, s3), Correlation(s3, s4)):
        if not holds(c, v, tol):
            raise ArithmeticError(f"constructed correlation {c!r} fails to hold")

    p = probability(s1.matrix @ (identity(4) - s4.matrix), v)
    degenerate = []
    if n1.angle_to(n3) <= _PARALLEL_TOL or abs(n1.angle_to(n3) - math.pi) <= _PARALLEL_TOL:
        degenerate.append("n1,n3")
    if n2.angle_to(n4) <= _PARALLEL_TOL or abs(n2.angle_to(n4) - math.pi) <= _PARALLEL_TOL:
        degenerate.append("n2,n4")
    return HardyConfig(v, n1, n2, n3, n4, p, tuple(degenerate))


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start local search over (schmidt coefficient, theta, phi)."""

    n_starts: int = 32
    seed: int = 0
    xatol: float = 1e-10
    fatol: float = 1e-13
    max_iter: int = 4000


@dataclass(frozen=True)
class HardyOptimum:
    psi: np.ndarray
    direction: Direction
    p_max: float
    schmidt_coefficient: float
    converged: bool


_BOUNDS = [(0.5 + 1e-4, 1.0 - 1e-4), (1e-3, math.pi - 1e-3), (0.0, 2.0 * math.pi)]


def _violation_of(x) -> float:
    lam, theta, phi = x
    try:
        return build_hardy(schmidt_state(lam), Direction(theta, phi)).p_violation
    except (ValueError, ArithmeticError):
        return 0.0


def _max_workers() -> int:
    raw = os.environ.get("NONLOCALITY_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def max_hardy_probability(config: OptimizerConfig = OptimizerConfig()) -> HardyOptimum:
    """Maximize the violation probability over two-qubit states and n1.

    States are parameterized by their Schmidt coefficient (phases absorb into
    the measurement azimuth), directions by (theta, phi).  Deterministic for a
    fixed seed; restarts merge by max, so concurrent evaluation is safe.
    """
    rng = np.random.default_rng(config.seed)
    starts = [
        np.array(
            [
                rng.uniform(0.55, 0.95),
                rng.uniform(0.2, math.pi - 0.2),
                rng.uniform(0.0, 2.0 * math.pi),
            ]
        )
        for _ in range(config.n_starts)
    ]

    def solve(x0):
        return minimize(
            lambda x: -_violation_of(x),
            x0,
            method="Nelder-Mead",
            bounds=_BOUNDS,
            options={
                "xatol": config.xatol,
                "fatol": config.fatol,
                "maxiter": config.max_iter,
            },
        )

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, starts))
    else:
        results = [solve(x0) for x0 in starts]

    best = max(results, key=lambda r: -r.fun)
    lam, theta, phi = best.x
    return HardyOptimum(
        psi=schmidt_state(lam),
        direction=Direction(theta, phi),
        p_max=float(-best.fun),
        schmidt_coefficient=float(lam),
        converged=bool(best.success),
    )


@dataclass(frozen=True)
class SensitivityReport:
    """Leak probabilities of the exact correlations under misalignment of n4."""

    epsilons: tuple[float, ...]
    leak_probabilities: tuple[float, ...]
    fitted_exponent: float


def _direction_from_unit(v: np.ndarray) -> Direction:
    theta = math.acos(min(max(float(v[2]), -1.0), 1.0))
    phi = math.atan2(float(v[1]), float(v[0]))
    return Direction(theta, phi)


def _rotation_axis(config: HardyConfig) -> np.ndarray:
    axis = np.cross(config.n4.unit_vector(), config.n2.unit_vector())
    norm = float(np.linalg.norm(axis))
    if norm > 1e-9:
        return axis / norm
    # n4 parallel to n2: fall back to the polar tangent at n4, which is a
    # deterministic perpendicular fixed by phi.
    t, p = config.n4.theta, config.n4.phi
    tangent = np.array([math.cos(t) * math.cos(p), math.cos(t) * math.sin(p), -math.sin(t)])
    return tangent / np.linalg.norm(tangent)


def _rotate(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    # Rodrigues rotation about a unit axis.
    return (
        v * math.cos(angle)
        + np.cross(axis, v) * math.sin(angle)
        + axis * float(np.dot(axis, v)) * (1.0 - math.cos(angle))
    )


def sensitivity(config: HardyConfig, epsilons) -> SensitivityReport:
    """Leak probability of the correlation set when n4 is rotated by each epsilon.

    The leak is the largest forbidden-pair probability among the three
    correlations evaluated with the perturbed n4; only the last link involves
    n4, so the leak isolates the breakdown of that correlation.
    """
    eps = tuple(float(e) for e in epsilons)
    if any(e < 0.0 for e in eps):
        raise ValueError("epsilons must be nonnegative")
    axis = _rotation_axis(config)
    s1, s2, s3, _ = config.observables()
    leaks = []
    for e in eps:
        n4e = _direction_from_unit(_rotate(config.n4.unit_vector(), axis, e))
        s4e = observable_from_direction(n4e, 2, 2)
        worst = max(
            violation(Correlation(s1, s2), config.psi),
            violation(Correlation(s2, s3), config.psi),
            violation(Correlation(s3, s4e), config.psi),
        )
        leaks.append(max(worst, 0.0))
    positive = [(e, l) for e, l in zip(eps, leaks) if e > 0.0 and l > 0.0]
    if len(positive) >= 2:
        xs = np.log([e for e, _ in positive])
        ys = np.log([l for _, l in positive])
        exponent = float(np.polyfit(xs, ys, 1)[0])
    else:
        exponent = float("nan")
    return SensitivityReport(eps, tuple(leaks), exponent)
