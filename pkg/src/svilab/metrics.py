"""Progress measures for SVI runs.

All metrics evaluate the mean map directly and consume no stochastic
budget: they are instrumentation, not part of a scheme's oracle
complexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detsolve import solve_deterministic_vi
from .errors import MetricUnavailable
from .maps import AffineMap, ShiftedMap
from .problems import z_saddle_value

__all__ = [
    "MetricReport",
    "natural_residual",
    "strongly_monotone_gap",
    "yosida_residual",
    "saddle_gap",
    "evaluate_point",
]


def _clamp(v):
    # tolerate tiny negative round-off, reject anything materially negative
    if v < 0.0:
        if v < -1e-12:
            raise MetricUnavailable(f"metric came out negative: {v:.3e}")
        return 0.0
    return v


@dataclass(frozen=True)
class MetricReport:
    """One point's metric values; fields are None when not computable."""

    natural_residual: float = None
    gap: float = None
    yosida_sq: float = None
    saddle_gap: float = None
    dist_to_ref_sq: float = None


def natural_residual(x, mean_map, feasible_set, gamma):
    """Norm of ``x - project(x - gamma F(x))``; zero iff x solves the VI."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=np.float64)
    return float(np.linalg.norm(x - feasible_set.project(x - gamma * mean_map(x))))


def strongly_monotone_gap(x, mean_map, feasible_set, tol=1e-9, max_steps=10**6):
    """Gap value ``sup_y <F(y), x-y> + (mu/2)|y-x|^2`` for affine maps.

    The inner objective is concave exactly when the map is affine with
    mu > 0 (its Hessian is ``mu I - (A + A^T)``, at most ``-mu I``); for
    any other map the supremum cannot be trusted and
    :class:`MetricUnavailable` is raised. The maximization runs projected
    gradient ascent to first-order tolerance ``tol``.
    """
    if not isinstance(mean_map, AffineMap) or mean_map.mu <= 0:
        raise MetricUnavailable(
            "gap is defined here only for affine maps with mu > 0"
        )
    x = np.asarray(x, dtype=np.float64)
    a, b, mu = mean_map.matrix, mean_map.offset, mean_map.mu
    # ascent on h(y) = <Ay+b, x-y> + (mu/2)|y-x|^2
    hess = mu * np.eye(x.size) - (a + a.T)
    step = 1.0 / float(np.linalg.norm(hess, 2))
    y = x.copy()
    for _ in range(max_steps):
        grad = a.T @ (x - y) - (a @ y + b) + mu * (y - x)
        y_next = feasible_set.project(y + step * grad)
        if np.linalg.norm(y_next - y) <= tol * step:
            y = y_next
            break
        y = y_next
    else:
        raise MetricUnavailable("gap ascent did not converge")
    fy = a @ y + b
    val = float(fy @ (x - y) + 0.5 * mu * np.dot(y - x, y - x))
    return _clamp(val)


def yosida_residual(u, lam, problem, tol=1e-10):
    """Norm of the Yosida map ``(u - J_lam(u)) / lam``.

    The resolvent ``J_lam(u)`` solves the deterministic shifted VI on the
    mean map; the solve is certified to natural residual ``tol``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    u = np.asarray(u, dtype=np.float64)
    shifted = ShiftedMap(problem.mean_map, lam, u)
    try:
        j = solve_deterministic_vi(
            shifted, problem.feasible_set, tol, z0=problem.feasible_set.project(u)
        )
    except Exception as exc:  # noqa: BLE001 - nonconvergence surfaces as unavailability
        raise MetricUnavailable(f"resolvent solve failed: {exc}") from exc
    return float(np.linalg.norm(u - j) / lam)


def saddle_gap(x, y, problem):
    """Absolute deviation of the mean payoff value from the reference."""
    payoff = problem.payoff_mean
    if payoff is None or problem.reference_saddle_value is None:
        raise MetricUnavailable("saddle gap needs a bimatrix problem with reference value")
    return abs(z_saddle_value(payoff, x, y) - problem.reference_saddle_value)


def evaluate_point(problem, point, residual_gamma, want_gap=False,
                   want_yosida=False, yosida_lam=None, yosida_tol=1e-10):
    """Assemble a :class:`MetricReport` at one point.

    Cheap metrics (natural residual, distance to reference, bimatrix
    saddle gap) are always computed; the gap and Yosida metrics only on
    request since each needs an auxiliary solve.
    """
    point = np.asarray(point, dtype=np.float64)
    res = natural_residual(point, problem.mean_map, problem.feasible_set, residual_gamma)
    dist_sq = None
    if problem.reference_solution is not None:
        d = point - problem.reference_solution
        dist_sq = float(np.dot(d, d))
    sgap = None
    payoff = problem.payoff_mean
    if payoff is not None and problem.reference_saddle_value is not None:
        n = payoff.shape[1]
        sgap = saddle_gap(point[:n], point[n:], problem)
    gap = None
    if want_gap:
        try:
            gap = strongly_monotone_gap(point, problem.mean_map, problem.feasible_set)
        except MetricUnavailable:
            gap = None
    yosida_sq = None
    if want_yosida and yosida_lam is not None:
        try:
            yosida_sq = yosida_residual(point, yosida_lam, problem, yosida_tol) ** 2
        except MetricUnavailable:
            yosida_sq = None
    return MetricReport(
        natural_residual=res,
        gap=gap,
        yosida_sq=yosida_sq,
        saddle_gap=sgap,
        dist_to_ref_sq=dist_sq,
    )
