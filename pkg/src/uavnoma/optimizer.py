"""Power-split optimization over the unit square.

Numerical gradient ascent on the closed-form throughput (forward
differences, fixed step, projection onto [0,1]^2) plus an exhaustive
lattice search used as its accuracy oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import throughput
from .protocol import PowerAllocation


@dataclass(frozen=True)
class NgdConfig:
    step: float = 0.05
    fd_step: float = 1e-4  # forward-difference probe
    tol: float = 0.0025  # gradient-norm stopping threshold
    max_iter: int = 10_000
    theta0: tuple | None = None  # None: random start

    def __post_init__(self):
        if min(self.step, self.fd_step, self.tol) <= 0:
            raise ValueError("step sizes and tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("need at least one iteration")
        if self.theta0 is not None and not all(0 <= t <= 1 for t in self.theta0):
            raise ValueError("starting point must lie in the unit square")


@dataclass(frozen=True)
class OptResult:
    theta_star: tuple
    r_star: float
    iterations: int
    converged: bool
    grad_norm: float
    n_evals: int


def _objective(scenario):
    p1, p2 = scenario.p_max1_w, scenario.p_max2_w

    def f(theta1, theta2):
        t1 = np.clip(theta1, 0.0, 1.0)
        t2 = np.clip(theta2, 0.0, 1.0)
        return throughput(scenario, PowerAllocation(t1, t2, p1, p2))

    return f


def ngd_optimize(
    scenario, config: NgdConfig = NgdConfig(), rng: np.random.Generator | None = None
) -> OptResult:
    """Gradient ascent with numerically estimated gradients.

    Each iteration evaluates the objective at theta and at the two
    forward-difference probes, takes a fixed-step ascent move, and clamps
    back into the unit square. Stops once the gradient norm falls below
    the tolerance; the iteration cap guards flat regions. Non-finite
    objective values abort.
    """
    f = _objective(scenario)
    if config.theta0 is not None:
        theta = np.array(config.theta0, dtype=float)
    else:
        rng = rng or np.random.default_rng()
        theta = rng.uniform(0.0, 1.0, 2)

    eta = config.fd_step
    n_evals = 0
    iterations = 0
    grad_norm = np.inf
    converged = False
    while iterations < config.max_iter:
        r = f(
            np.array([theta[0], theta[0] + eta, theta[0]]),
            np.array([theta[1], theta[1], theta[1] + eta]),
        )
        n_evals += 3
        if not np.all(np.isfinite(r)):
            raise ArithmeticError(f"objective is not finite near theta={tuple(theta)}")
        grad = np.array([(r[1] - r[0]) / eta, (r[2] - r[0]) / eta])
        nxt = np.clip(theta + config.step * grad, 0.0, 1.0)
        # projected-gradient norm: equals the raw gradient norm in the
        # interior, and vanishes where the clamp makes the point stationary
        grad_norm = float(np.linalg.norm((nxt - theta) / config.step))
        theta = nxt
        iterations += 1
        if grad_norm < config.tol:
            converged = True
            break
    r_star = float(f(theta[0], theta[1]))
    n_evals += 1
    return OptResult(
        theta_star=(float(theta[0]), float(theta[1])),
        r_star=r_star,
        iterations=iterations,
        converged=converged,
        grad_norm=grad_norm,
        n_evals=n_evals,
    )


def brute_force_search(scenario, grid_n: int = 101) -> OptResult:
    """Exact argmax over the uniform grid_n x grid_n lattice on [0,1]^2.

    Ties break toward the lexicographically smallest (theta1, theta2).
    Lattices include both endpoints, so refinements that share points can
    only improve the result.
    """
    if grid_n < 2:
        raise ValueError("need at least a 2x2 grid")
    f = _objective(scenario)
    axis = np.linspace(0.0, 1.0, grid_n)
    t1, t2 = np.meshgrid(axis, axis, indexing="ij")
    r = np.asarray(f(t1.ravel(), t2.ravel()))
    best = int(np.argmax(r))  # first occurrence = lexicographic tie-break
    return OptResult(
        theta_star=(float(t1.ravel()[best]), float(t2.ravel()[best])),
        r_star=float(r[best]),
        iterations=1,
        converged=True,
        grad_norm=np.nan,
        n_evals=grid_n * grid_n,
    )


def mse(a, b) -> float:
    """Mean squared gap between two equal-length value sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("need two equal-length non-empty sequences")
    return float(np.mean((a - b) ** 2))


def trajectory_mse(
    scenarios,
    config: NgdConfig = NgdConfig(),
    grid_n: int = 51,
    rng: np.random.Generator | None = None,
):
    """Mean squared optimal-throughput gap between lattice search and ascent.

    Runs both optimizers at every scenario (one per relay location) and
    averages the squared difference of the optima. Returns (mse, results)
    with per-location (lattice, ascent) pairs.
    """
    rng = rng or np.random.default_rng()
    results = []
    for sc in scenarios:
        bfs = brute_force_search(sc, grid_n)
        ngd = ngd_optimize(sc, config, rng)
        results.append((bfs, ngd))
    if not results:
        raise ValueError("need at least one scenario")
    gap = mse([b.r_star for b, _ in results], [n.r_star for _, n in results])
    return gap, results
