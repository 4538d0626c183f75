import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

log = logging.getLogger(__name__)


def power_iteration(
    apply: Callable[[np.ndarray], np.ndarray], size: int, tol: float = 1e-12, max_iter: int = 100_000
) -> float:
    """Largest eigenvalue of a Hermitian positive semidefinite operator, all-ones start vector."""
    x = np.ones(size, dtype=complex) / np.sqrt(size)
    eigenvalue = 0.0
    for iteration in range(max_iter):
        y = apply(x)
        rayleigh = float(np.real(np.vdot(x, y)))
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
        if abs(rayleigh - eigenvalue) <= tol * abs(rayleigh):
            log.debug(f"power iteration converged after {iteration} steps")
            return rayleigh
        eigenvalue = rayleigh
    log.warning(f"power iteration stopped after {max_iter} steps without reaching tolerance {tol}")
    return eigenvalue


@dataclass(frozen=True, eq=False)
class Extrapolation:
    value: np.ndarray
    error: np.ndarray
    levels: List[np.ndarray]


def neville_extrapolate(steps: Sequence[float], values: np.ndarray) -> Extrapolation:
    """Polynomial extrapolation to step 0 of values[i] sampled at steps[i].

    ``levels[j]`` is the order-j estimate that uses the first j+1 steps; the error is the gap between the
    two highest orders.
    """
    steps = np.asarray(steps, dtype=float)
    values = np.asarray(values)
    table = [values[i] for i in range(len(steps))]
    levels = [table[0]]
    for j in range(1, len(steps)):
        for i in range(len(steps) - 1, j - 1, -1):
            table[i] = (steps[i] * table[i - 1] - steps[i - j] * table[i]) / (steps[i] - steps[i - j])
        levels.append(table[j])
    error = np.abs(levels[-1] - levels[-2]) if len(levels) > 1 else np.zeros_like(np.abs(levels[-1]))
    return Extrapolation(value=levels[-1], error=error, levels=levels)


def disk_quadrature(radial: int, angular: int, radius: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in r times trapezoid in theta over the disk |w| < radius; weights include r dr."""
    x, w = np.polynomial.legendre.leggauss(radial)
    r = (x + 1) * radius / 2
    radial_weights = w * radius / 2 * r
    theta = 2 * np.pi * (np.arange(angular) + 0.5) / angular
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (radial_weights[:, None] * np.full(angular, 2 * np.pi / angular)[None, :]).ravel()
    return nodes, weights
