"""Discrete algebraic Riccati equation and the centralized optimal gain.

For the stacked pair (A, B) with weights (Q, R) the cost matrix P solves

    P = A'PA + Q - A'PB (R + B'PB)^{-1} B'PA

and the optimal state feedback is u(k) = K x(k) with

    K = -(R + B'PB)^{-1} B'PA.

K splits row-wise into per-agent gains K_i matching each agent's input
block.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionError, ConvergenceError, DimensionError, StabilityError
from .linalg import spectral_radius
from .model import PlantModel, stack, validate

# validate() checks that gate the Riccati solve; measurement observability
# is deliberately not among them (state feedback needs no observers)
_REQUIRED_CHECKS = {"dimensions", "state_cost_psd", "input_cost_pd",
                    "stabilizability", "state_cost_observability"}


@dataclass(frozen=True)
class RiccatiSolution:
    """Stabilizing solution of the Riccati equation.

    P is the symmetric PSD cost matrix, K the stacked feedback gain and
    K_parts its row-block split by agent. residual is the fixed-point
    defect ||P - rhs(P)|| measured after convergence.
    """

    P: np.ndarray
    K: np.ndarray
    K_parts: tuple
    iterations: int
    residual: float


def _riccati_rhs(A, Bstack, Q, Rblock, P):
    G = Rblock + Bstack.T @ P @ Bstack
    APB = A.T @ P @ Bstack
    return A.T @ P @ A + Q - APB @ np.linalg.solve(G, APB.T)


def solve_dare(plant: PlantModel, tol: float = 1e-12, max_iter: int = 100_000) -> RiccatiSolution:
    """Solve the Riccati fixed point by value iteration from P = 0.

    Iterates P <- A'PA + Q - A'PB(R + B'PB)^{-1}B'PA, symmetrizing each
    step, until ||P_next - P|| <= tol * (1 + ||P||). The iteration is
    monotone nondecreasing in the PSD order and converges under the
    standing assumptions, which are checked up front.

    Raises
    ------
    AssumptionError
        If stabilizability, observability of (A, Q^(1/2)), or the
        definiteness checks fail.
    ConvergenceError
        If max_iter is exhausted; carries the last update norm.
    """
    failures = [d for d in validate(plant) if d.check in _REQUIRED_CHECKS]
    if failures:
        raise AssumptionError(failures)

    A, Q = plant.A, plant.Q
    stacked = stack(plant)
    Bstack, Rblock = stacked.Bstack, stacked.Rblock

    P = np.zeros_like(A)
    iterations = 0
    converged = False
    delta = np.inf
    for iterations in range(1, max_iter + 1):
        P_next = _riccati_rhs(A, Bstack, Q, Rblock, P)
        P_next = 0.5 * (P_next + P_next.T)
        delta = float(np.linalg.norm(P_next - P))
        P = P_next
        if delta <= tol * (1.0 + np.linalg.norm(P)):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"Riccati value iteration did not converge in {max_iter} iterations "
            f"(last update norm {delta:.3g})", residual=delta)

    G = Rblock + Bstack.T @ P @ Bstack
    K = -np.linalg.solve(G, Bstack.T @ P @ A)
    residual = float(np.linalg.norm(P - _riccati_rhs(A, Bstack, Q, Rblock, P)))

    rho_cl = spectral_radius(A + Bstack @ K)
    if rho_cl >= 1.0:
        raise StabilityError(f"closed loop A + BK is not Schur stable (spectral radius {rho_cl:.6g})")

    parts = []
    offset = 0
    for m in plant.m_sizes:
        parts.append(K[offset:offset + m, :])
        offset += m
    return RiccatiSolution(P=P, K=K, K_parts=tuple(parts), iterations=iterations, residual=residual)


def closed_loop_matrix(plant: PlantModel, sol: RiccatiSolution) -> np.ndarray:
    """A + B K for the stacked input matrix."""
    return plant.A + stack(plant).Bstack @ sol.K


def optimal_cost(sol: RiccatiSolution, x) -> float:
    """Optimal infinite-horizon cost x'Px from state x."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != sol.P.shape[0]:
        raise DimensionError(f"state has length {x.shape[0]}, expected {sol.P.shape[0]}")
    return float(x @ sol.P @ x)
