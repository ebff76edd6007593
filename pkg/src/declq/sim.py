"""Closed-loop trajectory generation under each information pattern.

Within step k the order is: read y(k), compute u(k) from the current
estimates (or the state itself under state feedback), record the stage
cost, advance the plant, advance the observers. That matches the observer
recursions, where u(k) and y(k) both appear on the right-hand side of the
xhat(k+1) update.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model import InformationPattern, PlantModel
from .observers import (ObserverState, control_from_estimates,
                        observer_step_input_sharing, observer_step_private)
from .riccati import RiccatiSolution


@dataclass(frozen=True)
class SimTrace:
    """Time-indexed record of a closed-loop run.

    x has shape (horizon+1, n); xhat (horizon+1, r, n); xtilde_norms
    (horizon+1, r) with entry [k, i] = ||x(k) - xhat_i(k)||; u has shape
    (horizon, m_total) with per-agent blocks in agent order (widths in
    u_sizes); stage_cost has length horizon. Under state feedback the
    estimates are the state itself, so the error norms are zero.
    """

    pattern: InformationPattern
    x: np.ndarray
    xhat: np.ndarray
    xtilde_norms: np.ndarray
    u: np.ndarray
    u_sizes: tuple
    stage_cost: np.ndarray

    @property
    def horizon(self) -> int:
        return self.stage_cost.shape[0]

    def input_slices(self) -> list:
        """Column slices of u for each agent, in order."""
        slices = []
        offset = 0
        for m in self.u_sizes:
            slices.append(slice(offset, offset + m))
            offset += m
        return slices


def _initial_estimates(plant: PlantModel, xhat0) -> ObserverState:
    if xhat0 is None:
        return ObserverState.zeros(plant)
    state = ObserverState.from_vectors(xhat0)
    if len(state.xhat) != plant.r:
        raise DimensionError(f"xhat0 must provide {plant.r} vectors, got {len(state.xhat)}")
    for i, v in enumerate(state.xhat):
        if v.shape[0] != plant.n:
            raise DimensionError(f"xhat0[{i}] must have length {plant.n}, got {v.shape[0]}")
    return state


def simulate(plant: PlantModel, sol: RiccatiSolution, scheme,
             pattern: InformationPattern, x0=None, xhat0=None,
             horizon: int = 500) -> SimTrace:
    """Run the closed loop for `horizon` steps and record everything.

    scheme is required for the decentralized patterns and must match
    `pattern`; pass None under state feedback. x0 defaults to the plant's
    initial state and xhat0 to zero estimates.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    if pattern.is_decentralized:
        if scheme is None:
            raise ValueError(f"pattern {pattern.value} requires an observer scheme")
        if scheme.pattern is not pattern:
            raise ValueError(f"scheme was built for {scheme.pattern.value}, not {pattern.value}")

    n, r, m = plant.n, plant.r, plant.m_total
    x = plant.x0.copy() if x0 is None else np.asarray(x0, dtype=float).ravel()
    if x.shape[0] != n:
        raise DimensionError(f"x0 must have length {n}, got {x.shape[0]}")

    if pattern is InformationPattern.STATE_FEEDBACK:
        est = ObserverState(xhat=tuple(x.copy() for _ in range(r)))
    else:
        est = _initial_estimates(plant, xhat0)

    xs = np.zeros((horizon + 1, n))
    xhats = np.zeros((horizon + 1, r, n))
    err_norms = np.zeros((horizon + 1, r))
    us = np.zeros((horizon, m))
    costs = np.zeros(horizon)

    def record_state(k, x_k, est_k):
        xs[k] = x_k
        for i in range(r):
            xhats[k, i] = est_k.xhat[i]
            err_norms[k, i] = np.linalg.norm(x_k - est_k.xhat[i])

    for k in range(horizon):
        record_state(k, x, est)
        y = [plant.H[i] @ x for i in range(r)]
        if pattern is InformationPattern.STATE_FEEDBACK:
            u_stacked = sol.K @ x
            u_parts = []
            offset = 0
            for m_i in plant.m_sizes:
                u_parts.append(u_stacked[offset:offset + m_i])
                offset += m_i
        else:
            u_parts = control_from_estimates(sol, est)
            u_stacked = np.concatenate(u_parts)
        us[k] = u_stacked
        costs[k] = x @ plant.Q @ x + sum(
            u_parts[i] @ plant.R[i] @ u_parts[i] for i in range(r))

        x_next = plant.A @ x + sum(plant.B[i] @ u_parts[i] for i in range(r))
        if pattern is InformationPattern.STATE_FEEDBACK:
            est = ObserverState(xhat=tuple(x_next.copy() for _ in range(r)))
        elif pattern is InformationPattern.INPUT_SHARING:
            est = observer_step_input_sharing(plant, sol, scheme, est, y, u_parts)
        else:
            est = observer_step_private(plant, sol, scheme, est, y, u_parts)
        x = x_next

    record_state(horizon, x, est)
    return SimTrace(pattern=pattern, x=xs, xhat=xhats, xtilde_norms=err_norms,
                    u=us, u_sizes=plant.m_sizes, stage_cost=costs)
