"""Observer recursions and the structured matrices that govern them.

Two decentralized information patterns are supported.

Input sharing: every agent sees all applied inputs, so its observer is a
plain Luenberger predictor

    xhat_i(k+1) = A xhat_i + sum_j B_j u_j + L_i (y_i - H_i xhat_i)

and the stacked estimation errors evolve by the block-diagonal matrix
with blocks A - L_i H_i.

Private: agent i sees only its own inputs and measurements. It substitutes
its own estimate into the other agents' known feedback laws:

    xhat_i(k+1) = A xhat_i + B_i u_i + sum_{j != i} B_j K_j xhat_i
                  + L_i (y_i - H_i xhat_i)

The stacked errors then evolve by the coupled matrix with diagonal blocks
A + sum_{j != i} B_j K_j - L_i H_i and off-diagonal (i, j) blocks
-B_j K_j. In both patterns the joint state [x; xtilde] is driven by the
block upper-triangular matrix [[A + BK, coupling], [0, error matrix]].
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model import InformationPattern, PlantModel
from .riccati import RiccatiSolution, closed_loop_matrix


@dataclass(frozen=True)
class ObserverScheme:
    """Observer gains plus the assembled structured matrices for a pattern.

    error_matrix is (r n) x (r n) and drives the stacked estimation errors;
    coupling_B is the n x (r n) row of blocks -B_i K_i feeding the errors
    back into the plant; augmented_matrix is the ((r+1) n) square map of
    [x; xtilde]. Off-diagonal zeros are exact by construction.
    """

    pattern: InformationPattern
    L: tuple
    error_matrix: np.ndarray
    coupling_B: np.ndarray
    augmented_matrix: np.ndarray


@dataclass(frozen=True)
class ObserverState:
    """Per-agent state estimates xhat_i, each a length-n vector."""

    xhat: tuple

    @classmethod
    def zeros(cls, plant: PlantModel) -> "ObserverState":
        return cls(xhat=tuple(np.zeros(plant.n) for _ in range(plant.r)))

    @classmethod
    def from_vectors(cls, vectors) -> "ObserverState":
        return cls(xhat=tuple(np.asarray(v, dtype=float).ravel() for v in vectors))


def coerce_gains(plant: PlantModel, L) -> tuple:
    """Normalize per-agent observer gains to (n, s_i) column form."""
    if len(L) != plant.r:
        raise DimensionError(f"expected {plant.r} observer gains, got {len(L)}")
    out = []
    for i, (gain, s_i) in enumerate(zip(L, plant.s_sizes)):
        g = np.asarray(gain, dtype=float)
        if g.ndim == 1:
            g = g.reshape(-1, 1)
        if g.shape != (plant.n, s_i):
            raise DimensionError(f"L[{i}] must be {plant.n} x {s_i}, got shape {g.shape}")
        out.append(g)
    return tuple(out)


def coupling_matrix(plant: PlantModel, sol: RiccatiSolution) -> np.ndarray:
    """Row of blocks [-B_1 K_1, ..., -B_r K_r], shape n x (r n)."""
    return np.hstack([-plant.B[i] @ sol.K_parts[i] for i in range(plant.r)])


def input_sharing_error_matrix(plant: PlantModel, L: tuple) -> np.ndarray:
    """blockdiag(A - L_i H_i); off-diagonal blocks are exactly zero."""
    n, r = plant.n, plant.r
    M = np.zeros((r * n, r * n))
    for i in range(r):
        M[i * n:(i + 1) * n, i * n:(i + 1) * n] = plant.A - L[i] @ plant.H[i]
    return M


def private_error_matrix(plant: PlantModel, sol: RiccatiSolution, L: tuple) -> np.ndarray:
    """Coupled error map for the private pattern, any number of agents.

    Diagonal block i is A + sum_{j != i} B_j K_j - L_i H_i; block (i, j)
    for j != i is -B_j K_j.
    """
    n, r = plant.n, plant.r
    BK = [plant.B[j] @ sol.K_parts[j] for j in range(r)]
    M = np.zeros((r * n, r * n))
    for i in range(r):
        for j in range(r):
            rows = slice(i * n, (i + 1) * n)
            cols = slice(j * n, (j + 1) * n)
            if i == j:
                block = plant.A - L[i] @ plant.H[i]
                for l in range(r):
                    if l != i:
                        block = block + BK[l]
                M[rows, cols] = block
            else:
                M[rows, cols] = -BK[j]
    return M


def two_agent_private_error_matrix(plant: PlantModel, sol: RiccatiSolution, L) -> np.ndarray:
    """Two-agent private error map written out block by block.

    [[A + B_2 K_2 - L_1 H_1,      -B_2 K_2          ],
     [-B_1 K_1,                   A + B_1 K_1 - L_2 H_2]]

    Agrees exactly with the general builder specialized to r = 2.
    """
    if plant.r != 2:
        raise DimensionError(f"two-agent form requires r = 2, got r = {plant.r}")
    L = coerce_gains(plant, L)
    A = plant.A
    B1K1 = plant.B[0] @ sol.K_parts[0]
    B2K2 = plant.B[1] @ sol.K_parts[1]
    top = np.hstack([A - L[0] @ plant.H[0] + B2K2, -B2K2])
    bottom = np.hstack([-B1K1, A - L[1] @ plant.H[1] + B1K1])
    return np.vstack([top, bottom])


def build_scheme(plant: PlantModel, sol: RiccatiSolution, L,
                 pattern: InformationPattern) -> ObserverScheme:
    """Assemble gains and structured matrices for a decentralized pattern.

    Raises ValueError for the state-feedback pattern (no observers there)
    and DimensionError for gain shape mismatches.
    """
    if not pattern.is_decentralized:
        raise ValueError("state-feedback pattern has no observers; build_scheme needs "
                         "input_sharing or private")
    gains = coerce_gains(plant, L)
    if pattern is InformationPattern.INPUT_SHARING:
        error = input_sharing_error_matrix(plant, gains)
    else:
        error = private_error_matrix(plant, sol, gains)
    coupling = coupling_matrix(plant, sol)
    n, r = plant.n, plant.r
    augmented = np.zeros(((r + 1) * n, (r + 1) * n))
    augmented[:n, :n] = closed_loop_matrix(plant, sol)
    augmented[:n, n:] = coupling
    augmented[n:, n:] = error
    return ObserverScheme(pattern=pattern, L=gains, error_matrix=error,
                          coupling_B=coupling, augmented_matrix=augmented)


def _innovation(plant, scheme, i, y_i, xhat_i):
    y_i = np.asarray(y_i, dtype=float).ravel()
    if y_i.shape[0] != plant.s_sizes[i]:
        raise DimensionError(f"y[{i}] must have length {plant.s_sizes[i]}, got {y_i.shape[0]}")
    return scheme.L[i] @ (y_i - plant.H[i] @ xhat_i)


def observer_step_input_sharing(plant: PlantModel, sol: RiccatiSolution,
                                scheme: ObserverScheme, state: ObserverState,
                                y, u) -> ObserverState:
    """One predictor step with all agents' applied inputs available."""
    if scheme.pattern is not InformationPattern.INPUT_SHARING:
        raise ValueError("scheme was not built for the input-sharing pattern")
    drive = sum(plant.B[j] @ np.asarray(u[j], dtype=float).ravel() for j in range(plant.r))
    new = []
    for i in range(plant.r):
        xh = state.xhat[i]
        new.append(plant.A @ xh + drive + _innovation(plant, scheme, i, y[i], xh))
    return ObserverState(xhat=tuple(new))


def observer_step_private(plant: PlantModel, sol: RiccatiSolution,
                          scheme: ObserverScheme, state: ObserverState,
                          y, own_u) -> ObserverState:
    """One private-pattern step; agent i reads own_u[i] and y[i] only.

    The other agents' inputs are reconstructed as B_j K_j xhat_i, using
    agent i's own estimate, never their applied values.
    """
    if scheme.pattern is not InformationPattern.PRIVATE:
        raise ValueError("scheme was not built for the private pattern")
    new = []
    for i in range(plant.r):
        xh = state.xhat[i]
        u_i = np.asarray(own_u[i], dtype=float).ravel()
        if u_i.shape[0] != plant.m_sizes[i]:
            raise DimensionError(f"u[{i}] must have length {plant.m_sizes[i]}, got {u_i.shape[0]}")
        nxt = plant.A @ xh + plant.B[i] @ u_i
        for j in range(plant.r):
            if j != i:
                nxt = nxt + plant.B[j] @ (sol.K_parts[j] @ xh)
        new.append(nxt + _innovation(plant, scheme, i, y[i], xh))
    return ObserverState(xhat=tuple(new))


def control_from_estimates(sol: RiccatiSolution, state: ObserverState) -> list:
    """Per-agent inputs u_i = K_i xhat_i."""
    return [sol.K_parts[i] @ state.xhat[i] for i in range(len(state.xhat))]
