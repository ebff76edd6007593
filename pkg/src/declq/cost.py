"""Exact infinite-horizon costs, the decentralized-vs-optimal gap, and the
geometric-decay certificate that makes the gap arbitrarily small.

With z = [x; xtilde] driven by the augmented matrix, the decentralized
cost from step s splits as

    J_dec(s) = x(s)' P x(s) + sum_{k>=s} z(k)' W z(k)

where W = [[0, S1], [S1', S2]] collects the cross and error weights. The
tail sum is evaluated exactly as z(s)' X z(s) with X solving the discrete
Lyapunov equation X = Abar' X Abar + W; truncated sums appear only in test
oracles. The gap decays like c_bar * lambda^(2s), which yields, for any
epsilon, a horizon N past which the decentralized cost is epsilon-optimal.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, StabilityError
from .linalg import operator_norm, solve_dlyap, spectral_radius, transient_growth_constant
from .model import PlantModel
from .observers import ObserverScheme, coupling_matrix
from .riccati import RiccatiSolution, closed_loop_matrix, optimal_cost
from .sim import SimTrace

_N_EPS_CAP = 10_000_000


@dataclass(frozen=True)
class GapWeights:
    """Quadratic weights of the optimality gap; W is symmetric with an
    exactly-zero top-left n x n block."""

    S1: np.ndarray
    S2: np.ndarray
    W: np.ndarray


@dataclass(frozen=True)
class CostReport:
    """Cost comparison, optionally extended with the decay certificate.

    J_opt is the centralized optimum x(s)'Px(s); J_dec the decentralized
    cost; gap their difference (always >= 0 up to roundoff). The
    certificate fields are None unless produced by
    :func:`optimality_certificate`: lam in (0,1) and c >= 1 bound the
    transient (||z(k)|| <= c lam^k ||z(0)||), c_bar scales the gap bound
    c_bar * lam^(2N), N_eps is the smallest N whose bound is below
    epsilon, bound_at_N that bound's value, and gap_at_N the exact tail
    gap from step N_eps.
    """

    J_opt: float
    J_dec: float
    gap: float
    lam: Optional[float] = None
    c: Optional[float] = None
    c_bar: Optional[float] = None
    epsilon: Optional[float] = None
    N_eps: Optional[int] = None
    bound_at_N: Optional[float] = None
    gap_at_N: Optional[float] = None


def gap_weights(plant: PlantModel, sol: RiccatiSolution) -> GapWeights:
    """Assemble S1, S2 and W for any number of agents.

    S1 = (A+BK)' P C - [K_1'R_1K_1 ... K_r'R_rK_r]  (horizontal blocks)
    S2 = blockdiag(K_i'R_iK_i) + C' P C
    with C the coupling row of blocks -B_i K_i.
    """
    n, r = plant.n, plant.r
    AK = closed_loop_matrix(plant, sol)
    C = coupling_matrix(plant, sol)
    cross_blocks = [sol.K_parts[i].T @ plant.R[i] @ sol.K_parts[i] for i in range(r)]

    S1 = AK.T @ sol.P @ C - np.hstack(cross_blocks)
    S2 = C.T @ sol.P @ C
    for i, blk in enumerate(cross_blocks):
        S2[i * n:(i + 1) * n, i * n:(i + 1) * n] += blk
    S2 = 0.5 * (S2 + S2.T)

    W = np.zeros(((r + 1) * n, (r + 1) * n))
    W[:n, n:] = S1
    W[n:, :n] = S1.T
    W[n:, n:] = S2
    return GapWeights(S1=S1, S2=S2, W=W)


def _stacked_initial(plant: PlantModel, x0, xhat0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != plant.n:
        raise DimensionError(f"x0 must have length {plant.n}, got {x0.shape[0]}")
    if len(xhat0) != plant.r:
        raise DimensionError(f"xhat0 must provide {plant.r} vectors, got {len(xhat0)}")
    errors = []
    for i, xh in enumerate(xhat0):
        xh = np.asarray(xh, dtype=float).ravel()
        if xh.shape[0] != plant.n:
            raise DimensionError(f"xhat0[{i}] must have length {plant.n}, got {xh.shape[0]}")
        errors.append(x0 - xh)
    return np.concatenate([x0] + errors)


def exact_decentralized_cost(plant: PlantModel, sol: RiccatiSolution,
                             scheme: ObserverScheme, x0, xhat0) -> CostReport:
    """Exact J_opt, J_dec and gap from initial state and estimates.

    The gap is z0' X z0 with X the Lyapunov solution for the augmented
    matrix and W; no truncation is involved. Requires the augmented matrix
    to be Schur stable.
    """
    Abar = scheme.augmented_matrix
    rho = spectral_radius(Abar)
    if rho >= 1.0:
        raise StabilityError(f"augmented matrix is not Schur stable (spectral radius {rho:.6g})")
    z0 = _stacked_initial(plant, x0, xhat0)
    W = gap_weights(plant, sol).W
    X = solve_dlyap(Abar, W)
    gap = float(z0 @ X @ z0)
    j_opt = optimal_cost(sol, x0)
    return CostReport(J_opt=j_opt, J_dec=j_opt + gap, gap=gap)


def trajectory_cost(trace: SimTrace, s: int, M: int) -> float:
    """Recorded cost sum_{k=s}^{M} [x'Qx + sum_i u_i'R_iu_i], inclusive."""
    if not 0 <= s <= M <= trace.horizon - 1:
        raise ValueError(
            f"need 0 <= s <= M <= horizon-1 = {trace.horizon - 1}, got s={s}, M={M}")
    return float(np.sum(trace.stage_cost[s:M + 1]))


def optimality_certificate(plant: PlantModel, sol: RiccatiSolution,
                           scheme: ObserverScheme, x0, xhat0,
                           epsilon: float) -> CostReport:
    """Certify epsilon-optimality of the decentralized controllers.

    Picks lam as the midpoint of (spectral radius, 1), bounds the
    transient with c, forms c_bar = ||W|| ||z0||^2 c^2 / (1 - lam^2), and
    returns the smallest N with c_bar lam^(2N) < epsilon together with the
    exact tail gap from step N (which the bound dominates).
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    base = exact_decentralized_cost(plant, sol, scheme, x0, xhat0)

    Abar = scheme.augmented_matrix
    rho = spectral_radius(Abar)
    lam = 0.5 * (rho + 1.0)
    c = transient_growth_constant(Abar, lam)
    W = gap_weights(plant, sol).W
    z0 = _stacked_initial(plant, x0, xhat0)
    c_bar = operator_norm(W) * float(z0 @ z0) * c * c / (1.0 - lam * lam)

    n_eps = 0
    bound = c_bar
    while bound >= epsilon:
        bound *= lam * lam
        n_eps += 1
        if n_eps > _N_EPS_CAP:
            raise RuntimeError("epsilon horizon exceeds the iteration cap")

    n = plant.n
    z_n = np.linalg.matrix_power(Abar, n_eps) @ z0
    x_n = z_n[:n]
    xhat_n = [x_n - z_n[n * (i + 1):n * (i + 2)] for i in range(plant.r)]
    tail = exact_decentralized_cost(plant, sol, scheme, x_n, xhat_n)

    return CostReport(J_opt=base.J_opt, J_dec=base.J_dec, gap=base.gap,
                      lam=lam, c=c, c_bar=c_bar, epsilon=float(epsilon),
                      N_eps=n_eps, bound_at_N=bound, gap_at_N=tail.gap)
