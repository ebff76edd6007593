"""Dense real-matrix kernel: spectra, discrete Lyapunov equations, pole
placement for single-output pairs, and transient growth constants.

All inputs are plain numpy arrays. Problem sizes are small (state dimension
up to a few tens), so everything runs on the dense LAPACK paths.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ObservabilityError, StabilityError

# relative symmetry slack for solve_dlyap right-hand sides
_SYMMETRY_RTOL = 1e-9


def _as_square(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be a square 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a square matrix together with their maximum modulus."""

    eigenvalues: np.ndarray
    spectral_radius: float


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues of a square real matrix (complex array of length n)."""
    return np.linalg.eigvals(_as_square(M))


def spectrum(M) -> Spectrum:
    """Full spectrum of M."""
    eig = eigenvalues(M)
    return Spectrum(eigenvalues=eig, spectral_radius=float(np.max(np.abs(eig))))


def spectral_radius(M) -> float:
    """max |lambda| over the eigenvalues of M."""
    return float(np.max(np.abs(eigenvalues(M))))


def operator_norm(M) -> float:
    """Induced 2-norm (largest singular value)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {M.shape}")
    return float(np.linalg.norm(M, 2))


def is_schur_stable(M, margin: float = 0.0) -> bool:
    """True iff spectral_radius(M) < 1 - margin.

    The unit circle itself is excluded; margin > 0 demands a stability
    reserve on top of that.
    """
    if margin < 0:
        raise ValueError(f"margin must be nonnegative, got {margin}")
    return spectral_radius(M) < 1.0 - margin


# matrix dimension up to which the Kronecker linear solve is used;
# beyond that the squaring iteration is cheaper than an (n^2)^3 solve
_KRONECKER_MAX_DIM = 50


def solve_dlyap(F, S) -> np.ndarray:
    """Solve the discrete Lyapunov equation X = F' X F + S.

    F must be Schur stable; S must be symmetric (up to roundoff slack, it
    is symmetrized before solving). The unique solution is returned
    symmetrized. For S positive semidefinite the result is positive
    semidefinite as well.

    Small systems go through a dense Kronecker solve, which is exact to
    roundoff; larger ones use the squaring iteration
    X <- X + F' X F, F <- F^2 until the update norm falls below 1e-12.
    """
    F = _as_square(F, "F")
    S = _as_square(S, "S")
    if F.shape != S.shape:
        raise DimensionError(f"F and S must have equal shapes, got {F.shape} vs {S.shape}")
    rho = spectral_radius(F)
    if rho >= 1.0:
        raise StabilityError(f"F must be Schur stable, got spectral radius {rho:.6g}")
    asym = np.linalg.norm(S - S.T)
    if asym > _SYMMETRY_RTOL * (1.0 + np.linalg.norm(S)):
        raise ValueError(f"S is not symmetric (||S - S'|| = {asym:.3g})")
    S = 0.5 * (S + S.T)

    n = F.shape[0]
    if n <= _KRONECKER_MAX_DIM:
        # vec(F' X F) = (F' (x) F') vec(X) in column-major vec convention
        lhs = np.eye(n * n) - np.kron(F.T, F.T)
        X = np.linalg.solve(lhs, S.flatten(order="F")).reshape((n, n), order="F")
    else:
        X = S.copy()
        Fk = F.copy()
        for _ in range(200):
            delta = Fk.T @ X @ Fk
            X = X + delta
            if np.linalg.norm(delta) < 1e-12:
                break
            Fk = Fk @ Fk
    return 0.5 * (X + X.T)


def observability_matrix(A, H) -> np.ndarray:
    """Stacked observability matrix [H; HA; ...; HA^(n-1)]."""
    A = _as_square(A, "A")
    H = np.atleast_2d(np.asarray(H, dtype=float))
    n = A.shape[0]
    if H.shape[1] != n:
        raise DimensionError(f"H must have {n} columns, got shape {H.shape}")
    rows = [H]
    for _ in range(n - 1):
        rows.append(rows[-1] @ A)
    return np.vstack(rows)


def place_observer_poles(A, H, poles) -> np.ndarray:
    """Observer gain L such that eig(A - L H) equals the requested poles.

    Single-output pairs only (H is 1 x n). The gain is obtained by matching
    characteristic polynomials on the dual pair, Ackermann style:
    L = q(A) O^{-1} e_n with O the observability matrix and q the desired
    characteristic polynomial.

    Parameters
    ----------
    A : (n, n) array
    H : (1, n) or (n,) array
    poles : sequence of n scalars, closed under complex conjugation

    Raises
    ------
    ObservabilityError
        If (A, H) is not observable.
    ValueError
        If the pole set is not closed under conjugation.
    """
    A = _as_square(A, "A")
    n = A.shape[0]
    H = np.atleast_2d(np.asarray(H, dtype=float))
    if H.shape != (1, n):
        raise DimensionError(f"H must be a single-output 1 x {n} row, got shape {H.shape}")
    pls = np.asarray(poles, dtype=complex).ravel()
    if pls.shape != (n,):
        raise DimensionError(f"expected {n} poles, got {pls.shape[0]}")
    scale = 1.0 + float(np.max(np.abs(pls)))
    mismatch = np.abs(np.sort_complex(pls) - np.sort_complex(np.conj(pls))).max()
    if mismatch > 1e-9 * scale:
        raise ValueError("pole set must be closed under complex conjugation")

    obs = observability_matrix(A, H)
    sv = np.linalg.svd(obs, compute_uv=False)
    if sv[0] == 0.0 or np.sum(sv > 1e-8 * sv[0]) < n:
        raise ObservabilityError("(A, H) is not observable; poles cannot be assigned")

    coeffs = np.poly(pls)
    coeffs = np.real(coeffs)  # conjugate closure makes these real
    qA = np.zeros_like(A)
    for c in coeffs:
        qA = qA @ A + c * np.eye(n)
    e_last = np.zeros((n, 1))
    e_last[-1, 0] = 1.0
    return qA @ np.linalg.solve(obs, e_last)


def transient_growth_constant(F, lam: float) -> float:
    """Smallest observed c with ||F^k|| <= c * lam^k over the sampled range.

    Requires spectral_radius(F) < lam < 1, which makes the ratio
    ||F^k|| / lam^k tend to zero; c is its running maximum (at least 1,
    from k = 0). Sampling stops once the ratio has decreased 10 times in a
    row with at least 50 powers taken, capped at 5000 powers.
    """
    F = _as_square(F, "F")
    rho = spectral_radius(F)
    if not (rho < lam < 1.0):
        raise ValueError(f"lambda must lie in (spectral_radius(F), 1) = ({rho:.6g}, 1), got {lam}")
    G = F / lam  # ||G^k|| = ||F^k|| / lam^k, and G is Schur stable
    Gk = np.eye(F.shape[0])
    c = 1.0
    prev = 1.0
    decreases = 0
    for k in range(1, 5001):
        Gk = Gk @ G
        ratio = float(np.linalg.norm(Gk, 2))
        c = max(c, ratio)
        decreases = decreases + 1 if ratio < prev else 0
        prev = ratio
        if decreases >= 10 and k >= 50:
            break
    return c
