"""Plant description, standing-assumption checks, and information patterns.

The plant is the discrete-time linear system

    x(k+1) = A x(k) + B_1 u_1(k) + ... + B_r u_r(k)
    y_i(k) = H_i x(k)

with quadratic running cost x'Qx + sum_i u_i' R_i u_i and a fixed initial
state. Each agent i owns one input channel B_i and one measurement
channel H_i.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .linalg import observability_matrix

_RANK_RTOL = 1e-8
_PSD_TOL = 1e-10


class InformationPattern(enum.Enum):
    """What each regulator is allowed to see when computing its input."""

    STATE_FEEDBACK = "state_feedback"
    INPUT_SHARING = "input_sharing"
    PRIVATE = "private"

    @classmethod
    def from_string(cls, name: str) -> "InformationPattern":
        try:
            return cls(name)
        except ValueError:
            options = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown information pattern {name!r}; expected one of: {options}") from None

    @property
    def is_decentralized(self) -> bool:
        return self is not InformationPattern.STATE_FEEDBACK


def _matrix(value, name: str) -> np.ndarray:
    M = np.asarray(value, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if M.size == 0:
        raise DimensionError(f"{name} must be nonempty")
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class PlantModel:
    """Immutable plant data for r agents.

    Fields
    ------
    A : (n, n) state matrix
    B : tuple of r input matrices, B[i] is (n, m_i); 1-D input accepted as a column
    H : tuple of r measurement matrices, H[i] is (s_i, n); 1-D input accepted as a row
    Q : (n, n) symmetric positive semidefinite state weight
    R : tuple of r symmetric positive definite input weights, R[i] is (m_i, m_i)
    x0 : length-n initial state

    The constructor enforces mutual dimension consistency and finiteness;
    the numeric assumptions (definiteness, stabilizability, observability)
    are reported by :func:`validate`.
    """

    A: np.ndarray
    B: tuple
    H: tuple
    Q: np.ndarray
    R: tuple
    x0: np.ndarray

    def __post_init__(self):
        A = _matrix(self.A, "A")
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]

        B = tuple(np.asarray(b, dtype=float).reshape(n, -1) if np.asarray(b).ndim == 1 else _matrix(b, "B_i") for b in self.B)
        H = tuple(np.asarray(h, dtype=float).reshape(-1, n) if np.asarray(h).ndim == 1 else _matrix(h, "H_i") for h in self.H)
        R = tuple(np.atleast_2d(np.asarray(r, dtype=float)) for r in self.R)
        Q = _matrix(self.Q, "Q")
        x0 = np.asarray(self.x0, dtype=float).ravel()

        if len(B) < 1:
            raise DimensionError("at least one agent is required (B is empty)")
        if not (len(B) == len(H) == len(R)):
            raise DimensionError(f"B, H, R must list one entry per agent, got {len(B)}, {len(H)}, {len(R)}")
        for i, b in enumerate(B):
            if b.shape[0] != n:
                raise DimensionError(f"B[{i}] must have {n} rows, got shape {b.shape}")
            if not np.all(np.isfinite(b)):
                raise DimensionError(f"B[{i}] contains non-finite entries")
        for i, h in enumerate(H):
            if h.shape[1] != n:
                raise DimensionError(f"H[{i}] must have {n} columns, got shape {h.shape}")
            if not np.all(np.isfinite(h)):
                raise DimensionError(f"H[{i}] contains non-finite entries")
        for i, (r_i, b) in enumerate(zip(R, B)):
            m = b.shape[1]
            if r_i.shape != (m, m):
                raise DimensionError(f"R[{i}] must be {m} x {m} to match B[{i}], got shape {r_i.shape}")
            if not np.all(np.isfinite(r_i)):
                raise DimensionError(f"R[{i}] contains non-finite entries")
        if Q.shape != (n, n):
            raise DimensionError(f"Q must be {n} x {n}, got shape {Q.shape}")
        if x0.shape != (n,):
            raise DimensionError(f"x0 must have length {n}, got {x0.shape[0]}")
        if not np.all(np.isfinite(x0)):
            raise DimensionError("x0 contains non-finite entries")

        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "x0", x0)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def r(self) -> int:
        return len(self.B)

    @property
    def m_sizes(self) -> tuple:
        return tuple(b.shape[1] for b in self.B)

    @property
    def s_sizes(self) -> tuple:
        return tuple(h.shape[0] for h in self.H)

    @property
    def m_total(self) -> int:
        return sum(self.m_sizes)


@dataclass(frozen=True)
class StackedForm:
    """Agent-wise horizontal stack of the input matrices and the
    block-diagonal input weight; off-diagonal blocks are exactly zero."""

    Bstack: np.ndarray
    Rblock: np.ndarray
    m_sizes: tuple

    def unstack(self) -> tuple:
        """Recover the per-agent input matrices from Bstack."""
        out = []
        offset = 0
        for m in self.m_sizes:
            out.append(self.Bstack[:, offset:offset + m])
            offset += m
        return tuple(out)


def stack(plant: PlantModel) -> StackedForm:
    """Assemble the stacked input matrix [B_1 ... B_r] and blockdiag(R_i)."""
    Bstack = np.hstack(plant.B)
    m = plant.m_total
    Rblock = np.zeros((m, m))
    offset = 0
    for r_i in plant.R:
        k = r_i.shape[0]
        Rblock[offset:offset + k, offset:offset + k] = r_i
        offset += k
    return StackedForm(Bstack=Bstack, Rblock=Rblock, m_sizes=plant.m_sizes)


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. severity is 'error' for assumption failures."""

    check: str
    severity: str
    message: str


def psd_sqrt(Q: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-1e-10, 0] are clamped to zero (roundoff); anything
    more negative raises, since the input is then genuinely indefinite.
    """
    Qs = 0.5 * (Q + Q.T)
    w, V = np.linalg.eigh(Qs)
    if np.min(w) < -_PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {np.min(w):.3g})")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def _numerical_rank(M: np.ndarray) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > _RANK_RTOL * sv[0]))


def _pbh_stabilizable(A: np.ndarray, B: np.ndarray) -> bool:
    n = A.shape[0]
    eye = np.eye(n)
    for lam in np.linalg.eigvals(A):
        if abs(lam) >= 1.0:
            pencil = np.hstack([lam * eye - A, B.astype(complex)])
            if _numerical_rank(pencil) < n:
                return False
    return True


def _pbh_observable(A: np.ndarray, C: np.ndarray) -> bool:
    n = A.shape[0]
    eye = np.eye(n)
    for lam in np.linalg.eigvals(A):
        pencil = np.vstack([lam * eye - A, C.astype(complex)])
        if _numerical_rank(pencil) < n:
            return False
    return True


def validate(plant: PlantModel) -> list:
    """Check the plant against the standing assumptions.

    Returns a list of diagnostics; an empty list means every check passed.
    Checks, in order: dimensional consistency (re-verified defensively),
    Q symmetric PSD, each R_i symmetric positive definite, stabilizability
    of (A, Bstack) by the PBH rank test at every unstable eigenvalue,
    observability of (A, Q^{1/2}) by the PBH test at every eigenvalue, and
    observability of each (A, H_i) via the stacked observability matrix.
    """
    diags = []
    try:
        PlantModel(plant.A, plant.B, plant.H, plant.Q, plant.R, plant.x0)
    except DimensionError as exc:
        diags.append(Diagnostic("dimensions", "error", str(exc)))
        return diags

    Q = plant.Q
    q_ok = True
    if np.linalg.norm(Q - Q.T) > 1e-9 * (1.0 + np.linalg.norm(Q)):
        diags.append(Diagnostic("state_cost_psd", "error", "Q is not symmetric"))
        q_ok = False
    else:
        q_min = float(np.min(np.linalg.eigvalsh(0.5 * (Q + Q.T))))
        if q_min < -_PSD_TOL:
            diags.append(Diagnostic(
                "state_cost_psd", "error",
                f"Q is not positive semidefinite (min eigenvalue {q_min:.3g})"))
            q_ok = False

    for i, r_i in enumerate(plant.R):
        if np.linalg.norm(r_i - r_i.T) > 1e-9 * (1.0 + np.linalg.norm(r_i)):
            diags.append(Diagnostic("input_cost_pd", "error", f"R[{i}] is not symmetric"))
            continue
        r_min = float(np.min(np.linalg.eigvalsh(0.5 * (r_i + r_i.T))))
        if r_min <= _PSD_TOL:
            diags.append(Diagnostic(
                "input_cost_pd", "error",
                f"R[{i}] is not positive definite (min eigenvalue {r_min:.3g})"))

    Bstack = stack(plant).Bstack
    if not _pbh_stabilizable(plant.A, Bstack):
        diags.append(Diagnostic(
            "stabilizability", "error",
            "(A, [B_1 ... B_r]) is not stabilizable (PBH rank deficiency at an unstable eigenvalue)"))

    if q_ok:
        if not _pbh_observable(plant.A, psd_sqrt(Q)):
            diags.append(Diagnostic(
                "state_cost_observability", "error",
                "(A, Q^(1/2)) is not observable (PBH rank deficiency)"))

    for i, h_i in enumerate(plant.H):
        if _numerical_rank(observability_matrix(plant.A, h_i)) < plant.n:
            diags.append(Diagnostic(
                "measurement_observability", "error",
                f"(A, H[{i}]) is not observable (observability matrix rank deficient)"))

    return diags
