"""Observer gain selection and certification.

Stable gains are known to exist for the block-diagonal input-sharing
error map whenever each (A, H_i) is observable; for the coupled private
error map no construction is available, so this module supplies one:
per-agent pole placement first, then a seeded randomized local search over
gain perturbations if the coupled spectral radius is still too large.
Failure to certify is an ordinary outcome reported through the result,
not an exception.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ObservabilityError
from .linalg import observability_matrix, place_observer_poles, spectral_radius
from .model import InformationPattern, PlantModel
from .observers import coerce_gains, input_sharing_error_matrix, private_error_matrix
from .riccati import RiccatiSolution

METHOD_GIVEN = "given"
METHOD_POLE_PLACEMENT = "pole_placement"
METHOD_RANDOM_SEARCH = "random_search"

DEFAULT_MARGIN = 0.02

_SEARCH_BUDGET = 5000
_INITIAL_STEP = 0.5
_STALL_LIMIT = 50
_POLE_BAND = (0.1, 0.5)


@dataclass(frozen=True)
class SynthesisResult:
    """Chosen gains with the spectral radius they achieve.

    certified is True iff achieved_radius < 1 - margin for the margin the
    synthesis or certification ran with.
    """

    L: tuple
    achieved_radius: float
    method: str
    certified: bool


def _error_matrix(plant, sol, L, pattern):
    if pattern is InformationPattern.INPUT_SHARING:
        return input_sharing_error_matrix(plant, L)
    return private_error_matrix(plant, sol, L)


def certify_gains(plant: PlantModel, sol: RiccatiSolution,
                  pattern: InformationPattern, L,
                  margin: float = DEFAULT_MARGIN) -> SynthesisResult:
    """Evaluate user-supplied gains against the pattern's error matrix."""
    if not pattern.is_decentralized:
        raise ValueError("gain certification applies to decentralized patterns only")
    gains = coerce_gains(plant, L)
    radius = spectral_radius(_error_matrix(plant, sol, gains, pattern))
    return SynthesisResult(L=gains, achieved_radius=radius, method=METHOD_GIVEN,
                           certified=radius < 1.0 - margin)


def _check_observability(plant: PlantModel):
    for i, h_i in enumerate(plant.H):
        obs = observability_matrix(plant.A, h_i)
        sv = np.linalg.svd(obs, compute_uv=False)
        if sv[0] == 0.0 or np.sum(sv > 1e-8 * sv[0]) < plant.n:
            raise ObservabilityError(f"(A, H[{i}]) is not observable; cannot synthesize observer gains")


def _stage1_candidates(plant: PlantModel) -> tuple:
    """Per-agent placement at well-damped real targets; multi-output
    channels start from zero gains and rely on the search."""
    targets = np.linspace(_POLE_BAND[0], _POLE_BAND[1], plant.n)
    gains = []
    for i in range(plant.r):
        if plant.s_sizes[i] == 1:
            gains.append(place_observer_poles(plant.A, plant.H[i], targets))
        else:
            gains.append(np.zeros((plant.n, plant.s_sizes[i])))
    return tuple(gains)


def synthesize(plant: PlantModel, sol: RiccatiSolution,
               pattern: InformationPattern, seed: int,
               margin: float = DEFAULT_MARGIN) -> SynthesisResult:
    """Search for gains making the pattern's error matrix Schur stable.

    Stage 1 places each A - L_i H_i at real poles spread over
    [0.1, 0.5]; stage 2 evaluates the coupled radius; stage 3, if the
    target 1 - margin is not met, runs a seeded Gaussian local search
    (step 0.5, halved after 50 straight rejections, strict-decrease
    acceptance, 5000 evaluations). Deterministic for a fixed seed. Returns
    the best gains found; certified may be False.
    """
    if not pattern.is_decentralized:
        raise ValueError("gain synthesis applies to decentralized patterns only")
    _check_observability(plant)

    best = _stage1_candidates(plant)
    best_radius = spectral_radius(_error_matrix(plant, sol, best, pattern))
    evaluations = 1
    if best_radius < 1.0 - margin:
        return SynthesisResult(L=best, achieved_radius=best_radius,
                               method=METHOD_POLE_PLACEMENT, certified=True)

    rng = np.random.default_rng(seed)
    step = _INITIAL_STEP
    stalls = 0
    while evaluations < _SEARCH_BUDGET:
        candidate = tuple(L_i + step * rng.standard_normal(L_i.shape) for L_i in best)
        radius = spectral_radius(_error_matrix(plant, sol, candidate, pattern))
        evaluations += 1
        if radius < best_radius:
            best, best_radius = candidate, radius
            stalls = 0
            if best_radius < 1.0 - margin:
                break
        else:
            stalls += 1
            if stalls >= _STALL_LIMIT:
                step *= 0.5
                stalls = 0
    return SynthesisResult(L=best, achieved_radius=best_radius,
                           method=METHOD_RANDOM_SEARCH,
                           certified=best_radius < 1.0 - margin)
