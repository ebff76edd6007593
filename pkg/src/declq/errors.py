"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or vector shapes are inconsistent with the operation."""


class StabilityError(ValueError):
    """A matrix required to be Schur stable (spectral radius < 1) is not."""


class ObservabilityError(ValueError):
    """An (A, H) pair required to be observable is not."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget before converging."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class AssumptionError(ValueError):
    """Plant assumption checks failed; carries the offending diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(d.message for d in self.diagnostics)
        super().__init__(f"plant assumptions violated: {lines}")


class CertificationError(RuntimeError):
    """Observer-gain certification failed (error matrix not certified stable)."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class ScenarioError(ValueError):
    """A scenario file could not be parsed or is internally inconsistent."""
