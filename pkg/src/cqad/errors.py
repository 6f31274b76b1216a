"""Exception types shared across the package."""


class CqadError(Exception):
    """Base class for all package errors."""


class DomainError(CqadError, ValueError):
    """Argument outside the domain of a model function."""


class TuningRangeError(DomainError):
    """Target frequency outside the flux-tunable band."""

    def __init__(self, target, f_min, f_max):
        self.target = target
        self.band = (f_min, f_max)
        super().__init__(
            f"target {target:.6e} Hz outside tunable band [{f_min:.6e}, {f_max:.6e}] Hz"
        )


class PhysicalityError(DomainError):
    """Coherence times that no physical qubit can have."""


class PoleError(DomainError):
    """Evaluation on a pole of the perturbative dispersive shift."""


class ContractError(CqadError, ValueError):
    """Input violates a structural precondition (shape, symmetry, ordering)."""


class CutoffError(CqadError, RuntimeError):
    """Hilbert-space truncation too small for the requested accuracy."""


class DispersiveRegimeError(CqadError, ValueError):
    """A mode is too close to the qubit for the dispersive approximation."""

    def __init__(self, mode_index, ratio):
        self.mode_index = mode_index
        self.ratio = ratio
        super().__init__(
            f"mode {mode_index} has |detuning|/g = {ratio:.3g} < 3; not dispersive"
        )


class RankDeficientError(CqadError, ArithmeticError):
    """Normal equations of a least-squares problem are singular."""


class ConfigError(CqadError, ValueError):
    """Malformed or inconsistent configuration document."""
