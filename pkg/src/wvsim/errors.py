"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for domain errors raised by wvsim."""


class BudgetExceededError(SimulationError):
    """A requested grid or tensor allocation exceeds the memory budget."""


class StateExceedsBoxError(SimulationError):
    """An initial orbital carries non-negligible probability at the box edge."""


class LinearlyDependentOrbitalsError(SimulationError):
    """Antisymmetrization collapsed because the orbitals are (nearly) dependent."""


class NodePointError(SimulationError):
    """A weak value was requested at a point where the density is below the node mask."""


class SymmetryViolationError(SimulationError):
    """An operation requiring exchange antisymmetry received a non-antisymmetric state."""


class NanDetectedError(SimulationError):
    """Propagation produced non-finite amplitudes."""


class EmptyWindowError(SimulationError):
    """A time average found no usable (unmasked) samples in its window."""


class SchemaViolationError(SimulationError):
    """An experiment configuration document violates the schema.

    Carries the offending field path in ``field``.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class SnapshotFormatError(SimulationError):
    """A binary snapshot file is corrupt or truncated."""
