"""Custom exceptions for stabilizer-ft."""


class StabilizerFtError(Exception):
    """Base exception for stabilizer-ft."""

    pass


class PauliError(StabilizerFtError):
    """Raised when a Pauli operator is malformed or sizes disagree."""

    pass


class CodeNotFoundError(StabilizerFtError):
    """Raised when a code name or file cannot be resolved."""

    pass


class InvalidCodeError(StabilizerFtError):
    """Raised when a stabilizer code is malformed or violates its invariants."""

    pass


class NotCssError(StabilizerFtError):
    """Raised when a CSS-only query is made on a non-CSS code."""

    pass


class NotInNormalizerError(StabilizerFtError):
    """Raised when an operator is expected to commute with the stabilizer but does not."""

    pass


class InvalidCliffordError(StabilizerFtError):
    """Raised when a Clifford map is malformed or does not preserve commutation."""

    pass


class UnknownGateError(StabilizerFtError):
    """Raised when a gate name is not registered."""

    pass


class CircuitError(StabilizerFtError):
    """Raised when a circuit is malformed."""

    pass


class TransversalError(StabilizerFtError):
    """Raised when a transversal candidate is malformed or not valid on a code."""

    pass


class SimulationError(StabilizerFtError):
    """Raised when a stabilizer simulation step cannot be carried out."""

    pass


class ProtocolError(StabilizerFtError):
    """Raised when a protocol is unknown or its parameters are invalid."""

    pass


class SizeLimitError(StabilizerFtError):
    """Raised when a request exceeds a qubit-count guard."""

    pass


class FormatError(StabilizerFtError):
    """Raised when a .stab, .gate or .circ document cannot be parsed."""

    pass
