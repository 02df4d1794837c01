"""Exception hierarchy. Every domain error derives from HeisError."""


class HeisError(Exception):
    """Base class for domain errors (CLI exit code 2)."""


class NonHorizontal(HeisError):
    pass


class DegenerateFrame(HeisError):
    pass


class TooFarFromGroup(HeisError):
    pass


class NotHorizontallyRegular(HeisError):
    """Raised when the horizontal speed drops below the regularity threshold.

    ``param`` holds the curve parameter of the offending node.
    """

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class GridMismatch(HeisError):
    pass


class DegenerateAmplitude(HeisError):
    pass


class NotNormalParametrization(HeisError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SingularPointEncountered(HeisError):
    pass


class TransversalNotFound(HeisError):
    pass


class NearSingular(HeisError):
    pass


class IntegrabilityViolated(HeisError):
    pass


class EmptyMesh(HeisError):
    pass
