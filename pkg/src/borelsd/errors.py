class IdealError(ValueError):
    """Malformed or out-of-domain ideal input."""


class NotBorelTypeError(IdealError):
    pass


class FamilyError(ValueError):
    """Invalid Borel family data or generator parameters."""


class HypothesisError(ValueError):
    """A formula was asked for outside the hypotheses it is valid under."""


class InfeasibleError(RuntimeError):
    """Instance is beyond desk scale: box cap or time budget exceeded."""
