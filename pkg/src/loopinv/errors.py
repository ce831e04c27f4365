"""Exception types raised by loopinv."""


class LoopInvError(ValueError):
    """Base class for all loopinv errors."""


class NormError(LoopInvError):
    pass


class SiteError(LoopInvError):
    pass


class HermiticityError(LoopInvError):
    pass


class DimensionError(LoopInvError):
    pass


class RankError(LoopInvError):
    pass


class SamplingError(LoopInvError):
    pass


class RealityError(LoopInvError):
    pass


class ClassError(LoopInvError):
    """A local operation or loop does not belong to the claimed group."""


class NegativeRadicand(LoopInvError):
    pass


class StepError(LoopInvError):
    pass


class ParseError(LoopInvError):
    """Malformed path string; ``offset`` is the character position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ValidationError(LoopInvError):
    """A state violates the structural rules of a density matrix or pure state."""
