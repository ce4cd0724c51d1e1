"""Exception hierarchy shared by every module of the package."""


class TwistedH1Error(Exception):
    """Base class for all errors raised by twisted_h1."""


class UnsupportedFamily(TwistedH1Error):
    pass


class DimensionMismatch(TwistedH1Error):
    pass


class ProjectionFailed(TwistedH1Error):
    pass


class GroupMismatch(TwistedH1Error):
    pass


class InvalidAutomorphism(TwistedH1Error):
    """The supplied data does not define an automorphism of the group."""


class CompositionError(TwistedH1Error):
    """Two automorphism kinds cannot be normalized into a single kind."""


class DifferentialNotInAlgebra(TwistedH1Error):
    pass


class OrderUndetermined(TwistedH1Error):
    pass


class IllConditioned(TwistedH1Error):
    """A numerical rank decision is too close to its threshold to trust."""


class NotOneSemisimple(TwistedH1Error):
    """ker(1 - dσ) differs from ker((1 - dσ)^2)."""


class GenericityFailure(TwistedH1Error):
    pass


class WeightReconstructionFailed(TwistedH1Error):
    pass


class EnumerationTooLarge(TwistedH1Error):
    pass


class UnsupportedKind(TwistedH1Error):
    pass


class ClosureExplosion(TwistedH1Error):
    pass


class InvalidCocycleOrder(TwistedH1Error):
    """n is not a multiple of the order of the automorphism."""


class ConfigError(TwistedH1Error):
    pass
