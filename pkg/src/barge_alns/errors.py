"""Exception hierarchy shared by every module."""


class BargeAlnsError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(BargeAlnsError):
    """An instance or solution document is missing fields or has wrong shapes."""


class InconsistentError(BargeAlnsError):
    """A well-formed document describes an impossible instance."""


class NegativeLoad(BargeAlnsError):
    """A route drops more barges than it is towing."""


class TooLarge(BargeAlnsError):
    """Instance exceeds a configured size cap."""


class Infeasible(BargeAlnsError):
    """No feasible solution exists (or construction could not complete)."""


class InsufficientBarges(BargeAlnsError):
    """Fewer free empty barges than a typeE order still needs."""


class NothingToRemove(BargeAlnsError):
    """A destroy operator found no entity of its kind in the routes."""


class EmptyBank(BargeAlnsError):
    """Roulette selection over an empty operator bank."""


class UnknownPreset(BargeAlnsError):
    """Requested experiment scale row does not exist."""


class MismatchedInstance(BargeAlnsError):
    """A solution references nodes the instance does not define."""
