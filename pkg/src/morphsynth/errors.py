"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`MorphSynthError`,
so the CLI can report ``type(err).__name__`` and exit with status 1.
"""


class MorphSynthError(ValueError):
    pass


# estimates
class EstimateError(MorphSynthError):
    pass


class WrongLength(EstimateError):
    pass


class CardinalityMismatch(EstimateError):
    pass


class ScaleMismatch(EstimateError):
    pass


class EmptyInput(EstimateError):
    pass


# model
class ModelError(MorphSynthError):
    pass


class SchemaError(ModelError):
    pass


class UnknownReference(ModelError):
    pass


class MissingCompatibility(UnknownReference):
    """A sibling-leaf DA pair has no compatibility entry."""


class DuplicateId(ModelError):
    pass


# synthesis
class IncompleteSelection(MorphSynthError):
    pass


class EmptyAlternatives(MorphSynthError):
    pass


# choice
class Infeasible(MorphSynthError):
    pass


class EmptyGroup(MorphSynthError):
    pass


# improvement / aggregation
class UnknownTarget(MorphSynthError):
    pass


class ComponentMismatch(MorphSynthError):
    pass


class MissingCandidate(MorphSynthError):
    pass
