"""Exception hierarchy.

Everything raised on purpose by this package derives from ``ElicitationError``
so callers (the CLI in particular) can separate input problems from bugs.
"""


class ElicitationError(Exception):
    """Base class for all package errors."""


class GameError(ElicitationError, ValueError):
    """A game description is malformed."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class MissingUtilityEntry(GameError):
    pass


class DuplicateLabel(GameError):
    pass


class EmptyAxis(GameError):
    pass


class InvalidDistribution(GameError):
    """Weights are negative or do not sum to exactly one."""


class NotSimpleWithoutReferenceMessage(ElicitationError, ValueError):
    pass


class DimensionMismatch(ElicitationError, ValueError):
    pass


class NonPureProfile(ElicitationError, ValueError):
    pass


class NonDirectSignal(ElicitationError, ValueError):
    pass


class ProfileLimitExceeded(ElicitationError, RuntimeError):
    """Pure-profile enumeration would exceed the configured bound."""


class InputNotEquilibrium(ElicitationError, ValueError):
    pass


class NotCheapTalk(ElicitationError, ValueError):
    pass


class TooFewMessages(ElicitationError, ValueError):
    pass


class InputNotIC(ElicitationError, ValueError):
    pass


class NoEquilibriumFound(ElicitationError, RuntimeError):
    pass


class DegenerateExperiment(ElicitationError, ValueError):
    pass


class UnknownScenario(ElicitationError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown scenario"


class ParameterConditionViolated(ElicitationError, ValueError):
    def __init__(self, condition, detail=""):
        self.condition = condition
        msg = f"parameter condition violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InfeasibleAtAllGridPoints(ElicitationError, RuntimeError):
    pass
