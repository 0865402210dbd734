"""Exception hierarchy shared across the package."""


class LoopLabError(Exception):
    """Base class for all looplab errors."""


class StructuralError(LoopLabError):
    """A graph operation referenced a node that does not exist, or would
    violate a structural invariant (cycles, duplicate feedback, ...)."""


class ArtifactError(LoopLabError):
    """An artifact-level contract was violated (unknown slot, non-editable
    slot targeted, wiring referencing undeclared slots, ...)."""


class TemplateError(LoopLabError):
    """A learning template received inputs that violate its preconditions."""


class MetricError(LoopLabError):
    """Metric computation received inconsistent inputs."""


class FeedbackError(LoopLabError):
    """A stage table is malformed or a template could not be rendered."""


class ExecutionError(LoopLabError):
    """A slot body failed to parse or evaluate."""

    def __init__(self, message, slot=None, position=None):
        super().__init__(message)
        self.slot = slot
        self.position = position


class FuelExhausted(ExecutionError):
    """Slot evaluation ran out of fuel."""


class OptimizerError(LoopLabError):
    """An optimizer backend failed permanently (after retries)."""


class RetriableOptimizerError(OptimizerError):
    """Transient backend failure; the caller may retry."""


class DeltaValidationError(OptimizerError):
    """A proposed delta named an unknown or non-editable slot."""


class EnvError(LoopLabError):
    """An environment received an illegal action or invalid configuration."""


class SplitError(LoopLabError):
    """Not enough examples for the requested dataset split."""


class ConfigError(LoopLabError):
    """Experiment configuration failed to parse or validate."""
