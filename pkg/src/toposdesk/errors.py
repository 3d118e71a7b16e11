"""Typed failure modes shared across the package.

The distinction between BoundsExceeded and a negative answer is load-bearing:
a search that runs out of budget must never be reported as "no solution".
"""


class ToposError(Exception):
    """Base class for all package errors."""


class BaseMismatch(ToposError):
    """Two values that must live over the same base category/presheaf do not."""


class UnknownObject(ToposError):
    """An object or morphism id is not present in the category."""


class PreconditionError(ToposError):
    """A documented precondition (fibration-hood, smallness, coherence) failed."""


class SmallnessError(PreconditionError):
    """A fiber met or exceeded the configured cardinal bound."""


class NoLift(ToposError):
    """A lift that the caller asserted must exist does not (surfaced precondition)."""


class BoundsExceeded(ToposError):
    """A bounded search ran out of budget.  Distinct from a proved negative.

    `context` carries whatever the search knew when it gave up (counts,
    offending object, dimension).
    """

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = dict(context)


class CapExceeded(BoundsExceeded):
    """A configured enumeration cap (stages, triples, universe size) was hit."""


class SchemaError(ToposError):
    """A workspace file failed schema validation.  `path` is a JSON path."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
