"""Exception types shared across the workbench."""


class DomainError(ValueError):
    """A precondition on the inputs was violated (bad spec, out-of-range parameter)."""


class UnsupportedFormError(DomainError):
    """The operation is not defined for this distribution form."""


class InvariantViolation(RuntimeError):
    """An internal invariant failed; indicates a bug rather than bad input."""
