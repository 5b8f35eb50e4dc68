"""Exception types shared by the library and the CLI exit-code mapping."""


class PreconditionError(ValueError):
    """An operation was called on a network outside its domain (CLI exit 2)."""


class VerificationError(RuntimeError):
    """A numerical or structural self-check failed (CLI exit 3)."""
