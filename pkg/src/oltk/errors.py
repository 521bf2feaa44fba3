"""Exception types shared by the library and the CLI."""


class PreconditionError(ValueError):
    """An input violates an operation's precondition (CLI exit status 2)."""

    code = "precondition"

    def __init__(self, message: str, field: str | None = None, code: str | None = None):
        super().__init__(message)
        self.field = field
        if code is not None:
            self.code = code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "offending_field": self.field}


class InternalConsistencyError(AssertionError):
    """Two independent evaluation routes disagree (CLI exit status 3)."""
