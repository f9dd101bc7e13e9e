"""Error types raised by the factorization, pipeline and I/O layers."""


class S3nmfError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, **context: object):
        """
        Initialize the error with optional context.

        Args:
            message: Error description
            **context: Extra fields (e.g. member, iteration, path) appended to the
                message as ``(key: value)`` parts; ``None`` values are skipped
        """
        self.message = message
        self.context = {key: value for key, value in context.items() if value is not None}

        error_parts = [message]
        for key, value in self.context.items():
            error_parts.append(f"({key}: {value})")

        super().__init__(" ".join(error_parts))


class ParameterError(S3nmfError):
    """Raised when a numeric parameter is outside its valid range."""


class ShapeError(S3nmfError):
    """Raised when matrix or vector dimensions are incompatible."""


class InputError(S3nmfError):
    """
    Raised when input data or a file's contents are invalid.

    ``row`` and ``column`` are zero-based data coordinates; ``line`` is the one-based
    physical line of the file, comments and blank lines included.
    """

    def __init__(
        self,
        message: str,
        path: str | None = None,
        row: int | None = None,
        column: int | None = None,
        line: int | None = None,
    ):
        self.path = path
        self.row = row
        self.column = column
        self.line = line
        super().__init__(message, path=path, line=line, row=row, column=column)


class AffinityValidationError(InputError):
    """Raised when a matrix violates the symmetry or nonnegativity of an affinity."""


class NumericError(S3nmfError):
    """Raised when an update produces non-finite values."""

    def __init__(
        self,
        message: str,
        member: int | None = None,
        iteration: int | None = None,
        outer_iteration: int | None = None,
    ):
        self.member = member
        self.iteration = iteration
        self.outer_iteration = outer_iteration
        super().__init__(
            message, member=member, iteration=iteration, outer_iteration=outer_iteration
        )

    def with_context(self, **context: int) -> "NumericError":
        """Return a copy of this error with additional location fields filled in."""
        fields = {
            "member": self.member,
            "iteration": self.iteration,
            "outer_iteration": self.outer_iteration,
        }
        fields.update(context)
        return NumericError(self.message, **fields)


class CertificateError(S3nmfError):
    """Raised when an auxiliary-function certificate fails."""
