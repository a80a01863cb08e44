"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A configured size or time bound was exceeded."""


class CertificateInvalid(ValueError):
    """A certificate failed a structural or arithmetic check."""

    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


class InternalError(AssertionError):
    """An internal consistency check failed (a bug, not bad input)."""
