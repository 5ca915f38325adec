"""Error taxonomy shared by the library and the CLI (one class per exit code)."""


class SpecError(ValueError):
    """Malformed input document (schema or JSON syntax)."""


class DomainError(ValueError):
    """Well-formed input that violates a mathematical precondition."""


class ParityError(DomainError):
    """A Jordan structure that cannot occur for the requested group."""


class ResourceLimitError(RuntimeError):
    """Requested size exceeds the configured safety limit."""
