"""Exception types shared across the package.

The CLI maps each subclass to a stable machine-readable error code, so new
error conditions should reuse one of these rather than raising bare
ValueError from user-facing paths.
"""


class MgsrError(Exception):
    """Base class for all package errors."""

    code = "error"


class ConfigurationError(MgsrError):
    """Bad run configuration, palette, or config file contents."""

    code = "config"


class DataError(MgsrError):
    """Dataset loading or validation failure."""

    code = "data"


class TreeStructureError(MgsrError):
    """Structurally invalid expression tree (e.g. variable index out of range).

    Distinct from numeric non-finiteness, which is a model-validity concern
    handled by fitness, not an error.
    """

    code = "tree"


class InvalidModelError(MgsrError):
    """A gene response matrix contained non-finite entries.

    Callers that compute fitness catch this and assign the +inf sentinel;
    it never aborts a run.
    """

    code = "invalid-model"


class ArchiveError(MgsrError):
    """Malformed or incompatible population archive."""

    code = "archive"


class ModelLookupError(MgsrError):
    """Unknown model id or keyword, or unknown gene id."""

    code = "model-id"


class ExportError(MgsrError):
    """Unknown export format or unexportable model."""

    code = "export"
