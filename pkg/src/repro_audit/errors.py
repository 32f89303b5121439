"""Exception types raised by the auditor."""


class AuditError(Exception):
    """Base class for all auditor errors."""


class RootMissing(AuditError):
    """Supplement root does not exist or is not a directory."""


class IoFailure(AuditError):
    """A file system entry could not be read; carries the offending path."""

    def __init__(self, path, reason=""):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}" if reason else self.path)


class UnknownDialect(AuditError):
    """No detector tables exist for the requested script dialect."""


class InconsistentInput(AuditError):
    """Script facts refer to paths that do not match the inventory."""


class ZeroWeights(AuditError):
    """Aggregation weights sum to zero."""


class MalformedManifest(AuditError):
    """Spot-check manifest text violates the format; carries diagnostics."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateId(MalformedManifest):
    """A replication id occurs more than once in a manifest section."""


class UnknownId(AuditError):
    """Requested replication id is not in the manifest."""


class KTooLarge(AuditError):
    """Random selection size exceeds the number of manifest entries."""


class NoReducedSet(AuditError):
    """Reduced selection requested but the manifest has no reduced entries."""


class ParseFailure(AuditError):
    """Output file could not be parsed as a numeric table."""


class DimensionMismatch(AuditError):
    """Compared tables have different shapes."""


class TargetNotEmpty(AuditError):
    """Skeleton target directory already contains files."""


class ConfigError(AuditError):
    """Audit configuration is invalid (unknown key, bad value, floor breach)."""
