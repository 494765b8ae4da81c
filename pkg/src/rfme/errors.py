"""Exception types raised across the package.

Every error a caller is expected to handle derives from RfmeError, so a
CLI wrapper can catch one base class and exit cleanly.
"""


class RfmeError(Exception):
    """Base class for all package errors."""


class MalformedRecord(RfmeError):
    """Record has the wrong field count, bad JSON, or an unparseable timestamp."""


class UnknownEventType(RfmeError):
    """Event-type token outside the closed vocabulary."""


class EmptyUserId(RfmeError):
    """Record with an empty user_id field."""


class InputIoError(RfmeError):
    """Input file missing or unreadable."""


class AllRecordsRejected(RfmeError):
    """No record in the file parsed; almost always a schema mismatch."""


class NoActivityInWindow(RfmeError):
    """A per-user feature was requested for a user with no in-window session."""


class EmptyWindow(RfmeError):
    """No user has any in-window activity."""


class EmptyInput(RfmeError):
    """An operation that needs at least one row received none."""


class KExceedsDistinctPoints(RfmeError):
    """Requested more clusters than there are distinct points."""


class IndexOutOfRange(RfmeError):
    """An assignment refers to a centroid index that does not exist."""


class WrongClusterCount(RfmeError):
    """Segment labeling is defined only for exactly four clusters."""


class EmptyCluster(RfmeError):
    """A cluster with no members reached profiling; repair should prevent this."""


class InvalidSpec(RfmeError):
    """Generator archetype parameters violate their invariants."""


class KeyMismatch(RfmeError):
    """Two labelings to be compared do not cover the same keys."""


class ConfigInvalid(RfmeError):
    """Run configuration is missing required keys or violates invariants."""


class ModelMissing(RfmeError):
    """Scoring requested but the model artifact does not exist."""


class FeatureOrderMismatch(RfmeError):
    """Model artifact was trained with a different feature order."""
