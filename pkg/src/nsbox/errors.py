"""Exception types shared across the package.

Every failure mode that can cross a module boundary (and in particular
everything that maps to a nonzero wire status code) is defined here so the
service layer can translate exceptions to status codes in one place.
"""


class NsboxError(Exception):
    """Base class for all errors raised by this package."""


# --- behavior table validation ---

class DimensionMismatch(NsboxError):
    """Table shape does not match the declared alphabet sizes."""


class NegativeProbability(NsboxError):
    """A table entry is below zero beyond tolerance."""


class NotNormalized(NsboxError):
    """Entries for some input pair do not sum to one."""


class InputOutOfRange(NsboxError):
    """An input or output symbol falls outside its alphabet."""


class SignalingBehavior(NsboxError):
    """The behavior fails the no-signaling marginal conditions."""


class ZeroProbabilityCondition(NsboxError):
    """Conditioning on an output that has (near-)zero probability."""


class NotBinaryAlphabets(NsboxError):
    """Operation requires all four alphabets to be binary."""


class TooLargeToEnumerate(NsboxError):
    """Deterministic-vertex enumeration would exceed the configured cap."""


class BehaviorFormatError(NsboxError):
    """A behavior file could not be parsed."""


# --- transaction sampling ---

class InputMismatchReplay(NsboxError):
    """Same party retried a transaction with a different input."""


class TransactionSideConflict(NsboxError):
    """Concurrent writers stored conflicting data for one side."""


# --- persistence ---

class NotFound(NsboxError):
    """No record with the given key."""


class DuplicateKey(NsboxError):
    """A uniqueness constraint was violated."""


class LockTimeout(NsboxError):
    """Could not acquire the per-transaction lock in time."""


class StorageUnavailable(NsboxError):
    """The backing store could not be reached or written."""


# --- client ---

class ClientError(NsboxError):
    """Base class for errors surfaced by box clients."""


class AuthError(ClientError):
    """Missing or invalid API key (wire status 1)."""


class UnknownBox(ClientError):
    """No box with the given id (wire status 2)."""


class BadRequest(ClientError):
    """Malformed input symbol or parameters (wire status 3)."""


class RoleMismatch(ClientError):
    """API key is not bound to the claimed side of the box (wire status 5)."""


class ServerBusy(ClientError):
    """Lock timeout or storage failure on the server (wire status 6)."""


class TransportError(ClientError):
    """Request could not be completed after retries."""
