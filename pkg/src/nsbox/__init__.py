"""Trusted-server simulation of bipartite no-signaling boxes.

The library half analyzes behaviors P(a, b | x, y): validation, no-signaling
checks, locality via linear programming, and exact CHSH payoffs.  The service
half samples those behaviors transaction by transaction over HTTP so two
mutually distrustful parties can share a box without being able to signal
through it.
"""

from .behavior import (
    Alphabets,
    Behavior,
    Distribution,
    NoSignalingReport,
    Side,
    check_no_signaling,
    chsh_expected_payoff,
    chsh_payoff,
    conditional,
    marginal,
    require_no_signaling,
    total_variation,
    validate_behavior,
)
from .behavior_io import (
    dumps_behavior,
    load_behavior,
    loads_behavior,
    save_behavior,
)
from .boxes import (
    BINARY,
    builtin_behavior,
    make_isotropic,
    make_local_deterministic,
    make_pr_box,
    make_tsirelson_box,
    make_uniform_box,
)
from .client import BoxClient, HttpBoxClient, LocalBoxClient
from .engine import (
    FactorizeReport,
    RoundLog,
    UseOutcome,
    empirical_table,
    factorize_check,
    no_signaling_audit,
    sample_rounds,
    use_box,
)
from .entropy import EntropySource, FixedEntropy, SeededEntropy, SystemEntropy
from .errors import (
    AuthError,
    BadRequest,
    BehaviorFormatError,
    ClientError,
    DimensionMismatch,
    DuplicateKey,
    InputMismatchReplay,
    InputOutOfRange,
    LockTimeout,
    NegativeProbability,
    NotBinaryAlphabets,
    NotFound,
    NotNormalized,
    NsboxError,
    RoleMismatch,
    ServerBusy,
    SignalingBehavior,
    StorageUnavailable,
    TooLargeToEnumerate,
    TransactionSideConflict,
    TransportError,
    UnknownBox,
    ZeroProbabilityCondition,
)
from .game import (
    GameRecord,
    Round,
    VerifyReport,
    classical_bound,
    deterministic_strategy_payoffs,
    play_boxed,
    play_classical,
    transaction_ids,
    verify_campaign,
)
from .locality import (
    LocalityCertificate,
    deterministic_strategies,
    deterministic_vertices,
    is_local,
)
from .service import create_app
from .store import (
    BoxRecord,
    MemoryStore,
    SQLiteStore,
    Store,
    TransactionRow,
    UserRecord,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
