"""Durable store for users, boxes, and transactions.

Two interchangeable implementations sit behind one narrow interface:

* :class:`SQLiteStore` — the production store.  An embedded SQLite database
  gives atomic, durable writes and cross-process mutual exclusion; writes to
  a transaction row happen inside ``BEGIN IMMEDIATE`` so a crash mid-section
  leaves no partial row.
* :class:`MemoryStore` — same contract, dict-backed, for tests and offline
  in-process use.

The one concurrency primitive exposed to callers is
:meth:`Store.with_transaction_lock`: the critical section runs with exclusive
access to that (box, transaction) row, and its writes become visible
atomically when the section ends.
"""

from __future__ import annotations

import contextlib
import json
import os
import secrets
import sqlite3
import threading
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional, TypeVar, Union

from .behavior import Behavior, Side, require_no_signaling
from .behavior_io import dumps_behavior, loads_behavior
from .errors import (
    DuplicateKey,
    LockTimeout,
    NotFound,
    StorageUnavailable,
    TransactionSideConflict,
)

DEFAULT_LOCK_TIMEOUT = 5.0
SCHEMA_VERSION = 1

T = TypeVar("T")


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    api_key: str
    display_name: str


@dataclass(frozen=True)
class BoxRecord:
    box_id: int
    behavior_name: str
    alice_user: str
    bob_user: str

    def role_of(self, user_id: str) -> Optional[Side]:
        if user_id == self.alice_user:
            return Side.ALICE
        if user_id == self.bob_user:
            return Side.BOB
        return None

    def user_for(self, side: Side) -> str:
        return self.alice_user if side is Side.ALICE else self.bob_user


@dataclass(frozen=True)
class TransactionRow:
    box_id: int
    transaction_id: str
    alice_input: Optional[int] = None
    alice_output: Optional[int] = None
    bob_input: Optional[int] = None
    bob_output: Optional[int] = None
    created_at: float = 0.0
    completed_at: Optional[float] = None
    version: int = 0

    def side_state(self, side: Side) -> Optional[tuple[int, int]]:
        if side is Side.ALICE:
            if self.alice_input is None:
                return None
            return (self.alice_input, self.alice_output)
        if self.bob_input is None:
            return None
        return (self.bob_input, self.bob_output)

    @property
    def is_complete(self) -> bool:
        return self.alice_input is not None and self.bob_input is not None

    def as_dict(self) -> dict:
        return {
            "boxID": self.box_id,
            "transactionID": self.transaction_id,
            "x": self.alice_input,
            "a": self.alice_output,
            "y": self.bob_input,
            "b": self.bob_output,
            "createdAt": self.created_at,
            "completedAt": self.completed_at,
        }


def new_api_key() -> str:
    # 192 bits from the OS CSPRNG.  A leading "-" would make the key look
    # like a command-line flag, so reroll those.
    while True:
        key = secrets.token_urlsafe(24)
        if not key.startswith("-"):
            return key


def new_user_id() -> str:
    return "u_" + secrets.token_hex(6)


class TransactionHandle:
    """Access to one transaction row, valid only inside the locked section.

    Writes are buffered on the handle; the store publishes them atomically
    when the section ends.  ``_base_version`` records the committed version
    the buffer was built on (None when no committed row existed), which the
    SQLite store uses for its optimistic cross-process check at flush time.
    """

    def __init__(self, owner, box_id: int, transaction_id: str):
        self._owner = owner
        self.box_id = box_id
        self.transaction_id = transaction_id
        self._open = True
        self._row: Optional[TransactionRow] = None
        self._base_version: Optional[int] = None

    def _check_open(self):
        if not self._open:
            raise StorageUnavailable("transaction handle used outside its locked section")

    def get_or_create_row(self) -> TransactionRow:
        self._check_open()
        if self._row is None:
            committed = self._owner.get_transaction(self.box_id, self.transaction_id)
            if committed is None:
                self._row = _new_transaction_row(self.box_id, self.transaction_id)
                self._base_version = None
            else:
                self._row = committed
                self._base_version = committed.version
        return self._row

    def store_side_result(self, side: Side, input: int, output: int) -> None:
        """Record one side's (input, output).

        Idempotent for identical values; conflicting values for an
        already-stored side raise TransactionSideConflict.  Marks the
        transaction complete when both sides are present.
        """
        self._check_open()
        updated = _apply_side_result(self.get_or_create_row(), side, int(input), int(output))
        if updated is not None:
            self._row = updated

    @property
    def _dirty(self) -> bool:
        if self._row is None:
            return False
        # fresh rows count as writes even before a side result lands
        return self._base_version is None or self._row.version > self._base_version


class _KeyedLocks:
    """Per-key mutual exclusion with timeout and refcounted cleanup."""

    def __init__(self):
        self._guard = threading.Lock()
        self._entries: dict = {}

    @contextlib.contextmanager
    def hold(self, key, timeout: float):
        with self._guard:
            entry = self._entries.get(key)
            if entry is None:
                entry = [threading.Lock(), 0]
                self._entries[key] = entry
            entry[1] += 1
        acquired = entry[0].acquire(timeout=timeout)
        try:
            if not acquired:
                raise LockTimeout(f"lock on {key} not acquired within {timeout}s")
            yield
        finally:
            if acquired:
                entry[0].release()
            with self._guard:
                entry[1] -= 1
                if entry[1] == 0 and self._entries.get(key) is entry:
                    del self._entries[key]


class Store:
    """Interface shared by the SQLite and in-memory stores."""

    lock_timeout: float = DEFAULT_LOCK_TIMEOUT

    # -- users ----------------------------------------------------------
    def create_user(self, display_name: str) -> UserRecord:
        raise NotImplementedError

    def get_user(self, user_id: str) -> UserRecord:
        raise NotImplementedError

    def get_user_by_key(self, api_key: str) -> UserRecord:
        raise NotImplementedError

    # -- behaviors ------------------------------------------------------
    def register_behavior(self, behavior: Behavior) -> None:
        raise NotImplementedError

    def get_behavior(self, name: str) -> Behavior:
        raise NotImplementedError

    def list_behaviors(self) -> list[str]:
        raise NotImplementedError

    # -- boxes ----------------------------------------------------------
    def create_box_instance(
        self, behavior_name: str, alice_user: str, bob_user: str
    ) -> BoxRecord:
        raise NotImplementedError

    def get_box(self, box_id: int) -> BoxRecord:
        raise NotImplementedError

    def list_boxes_for_user(self, user_id: str) -> list[BoxRecord]:
        raise NotImplementedError

    # -- transactions ---------------------------------------------------
    def with_transaction_lock(
        self,
        box_id: int,
        transaction_id: str,
        critical_section: Callable[[TransactionHandle], T],
        timeout: Optional[float] = None,
    ) -> T:
        raise NotImplementedError

    def get_transaction(self, box_id: int, transaction_id: str) -> Optional[TransactionRow]:
        raise NotImplementedError

    def export_transactions(self, box_id: Optional[int] = None) -> Iterator[str]:
        """Yield one JSON line per stored transaction, for audit."""
        raise NotImplementedError

    def purge_transactions(self, max_age_seconds: float) -> int:
        """Delete completed transactions older than the given age."""
        raise NotImplementedError

    # -- game reveals (outside the box abstraction) ----------------------
    def mark_revealed(self, box_id: int, transaction_id: str, side: Side) -> None:
        raise NotImplementedError

    def revealed_rounds(self, box_id: int) -> list[TransactionRow]:
        """Transactions where both parties consented to reveal, complete only."""
        raise NotImplementedError

    # -- shared helpers ---------------------------------------------------
    def _validated_box_args(self, behavior_name, alice_user, bob_user):
        if alice_user == bob_user:
            raise DuplicateKey("a box needs two distinct users")
        self.get_user(alice_user)
        self.get_user(bob_user)
        behavior = self.get_behavior(behavior_name)
        require_no_signaling(behavior)


def _new_transaction_row(box_id: int, transaction_id: str) -> TransactionRow:
    return TransactionRow(
        box_id=box_id, transaction_id=transaction_id, created_at=time.time()
    )


def _apply_side_result(
    row: TransactionRow, side: Side, input: int, output: int
) -> Optional[TransactionRow]:
    """Pure update step shared by both stores.

    Returns the new row, or None when the write is an idempotent no-op.
    """
    current = row.side_state(side)
    if current is not None:
        if current != (input, output):
            raise TransactionSideConflict(
                f"{side.value} side of {row.transaction_id!r} already stored "
                f"{current}, refusing {(input, output)}"
            )
        return None
    if side is Side.ALICE:
        row = replace(row, alice_input=input, alice_output=output)
    else:
        row = replace(row, bob_input=input, bob_output=output)
    if row.is_complete:
        row = replace(row, completed_at=time.time())
    return replace(row, version=row.version + 1)


class MemoryStore(Store):
    """Dict-backed store with the full contract, minus cross-process durability."""

    def __init__(self, lock_timeout: float = DEFAULT_LOCK_TIMEOUT):
        self.lock_timeout = lock_timeout
        self._state_guard = threading.RLock()
        self._users: dict[str, UserRecord] = {}
        self._keys: dict[str, str] = {}
        self._behaviors: dict[str, Behavior] = {}
        self._boxes: dict[int, BoxRecord] = {}
        self._next_box_id = 1
        self._transactions: dict[tuple[int, str], TransactionRow] = {}
        self._reveals: set[tuple[int, str, Side]] = set()
        self._locks = _KeyedLocks()

    def create_user(self, display_name: str) -> UserRecord:
        with self._state_guard:
            user = UserRecord(new_user_id(), new_api_key(), display_name)
            self._users[user.user_id] = user
            self._keys[user.api_key] = user.user_id
            return user

    def get_user(self, user_id: str) -> UserRecord:
        with self._state_guard:
            try:
                return self._users[user_id]
            except KeyError:
                raise NotFound(f"no user {user_id!r}") from None

    def get_user_by_key(self, api_key: str) -> UserRecord:
        with self._state_guard:
            user_id = self._keys.get(api_key)
            if user_id is None:
                raise NotFound("no user with that api key")
            return self._users[user_id]

    def register_behavior(self, behavior: Behavior) -> None:
        if not behavior.name:
            raise DuplicateKey("behavior must be named to be registered")
        with self._state_guard:
            self._behaviors[behavior.name] = behavior

    def get_behavior(self, name: str) -> Behavior:
        with self._state_guard:
            try:
                return self._behaviors[name]
            except KeyError:
                raise NotFound(f"no behavior {name!r}") from None

    def list_behaviors(self) -> list[str]:
        with self._state_guard:
            return sorted(self._behaviors)

    def create_box_instance(self, behavior_name, alice_user, bob_user) -> BoxRecord:
        with self._state_guard:
            self._validated_box_args(behavior_name, alice_user, bob_user)
            box = BoxRecord(self._next_box_id, behavior_name, alice_user, bob_user)
            self._next_box_id += 1
            self._boxes[box.box_id] = box
            return box

    def get_box(self, box_id: int) -> BoxRecord:
        with self._state_guard:
            try:
                return self._boxes[box_id]
            except KeyError:
                raise NotFound(f"no box {box_id!r}") from None

    def list_boxes_for_user(self, user_id: str) -> list[BoxRecord]:
        with self._state_guard:
            return [
                b for b in self._boxes.values()
                if user_id in (b.alice_user, b.bob_user)
            ]

    def with_transaction_lock(self, box_id, transaction_id, critical_section, timeout=None):
        timeout = self.lock_timeout if timeout is None else timeout
        key = (box_id, transaction_id)
        with self._locks.hold(key, timeout):
            handle = TransactionHandle(self, box_id, transaction_id)
            try:
                result = critical_section(handle)
            finally:
                handle._open = False
            # Publish the buffered row atomically; the keyed lock already
            # guarantees no concurrent section for this key in process.
            if handle._dirty:
                with self._state_guard:
                    self._transactions[key] = handle._row
            return result

    def get_transaction(self, box_id, transaction_id):
        with self._state_guard:
            return self._transactions.get((box_id, transaction_id))

    def export_transactions(self, box_id=None):
        with self._state_guard:
            rows = sorted(
                self._transactions.values(),
                key=lambda r: (r.box_id, r.created_at, r.transaction_id),
            )
        for row in rows:
            if box_id is None or row.box_id == box_id:
                yield json.dumps(row.as_dict(), separators=(",", ":"))

    def purge_transactions(self, max_age_seconds):
        cutoff = time.time() - max_age_seconds
        removed = 0
        with self._state_guard:
            for key, row in list(self._transactions.items()):
                if row.is_complete and (row.completed_at or 0) < cutoff:
                    del self._transactions[key]
                    self._reveals.difference_update(
                        {(key[0], key[1], s) for s in Side}
                    )
                    removed += 1
        return removed

    def mark_revealed(self, box_id, transaction_id, side):
        with self._state_guard:
            if (box_id, transaction_id) not in self._transactions:
                raise NotFound(f"no transaction {transaction_id!r} on box {box_id}")
            self._reveals.add((box_id, transaction_id, side))

    def revealed_rounds(self, box_id):
        with self._state_guard:
            out = []
            for (bid, tid), row in sorted(
                self._transactions.items(), key=lambda kv: kv[1].created_at
            ):
                if bid != box_id or not row.is_complete:
                    continue
                if all((bid, tid, s) in self._reveals for s in Side):
                    out.append(row)
            return out


_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    api_key TEXT NOT NULL UNIQUE,
    display_name TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS behaviors (
    name TEXT PRIMARY KEY,
    body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS boxes (
    box_id INTEGER PRIMARY KEY AUTOINCREMENT,
    behavior_name TEXT NOT NULL REFERENCES behaviors(name),
    alice_user TEXT NOT NULL REFERENCES users(user_id),
    bob_user TEXT NOT NULL REFERENCES users(user_id),
    CHECK (alice_user <> bob_user)
);
CREATE TABLE IF NOT EXISTS transactions (
    box_id INTEGER NOT NULL,
    transaction_id TEXT NOT NULL,
    alice_input INTEGER,
    alice_output INTEGER,
    bob_input INTEGER,
    bob_output INTEGER,
    created_at REAL NOT NULL,
    completed_at REAL,
    version INTEGER NOT NULL DEFAULT 0,
    PRIMARY KEY (box_id, transaction_id)
);
CREATE TABLE IF NOT EXISTS reveals (
    box_id INTEGER NOT NULL,
    transaction_id TEXT NOT NULL,
    side TEXT NOT NULL,
    PRIMARY KEY (box_id, transaction_id, side)
);
"""


class SQLiteStore(Store):
    """SQLite-backed store.

    Layout: one database file in ``directory`` (created if needed).  WAL
    journaling with synchronous=NORMAL makes commits atomic and durable
    against process crashes; set ``full_sync=True`` for power-loss-grade
    durability at a per-commit fsync cost.

    Locking: an in-process keyed lock serializes sections for the same
    (box, transaction) cheaply; the section's writes additionally run inside
    ``BEGIN IMMEDIATE``, which serializes writers across processes and makes
    the section atomic (a crash rolls the whole section back).
    """

    def __init__(
        self,
        directory: Union[str, os.PathLike],
        lock_timeout: float = DEFAULT_LOCK_TIMEOUT,
        full_sync: bool = False,
    ):
        self.directory = os.fspath(directory)
        self.lock_timeout = lock_timeout
        self.full_sync = full_sync
        self.path = os.path.join(self.directory, "nsbox.sqlite3")
        self._locks = _KeyedLocks()
        self._local = threading.local()
        self._behavior_cache: dict[str, Behavior] = {}
        self._cache_guard = threading.Lock()
        # Test seam: called right before a section's commit.
        self.before_commit_hook: Optional[Callable[[], None]] = None
        os.makedirs(self.directory, exist_ok=True)
        with self._connection() as conn:
            conn.executescript(_SCHEMA)
            if conn.execute("PRAGMA user_version").fetchone()[0] == 0:
                conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
            conn.commit()

    def _connect(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            try:
                conn = sqlite3.connect(self.path, timeout=self.lock_timeout)
            except sqlite3.Error as exc:
                raise StorageUnavailable(str(exc)) from exc
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute(
                "PRAGMA synchronous=%s" % ("FULL" if self.full_sync else "NORMAL")
            )
            conn.execute("PRAGMA foreign_keys=ON")
            conn.isolation_level = None  # manual transaction control
            self._local.conn = conn
        return conn

    @contextlib.contextmanager
    def _connection(self):
        yield self._connect()

    def close(self) -> None:
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None

    # -- users ----------------------------------------------------------

    def create_user(self, display_name: str) -> UserRecord:
        user = UserRecord(new_user_id(), new_api_key(), display_name)
        conn = self._connect()
        try:
            conn.execute(
                "INSERT INTO users (user_id, api_key, display_name) VALUES (?, ?, ?)",
                (user.user_id, user.api_key, user.display_name),
            )
            conn.commit()
        except sqlite3.IntegrityError as exc:
            raise DuplicateKey(str(exc)) from exc
        except sqlite3.Error as exc:
            raise StorageUnavailable(str(exc)) from exc
        return user

    def get_user(self, user_id: str) -> UserRecord:
        row = self._connect().execute(
            "SELECT user_id, api_key, display_name FROM users WHERE user_id = ?",
            (user_id,),
        ).fetchone()
        if row is None:
            raise NotFound(f"no user {user_id!r}")
        return UserRecord(*row)

    def get_user_by_key(self, api_key: str) -> UserRecord:
        row = self._connect().execute(
            "SELECT user_id, api_key, display_name FROM users WHERE api_key = ?",
            (api_key,),
        ).fetchone()
        if row is None:
            raise NotFound("no user with that api key")
        return UserRecord(*row)

    # -- behaviors ------------------------------------------------------

    def register_behavior(self, behavior: Behavior) -> None:
        if not behavior.name:
            raise DuplicateKey("behavior must be named to be registered")
        conn = self._connect()
        conn.execute(
            "INSERT OR REPLACE INTO behaviors (name, body) VALUES (?, ?)",
            (behavior.name, dumps_behavior(behavior)),
        )
        conn.commit()
        with self._cache_guard:
            self._behavior_cache[behavior.name] = behavior

    def get_behavior(self, name: str) -> Behavior:
        with self._cache_guard:
            cached = self._behavior_cache.get(name)
        if cached is not None:
            return cached
        row = self._connect().execute(
            "SELECT body FROM behaviors WHERE name = ?", (name,)
        ).fetchone()
        if row is None:
            raise NotFound(f"no behavior {name!r}")
        behavior = loads_behavior(row[0])
        with self._cache_guard:
            self._behavior_cache[name] = behavior
        return behavior

    def list_behaviors(self) -> list[str]:
        rows = self._connect().execute("SELECT name FROM behaviors ORDER BY name")
        return [r[0] for r in rows]

    # -- boxes ----------------------------------------------------------

    def create_box_instance(self, behavior_name, alice_user, bob_user) -> BoxRecord:
        self._validated_box_args(behavior_name, alice_user, bob_user)
        conn = self._connect()
        try:
            cur = conn.execute(
                "INSERT INTO boxes (behavior_name, alice_user, bob_user) VALUES (?, ?, ?)",
                (behavior_name, alice_user, bob_user),
            )
            conn.commit()
        except sqlite3.IntegrityError as exc:
            raise DuplicateKey(str(exc)) from exc
        return BoxRecord(int(cur.lastrowid), behavior_name, alice_user, bob_user)

    def get_box(self, box_id: int) -> BoxRecord:
        row = self._connect().execute(
            "SELECT box_id, behavior_name, alice_user, bob_user FROM boxes WHERE box_id = ?",
            (box_id,),
        ).fetchone()
        if row is None:
            raise NotFound(f"no box {box_id!r}")
        return BoxRecord(int(row[0]), row[1], row[2], row[3])

    def list_boxes_for_user(self, user_id: str) -> list[BoxRecord]:
        rows = self._connect().execute(
            "SELECT box_id, behavior_name, alice_user, bob_user FROM boxes "
            "WHERE alice_user = ? OR bob_user = ? ORDER BY box_id",
            (user_id, user_id),
        )
        return [BoxRecord(int(r[0]), r[1], r[2], r[3]) for r in rows]

    # -- transactions ---------------------------------------------------

    _ROW_COLS = (
        "box_id, transaction_id, alice_input, alice_output, bob_input, "
        "bob_output, created_at, completed_at, version"
    )

    def _row_from_db(self, r) -> TransactionRow:
        return TransactionRow(
            box_id=int(r[0]), transaction_id=r[1],
            alice_input=r[2], alice_output=r[3],
            bob_input=r[4], bob_output=r[5],
            created_at=r[6], completed_at=r[7], version=int(r[8]),
        )

    def with_transaction_lock(self, box_id, transaction_id, critical_section, timeout=None):
        """Run the section under the per-transaction lock and publish its
        writes in one short database transaction.

        The database write lock is held only for the flush, never across the
        section, so sections for unrelated transactions cannot starve each
        other.  Cross-process races on the same transaction are caught by an
        optimistic version check at flush time; the losing section re-runs
        against the winner's committed row (so a section may execute more
        than once, but only one execution's writes ever commit).
        """
        timeout = self.lock_timeout if timeout is None else timeout
        deadline = time.monotonic() + timeout
        with self._locks.hold((box_id, transaction_id), timeout):
            while True:
                handle = TransactionHandle(self, box_id, transaction_id)
                try:
                    result = critical_section(handle)
                    flushed = self._flush(handle, deadline)
                finally:
                    handle._open = False
                if flushed:
                    return result
                if time.monotonic() >= deadline:
                    raise LockTimeout(
                        f"lost write races on {transaction_id!r} until the "
                        f"{timeout}s deadline"
                    )
                time.sleep(0.002)

    def _flush(self, handle: TransactionHandle, deadline: float) -> bool:
        """Write the handle's buffered row.  False means a concurrent writer
        got there first and the section must re-run."""
        if not handle._dirty:
            return True
        row = handle._row
        conn = self._connect()
        remaining = max(0.001, deadline - time.monotonic())
        conn.execute(f"PRAGMA busy_timeout = {max(1, int(remaining * 1000))}")
        try:
            conn.execute("BEGIN IMMEDIATE")
        except sqlite3.OperationalError as exc:
            if "locked" in str(exc) or "busy" in str(exc):
                raise LockTimeout(str(exc)) from exc
            raise StorageUnavailable(str(exc)) from exc
        try:
            if handle._base_version is None:
                cur = conn.execute(
                    "INSERT OR IGNORE INTO transactions "
                    f"({self._ROW_COLS}) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        row.box_id, row.transaction_id,
                        row.alice_input, row.alice_output,
                        row.bob_input, row.bob_output,
                        row.created_at, row.completed_at, row.version,
                    ),
                )
            else:
                cur = conn.execute(
                    "UPDATE transactions SET alice_input = ?, alice_output = ?, "
                    "bob_input = ?, bob_output = ?, completed_at = ?, version = ? "
                    "WHERE box_id = ? AND transaction_id = ? AND version = ?",
                    (
                        row.alice_input, row.alice_output,
                        row.bob_input, row.bob_output,
                        row.completed_at, row.version,
                        row.box_id, row.transaction_id, handle._base_version,
                    ),
                )
            if cur.rowcount != 1:
                conn.execute("ROLLBACK")
                return False
            if self.before_commit_hook is not None:
                self.before_commit_hook()
            conn.execute("COMMIT")
            return True
        except BaseException:
            with contextlib.suppress(sqlite3.Error):
                conn.execute("ROLLBACK")
            raise

    def get_transaction(self, box_id, transaction_id):
        row = self._connect().execute(
            f"SELECT {self._ROW_COLS} FROM transactions WHERE box_id = ? AND transaction_id = ?",
            (box_id, transaction_id),
        ).fetchone()
        return None if row is None else self._row_from_db(row)

    def export_transactions(self, box_id=None):
        query = f"SELECT {self._ROW_COLS} FROM transactions"
        args: tuple = ()
        if box_id is not None:
            query += " WHERE box_id = ?"
            args = (box_id,)
        query += " ORDER BY box_id, created_at, transaction_id"
        for r in self._connect().execute(query, args):
            yield json.dumps(self._row_from_db(r).as_dict(), separators=(",", ":"))

    def purge_transactions(self, max_age_seconds):
        cutoff = time.time() - max_age_seconds
        conn = self._connect()
        cur = conn.execute(
            "DELETE FROM transactions WHERE completed_at IS NOT NULL AND completed_at < ?",
            (cutoff,),
        )
        conn.execute(
            "DELETE FROM reveals WHERE NOT EXISTS (SELECT 1 FROM transactions t "
            "WHERE t.box_id = reveals.box_id AND t.transaction_id = reveals.transaction_id)"
        )
        conn.commit()
        return cur.rowcount

    def mark_revealed(self, box_id, transaction_id, side):
        conn = self._connect()
        exists = conn.execute(
            "SELECT 1 FROM transactions WHERE box_id = ? AND transaction_id = ?",
            (box_id, transaction_id),
        ).fetchone()
        if exists is None:
            raise NotFound(f"no transaction {transaction_id!r} on box {box_id}")
        conn.execute(
            "INSERT OR IGNORE INTO reveals (box_id, transaction_id, side) VALUES (?, ?, ?)",
            (box_id, transaction_id, side.value),
        )
        conn.commit()

    def revealed_rounds(self, box_id):
        rows = self._connect().execute(
            f"SELECT {self._ROW_COLS} FROM transactions t WHERE box_id = ? "
            "AND alice_input IS NOT NULL AND bob_input IS NOT NULL "
            "AND (SELECT COUNT(*) FROM reveals r WHERE r.box_id = t.box_id "
            "     AND r.transaction_id = t.transaction_id) = 2 "
            "ORDER BY created_at",
            (box_id,),
        )
        return [self._row_from_db(r) for r in rows]
