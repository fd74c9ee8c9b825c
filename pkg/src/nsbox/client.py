"""Clients for using one party's half of a box pair.

A client is one party's view of one box: the side is fixed at construction
and the client only ever sends that side's parameter, so it cannot be misused
to probe the counterpart's interface.  Two implementations share the
interface:

* :class:`HttpBoxClient` — speaks the JSON wire protocol to a server.
* :class:`LocalBoxClient` — drives the sampling engine in process, for tests
  and offline work.

The interface is deliberately tiny (``use(transaction_id, input) -> output``)
so a backend wrapping physical hardware could implement it too.
"""

from __future__ import annotations

import time
from typing import Optional

import httpx

from . import engine
from .behavior import Side
from .entropy import EntropySource, SystemEntropy
from .errors import (
    AuthError,
    BadRequest,
    ClientError,
    InputMismatchReplay,
    RoleMismatch,
    ServerBusy,
    TransportError,
    UnknownBox,
)
from .store import Store

_STATUS_ERRORS = {
    1: AuthError,
    2: UnknownBox,
    3: BadRequest,
    4: InputMismatchReplay,
    5: RoleMismatch,
    6: ServerBusy,
}


class BoxClient:
    """One party's handle on one box."""

    side: Side
    box_id: int

    def use(self, transaction_id: str, input: int) -> int:
        """Present ``input`` for this side of the given transaction.

        Returns the output symbol.  Safe to retry with the same arguments:
        the server replays the stored output.
        """
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class HttpBoxClient(BoxClient):
    """Wire-protocol client with bounded-backoff retries.

    Only transport failures are retried (idempotent replay on the server
    makes that safe); protocol errors are raised as their typed exceptions
    immediately.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str,
        box_id: int,
        side: Side,
        timeout: float = 10.0,
        max_attempts: int = 4,
        backoff: float = 0.1,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.box_id = int(box_id)
        self.side = side
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._http = httpx.Client(
            base_url=self.base_url, timeout=timeout, transport=transport
        )

    def close(self) -> None:
        self._http.close()

    def use(self, transaction_id: str, input: int) -> int:
        params = {
            "boxID": self.box_id,
            "transactionID": transaction_id,
            self.side.input_name: int(input),
            "apiKey": self.api_key,
        }
        last_exc: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(min(self.backoff * 2 ** (attempt - 1), 2.0))
            try:
                resp = self._http.get("/api/v1/useBox", params=params)
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            try:
                body = resp.json()
            except ValueError as exc:
                raise TransportError(
                    f"non-JSON reply (HTTP {resp.status_code})"
                ) from exc
            status = body.get("status", -1)
            if status == 0:
                return int(body[self.side.output_name])
            err = _STATUS_ERRORS.get(status, ClientError)
            raise err(body.get("error", f"status {status}"))
        raise TransportError(
            f"useBox failed after {self.max_attempts} attempts: {last_exc}"
        ) from last_exc


class LocalBoxClient(BoxClient):
    """In-process client running the engine directly against a store."""

    def __init__(
        self,
        store: Store,
        box_id: int,
        side: Side,
        entropy: Optional[EntropySource] = None,
    ):
        self.store = store
        self.box_id = int(box_id)
        self.side = side
        self.entropy = entropy if entropy is not None else SystemEntropy()

    def use(self, transaction_id: str, input: int) -> int:
        outcome = engine.use_box(
            self.store, self.box_id, transaction_id, self.side, input, self.entropy
        )
        return outcome.output
