"""HTTP service exposing box transactions over a fixed JSON wire format.

Protocol-level failures are reported in-band: HTTP 200 with a nonzero
``status`` in the body, so the reply shape is uniform for clients.  Status
codes:

====  =================================================
 0    success
 1    bad or missing apiKey
 2    unknown boxID
 3    invalid input symbol, or missing/duplicated x/y
 4    transaction replayed with a different input
 5    key not bound to the requested side of that box
 6    lock timeout or storage failure
====  =================================================

Success bodies are emitted byte-exactly as ``{"a":1,"boxID":1,"status":0}``
(or ``"b"`` for the y side): compact separators, that key order.

Administration (user and box creation) lives under /api/v1/admin and uses a
separate admin credential, returning plain HTTP errors; it is not part of
the box wire protocol.  The /api/v1/game endpoints implement the optional
post-round reveal exchange used by the web console; revealing is outside the
box abstraction and requires both parties' consent before anything about the
counterpart is disclosed.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Optional

from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse, RedirectResponse, Response
from fastapi.staticfiles import StaticFiles

from . import engine
from .behavior import Side, chsh_payoff
from .behavior_io import loads_behavior
from .boxes import BUILTIN_BUILDERS, builtin_behavior
from .entropy import EntropySource, SeededEntropy, SystemEntropy
from .errors import (
    BehaviorFormatError,
    InputMismatchReplay,
    InputOutOfRange,
    LockTimeout,
    NotFound,
    NsboxError,
    SignalingBehavior,
    StorageUnavailable,
)
from .store import MemoryStore, SQLiteStore, Store

log = logging.getLogger("nsbox.api")

STATUS_OK = 0
STATUS_BAD_KEY = 1
STATUS_UNKNOWN_BOX = 2
STATUS_BAD_REQUEST = 3
STATUS_REPLAY_MISMATCH = 4
STATUS_ROLE_MISMATCH = 5
STATUS_BUSY = 6


def wire_json(payload: dict) -> Response:
    """Serialize with compact separators, preserving key insertion order."""
    return Response(
        content=json.dumps(payload, separators=(",", ":")),
        media_type="application/json",
    )


def store_from_env() -> Store:
    path = os.environ.get("NSBOX_STORE", "")
    timeout = float(os.environ.get("NSBOX_LOCK_TIMEOUT", "5"))
    if path in ("", ":memory:"):
        return MemoryStore(lock_timeout=timeout)
    return SQLiteStore(path, lock_timeout=timeout)


def entropy_from_env() -> EntropySource:
    seed = os.environ.get("NSBOX_SEED")
    if seed is None or seed == "":
        return SystemEntropy()
    return SeededEntropy(int(seed))


def create_app(
    store: Optional[Store] = None,
    admin_key: Optional[str] = None,
    entropy: Optional[EntropySource] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    """Build the service.  Arguments default to environment configuration:

    NSBOX_STORE         store directory ('' or ':memory:' for in-memory)
    NSBOX_ADMIN_KEY     credential for /api/v1/admin endpoints
    NSBOX_SEED          integer seed for a deterministic entropy stream
                        (leave unset for OS entropy)
    NSBOX_LOCK_TIMEOUT  per-transaction lock timeout, seconds
    NSBOX_UI_DIR        directory of static web console files to mount at /ui
    """
    store = store if store is not None else store_from_env()
    admin_key = admin_key if admin_key is not None else os.environ.get("NSBOX_ADMIN_KEY", "")
    entropy = entropy if entropy is not None else entropy_from_env()
    ui_dir = ui_dir if ui_dir is not None else os.environ.get("NSBOX_UI_DIR", "")

    app = FastAPI(title="nsbox", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.store = store
    app.state.entropy = entropy

    def error_body(box_id, status: int, message: str) -> Response:
        return wire_json({"boxID": box_id, "status": status, "error": message})

    def authed_user(params):
        keys = params.getlist("apiKey")
        if len(keys) != 1 or not keys[0]:
            return None
        try:
            return store.get_user_by_key(keys[0])
        except NotFound:
            return None

    @app.get("/api/v1/useBox")
    def use_box(request: Request) -> Response:
        params = request.query_params
        box_ref = params.get("boxID", "")
        status = STATUS_OK
        user = box = side = None
        try:
            user = authed_user(params)
            if user is None:
                status = STATUS_BAD_KEY
                return error_body(0, status, "bad or missing apiKey")

            try:
                box_id = int(box_ref)
                box = store.get_box(box_id)
            except (ValueError, NotFound):
                status = STATUS_UNKNOWN_BOX
                return error_body(0, status, f"unknown boxID {box_ref!r}")

            xs, ys = params.getlist("x"), params.getlist("y")
            if len(xs) + len(ys) != 1:
                status = STATUS_BAD_REQUEST
                return error_body(
                    box.box_id, status, "exactly one of x or y must be given, once"
                )
            side = Side.ALICE if xs else Side.BOB
            raw = (xs or ys)[0]

            transaction_id = params.get("transactionID", "")
            if not transaction_id:
                status = STATUS_BAD_REQUEST
                return error_body(box.box_id, status, "transactionID is required")

            if box.role_of(user.user_id) is not side:
                status = STATUS_ROLE_MISMATCH
                return error_body(
                    box.box_id, status,
                    f"key is not the {side.input_name} side of box {box.box_id}",
                )

            try:
                symbol = int(raw)
            except ValueError:
                status = STATUS_BAD_REQUEST
                return error_body(box.box_id, status, f"input {raw!r} is not a symbol")

            try:
                outcome = engine.use_box(
                    store, box.box_id, transaction_id, side, symbol, entropy
                )
            except InputOutOfRange as exc:
                status = STATUS_BAD_REQUEST
                return error_body(box.box_id, status, str(exc))
            except InputMismatchReplay as exc:
                status = STATUS_REPLAY_MISMATCH
                return error_body(box.box_id, status, str(exc))
            except (LockTimeout, StorageUnavailable, NsboxError) as exc:
                status = STATUS_BUSY
                return error_body(box.box_id, status, str(exc))

            return wire_json(
                {side.output_name: outcome.output, "boxID": box.box_id, "status": 0}
            )
        finally:
            # One line per request; the output value is deliberately absent.
            log.info(
                "useBox user=%s box=%s transaction=%s side=%s status=%d",
                user.user_id if user else "-",
                box.box_id if box else box_ref or "-",
                params.get("transactionID", "-"),
                side.value if side else "-",
                status,
            )

    @app.get("/api/v1/listBoxes")
    def list_boxes(request: Request) -> Response:
        user = authed_user(request.query_params)
        if user is None:
            return error_body(0, STATUS_BAD_KEY, "bad or missing apiKey")
        entries = [
            {
                "boxID": b.box_id,
                "role": b.role_of(user.user_id).value,
                "behavior": b.behavior_name,
            }
            for b in store.list_boxes_for_user(user.user_id)
        ]
        return wire_json({"status": 0, "boxes": entries})

    # -- admin ------------------------------------------------------------

    def require_admin(request: Request) -> None:
        given = request.headers.get("x-admin-key", "")
        if not admin_key or given != admin_key:
            raise HTTPException(status_code=401, detail="bad admin credential")

    @app.post("/api/v1/admin/createUser")
    def create_user(request: Request, displayName: str = Form(...)):
        require_admin(request)
        user = store.create_user(displayName)
        return JSONResponse(
            {
                "userID": user.user_id,
                "apiKey": user.api_key,
                "displayName": user.display_name,
            }
        )

    @app.post("/api/v1/admin/createBox")
    async def create_box(
        request: Request,
        alice: str = Form(...),
        bob: str = Form(...),
        behaviorName: str = Form(""),
        behaviorFile: Optional[UploadFile] = File(None),
    ):
        require_admin(request)
        if (behaviorFile is None) == (behaviorName == ""):
            raise HTTPException(
                status_code=400,
                detail="give exactly one of behaviorName or behaviorFile",
            )
        try:
            if behaviorFile is not None:
                text = (await behaviorFile.read()).decode("utf-8")
                behavior = loads_behavior(text)
            else:
                try:
                    behavior = store.get_behavior(behaviorName)
                except NotFound:
                    behavior = builtin_behavior(behaviorName)
            store.register_behavior(behavior)
            box = store.create_box_instance(behavior.name, alice, bob)
        except (BehaviorFormatError, SignalingBehavior, NotFound, NsboxError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return JSONResponse(
            {
                "boxID": box.box_id,
                "behavior": box.behavior_name,
                "alice": box.alice_user,
                "bob": box.bob_user,
            }
        )

    @app.get("/api/v1/admin/builtins")
    def list_builtins(request: Request):
        require_admin(request)
        return JSONResponse({"builtins": sorted(BUILTIN_BUILDERS)})

    # -- game reveal exchange ----------------------------------------------

    def box_member(request: Request):
        """(user, box) if the key is valid and bound to the box, else error Response."""
        params = request.query_params
        user = authed_user(params)
        if user is None:
            return None, None, error_body(0, STATUS_BAD_KEY, "bad or missing apiKey")
        try:
            box = store.get_box(int(params.get("boxID", "")))
        except (ValueError, NotFound):
            return None, None, error_body(
                0, STATUS_UNKNOWN_BOX, "unknown boxID"
            )
        if box.role_of(user.user_id) is None:
            return None, None, error_body(
                box.box_id, STATUS_ROLE_MISMATCH, "key not bound to this box"
            )
        return user, box, None

    @app.post("/api/v1/game/reveal")
    def reveal(request: Request) -> Response:
        user, box, err = box_member(request)
        if err is not None:
            return err
        transaction_id = request.query_params.get("transactionID", "")
        if not transaction_id:
            return error_body(box.box_id, STATUS_BAD_REQUEST, "transactionID is required")
        row = store.get_transaction(box.box_id, transaction_id)
        if row is None:
            return error_body(
                box.box_id, STATUS_BAD_REQUEST, f"no transaction {transaction_id!r}"
            )
        store.mark_revealed(box.box_id, transaction_id, box.role_of(user.user_id))
        return wire_json({"status": 0, "boxID": box.box_id, "transactionID": transaction_id})

    @app.get("/api/v1/game/scoreboard")
    def scoreboard(request: Request) -> Response:
        user, box, err = box_member(request)
        if err is not None:
            return err
        behavior = store.get_behavior(box.behavior_name)
        binary = behavior.alphabets.shape == (2, 2, 2, 2)
        rounds = []
        total = 0
        for row in store.revealed_rounds(box.box_id):
            payoff = (
                chsh_payoff(row.alice_input, row.bob_input, row.alice_output, row.bob_output)
                if binary
                else None
            )
            rounds.append(
                {
                    "transactionID": row.transaction_id,
                    "x": row.alice_input,
                    "y": row.bob_input,
                    "a": row.alice_output,
                    "b": row.bob_output,
                    "payoff": payoff,
                }
            )
            total += payoff or 0
        mean = (total / len(rounds)) if (rounds and binary) else None
        return wire_json(
            {"status": 0, "boxID": box.box_id, "rounds": rounds, "meanPayoff": mean}
        )

    @app.get("/api/v1/health")
    def health() -> Response:
        return wire_json({"status": 0})

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse("/ui/")

    return app
