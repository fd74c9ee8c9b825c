"""Shared test plumbing: a real HTTP server on a loopback port, plus
provisioning shortcuts."""

from __future__ import annotations

import threading
import time

import uvicorn

from nsbox.behavior import Behavior
from nsbox.store import Store

GOLDEN_SEED = 5  # server draw seed reproducing the recorded golden bodies


class LiveServer:
    """Runs an ASGI app under uvicorn in a daemon thread on a free port."""

    def __init__(self, app):
        self._config = uvicorn.Config(
            app, host="127.0.0.1", port=0, log_level="warning", access_log=False
        )
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> "LiveServer":
        self._thread.start()
        deadline = time.monotonic() + 10.0
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start within 10s")
            time.sleep(0.01)
        sock = self._server.servers[0].sockets[0]
        self.port = sock.getsockname()[1]
        self.url = f"http://127.0.0.1:{self.port}"
        return self

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10.0)


def provision(store: Store, behavior: Behavior):
    """Register the behavior and one box with two fresh users.

    Returns (box, alice_user, bob_user).
    """
    store.register_behavior(behavior)
    alice = store.create_user("alice")
    bob = store.create_user("bob")
    box = store.create_box_instance(behavior.name, alice.user_id, bob.user_id)
    return box, alice, bob
