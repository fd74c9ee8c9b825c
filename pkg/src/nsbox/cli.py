"""Command-line harness: provision users and boxes, replay the four-call
demo session, play CHSH campaigns, and verify a deployment statistically.

Subcommands
    serve         run the HTTP service
    admin         create-user | create-box | list
    demo-session  the scripted two-transaction correlated/anticorrelated demo
    play          CHSH campaign, boxed or classical strategy
    verify        empirical table + no-signaling audit of a deployment

Campaign input randomness is client-side and seedable with --seed; the
server's own draw entropy is configured on the server (NSBOX_SEED).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import random
import sys
from typing import Optional

import httpx

from .behavior import Behavior, Side
from .behavior_io import load_behavior
from .boxes import builtin_behavior
from .client import BoxClient, HttpBoxClient, LocalBoxClient
from .entropy import SeededEntropy, SystemEntropy
from .errors import ClientError, NsboxError
from .game import (
    GameRecord,
    classical_bound,
    play_boxed,
    play_classical,
    transaction_ids,
    verify_campaign,
)
from .store import MemoryStore


def _parse_date(text: Optional[str]) -> Optional[_dt.date]:
    if not text:
        return None
    return _dt.datetime.strptime(text, "%Y%m%d").date()


def _admin_post(args, path: str, **kwargs) -> httpx.Response:
    resp = httpx.post(
        args.server.rstrip("/") + path,
        headers={"X-Admin-Key": args.admin_key or ""},
        timeout=30.0,
        **kwargs,
    )
    if resp.status_code != 200:
        detail = resp.json().get("detail", resp.text) if resp.content else resp.text
        raise ClientError(f"{path} failed (HTTP {resp.status_code}): {detail}")
    return resp


def _load_cli_behavior(args) -> Behavior:
    if getattr(args, "behavior_file", None):
        return load_behavior(args.behavior_file)
    return builtin_behavior(args.behavior)


class _LocalDeployment:
    """In-process server stand-in: a MemoryStore with one provisioned box."""

    def __init__(self, behavior: Behavior, seed: Optional[int]):
        self.store = MemoryStore()
        self.store.register_behavior(behavior)
        alice = self.store.create_user("alice")
        bob = self.store.create_user("bob")
        self.box = self.store.create_box_instance(
            behavior.name, alice.user_id, bob.user_id
        )
        self._entropy = SeededEntropy(seed) if seed is not None else SystemEntropy()

    def clients(self) -> tuple[BoxClient, BoxClient]:
        mk = lambda side: LocalBoxClient(
            self.store, self.box.box_id, side, self._entropy
        )
        return mk(Side.ALICE), mk(Side.BOB)


def _client_pair_factory(args, behavior: Behavior):
    """Returns (make_clients, behavior) honoring --local."""
    if args.local:
        seed = args.seed + 1 if args.seed is not None else None
        deployment = _LocalDeployment(behavior, seed)
        return deployment.clients
    if not (args.alice_key and args.bob_key and args.box is not None):
        raise ClientError("need --box, --alice-key and --bob-key (or --local)")

    def make():
        return (
            HttpBoxClient(args.server, args.alice_key, args.box, Side.ALICE),
            HttpBoxClient(args.server, args.bob_key, args.box, Side.BOB),
        )

    return make


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .store import SQLiteStore

    store = SQLiteStore(args.store) if args.store else MemoryStore()
    entropy = SeededEntropy(args.seed) if args.seed is not None else SystemEntropy()
    app = create_app(
        store=store,
        admin_key=args.admin_key or "",
        entropy=entropy,
        ui_dir=args.ui_dir or "",
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_admin(args) -> int:
    if args.admin_cmd == "create-user":
        body = _admin_post(
            args, "/api/v1/admin/createUser", data={"displayName": args.display_name}
        ).json()
        print(f"userID  {body['userID']}")
        print(f"apiKey  {body['apiKey']}")
        return 0

    if args.admin_cmd == "create-box":
        users = {}
        for role, name in (("alice", args.alice), ("bob", args.bob)):
            if args.existing_users:
                users[role] = {"userID": name, "apiKey": "(existing user)"}
            else:
                users[role] = _admin_post(
                    args, "/api/v1/admin/createUser", data={"displayName": name}
                ).json()
        data = {"alice": users["alice"]["userID"], "bob": users["bob"]["userID"]}
        files = None
        if args.behavior_file:
            files = {"behaviorFile": open(args.behavior_file, "rb")}
        else:
            data["behaviorName"] = args.behavior
        try:
            body = _admin_post(
                args, "/api/v1/admin/createBox", data=data, files=files
            ).json()
        finally:
            if files:
                files["behaviorFile"].close()
        print(f"boxID     {body['boxID']}  behavior {body['behavior']}")
        print(f"aliceKey  {users['alice']['apiKey']}")
        print(f"bobKey    {users['bob']['apiKey']}")
        return 0

    # list
    resp = httpx.get(
        args.server.rstrip("/") + "/api/v1/listBoxes",
        params={"apiKey": args.api_key or ""},
        timeout=30.0,
    ).json()
    if resp.get("status") != 0:
        raise ClientError(resp.get("error", "listBoxes failed"))
    print(f"{'boxID':>6}  {'role':<6} behavior")
    for b in resp["boxes"]:
        print(f"{b['boxID']:>6}  {b['role']:<6} {b['behavior']}")
    return 0


def cmd_demo_session(args) -> int:
    """The scripted session: two transactions, four calls.

    Transaction 1: Alice x=0, then Bob y=0 (outputs should agree on a PR
    box).  Transaction 2: Bob y=1 first, then Alice x=1 (outputs should
    differ).
    """
    ids = list(transaction_ids(2, _parse_date(args.date), start=args.start))
    alice = HttpBoxClient(args.server, args.alice_key, args.box, Side.ALICE)
    bob = HttpBoxClient(args.server, args.bob_key, args.box, Side.BOB)
    calls = [
        (alice, ids[0], 0),
        (bob, ids[0], 0),
        (bob, ids[1], 1),
        (alice, ids[1], 1),
    ]
    outs = {}
    with alice, bob:
        for client, tid, symbol in calls:
            out = client.use(tid, symbol)
            outs[(client.side, tid)] = out
            print(
                f"GET /api/v1/useBox?boxID={client.box_id}&transactionID={tid}"
                f"&{client.side.input_name}={symbol}&apiKey=***"
            )
            print(
                f'  -> {{"{client.side.output_name}":{out},'
                f'"boxID":{client.box_id},"status":0}}'
            )
    a1, b1 = outs[(Side.ALICE, ids[0])], outs[(Side.BOB, ids[0])]
    a2, b2 = outs[(Side.ALICE, ids[1])], outs[(Side.BOB, ids[1])]
    print(f"transaction {ids[0]} (x=0, y=0): a={a1} b={b1}")
    print(f"transaction {ids[1]} (x=1, y=1): a={a2} b={b2}")
    if args.expect_pr:
        if a1 != b1 or a2 == b2:
            print("PR correlation check FAILED", file=sys.stderr)
            return 1
        print("PR correlation check passed: equal at x=y=0, opposite at x=y=1")
    return 0


def _print_play_summary(record: GameRecord) -> None:
    half = record.ci_halfwidth()
    print(
        f"{record.strategy} strategy, {record.n} rounds: "
        f"mean payoff {record.mean_payoff:+.4f} "
        f"(99% CI half-width {half:.4f}), "
        f"{record.wins} wins / {record.losses} losses"
    )


def cmd_play(args) -> GameRecord:
    rng = random.Random(args.seed)
    ids = transaction_ids(args.rounds, _parse_date(args.date), start=args.start)
    if args.strategy == "classical":
        record = play_classical(args.rounds, rng)
        print(f"classical bound over deterministic strategies: {classical_bound()}")
    else:
        behavior = _load_cli_behavior(args)
        make = _client_pair_factory(args, behavior)
        alice, bob = make()
        with alice, bob:
            record = play_boxed(
                alice, bob, args.rounds, rng, behavior_name=behavior.name, ids=ids
            )
    _print_play_summary(record)
    if args.records:
        with open(args.records, "w") as fh:
            record.dump_jsonl(fh)
        print(f"wrote {record.n} round records to {args.records}")
    return record


def cmd_verify(args):
    behavior = _load_cli_behavior(args)
    rng = random.Random(args.seed)
    make = _client_pair_factory(args, behavior)
    ids = transaction_ids(args.rounds, _parse_date(args.date), start=args.start)
    workers = 1 if args.local else args.workers
    report = verify_campaign(make, behavior, args.rounds, rng, workers=workers, ids=ids)
    print(f"verify {behavior.name or '(file)'}: {report.n} transactions")
    print("TV(empirical, declared) per input pair:")
    for x in range(report.tv_by_pair.shape[0]):
        for y in range(report.tv_by_pair.shape[1]):
            print(f"  x={x} y={y}: {report.tv_by_pair[x, y]:.4f}")
    print(f"max TV: {report.max_tv:.4f}")
    for side in ("alice", "bob"):
        print(
            f"{side} output stability: vs counterpart input "
            f"TV={report.audit_tv_input[side]:.4f}, vs call order "
            f"TV={report.audit_tv_order[side]:.4f}"
        )
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsbox", description="No-signaling box service, clients, and CHSH games"
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_server_opts(p, admin=False):
        p.add_argument("--server", default="http://127.0.0.1:8000")
        if admin:
            p.add_argument("--admin-key", default="")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", default="", help="store directory (default: in-memory)")
    p.add_argument("--admin-key", default="")
    p.add_argument("--seed", type=int, default=None, help="deterministic draw entropy")
    p.add_argument("--ui-dir", default="", help="static web console directory")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("admin", help="provisioning commands")
    add_server_opts(p, admin=True)
    padmin = p.add_subparsers(dest="admin_cmd", required=True)
    q = padmin.add_parser("create-user")
    q.add_argument("display_name")
    q = padmin.add_parser("create-box")
    q.add_argument("behavior", nargs="?", default="pr",
                   help="built-in behavior name (default pr)")
    q.add_argument("alice", help="display name for the x-side user")
    q.add_argument("bob", help="display name for the y-side user")
    q.add_argument("--behavior-file", default=None)
    q.add_argument("--existing-users", action="store_true",
                   help="treat the two names as existing user ids")
    q = padmin.add_parser("list")
    q.add_argument("--api-key", required=True)
    p.set_defaults(func=cmd_admin)

    def add_campaign_opts(p, needs_behavior=True):
        add_server_opts(p)
        p.add_argument("--box", type=int, default=None)
        p.add_argument("--alice-key", default="")
        p.add_argument("--bob-key", default="")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--date", default=None, help="transaction id date, YYYYMMDD")
        p.add_argument("--start", type=int, default=1, help="first transaction counter")
        if needs_behavior:
            p.add_argument("--behavior", default="pr")
            p.add_argument("--behavior-file", default=None)
            p.add_argument("--local", action="store_true",
                           help="run in process instead of against a server")

    p = sub.add_parser("demo-session", help="scripted correlated/anticorrelated demo")
    add_campaign_opts(p, needs_behavior=False)
    p.add_argument("--expect-pr", action="store_true",
                   help="fail unless outputs match PR box correlations")
    p.set_defaults(func=cmd_demo_session)

    p = sub.add_parser("play", help="play a CHSH campaign")
    add_campaign_opts(p)
    p.add_argument("--strategy", choices=("boxed", "classical"), default="boxed")
    p.add_argument("--rounds", type=int, default=100)
    p.add_argument("--records", default=None, help="write per-round JSONL here")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("verify", help="statistical check of a deployment")
    add_campaign_opts(p)
    p.add_argument("--rounds", type=int, default=10000)
    p.add_argument("--workers", type=int, default=8)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (NsboxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
