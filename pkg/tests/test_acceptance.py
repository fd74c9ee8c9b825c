"""End-to-end acceptance checks.

One test per advertised guarantee, each ending in a single PASS/FAIL line
with the measured quantity, so running this module with ``pytest -s``
reads as a checklist: perfect PR play over HTTP, the classical bound,
quantum-level play, sampled-table fidelity, interface no-signaling, order
symmetry, the exact chain identity, the locality frontier, byte-exact wire
bodies, and write-once concurrency under faults.
"""

import math
import pathlib
import threading
import time

import httpx
import numpy as np
import pytest

from nsbox.behavior import (
    Behavior,
    Side,
    chsh_expected_payoff,
    conditional,
    marginal,
    total_variation,
)
from nsbox.boxes import (
    BUILTIN_BUILDERS,
    make_isotropic,
    make_local_deterministic,
    make_pr_box,
    make_tsirelson_box,
    make_uniform_box,
)
from nsbox.cli import build_parser, cmd_play, cmd_verify
from nsbox.engine import (
    empirical_table,
    factorize_check,
    no_signaling_audit,
    sample_rounds,
    use_box,
)
from nsbox.entropy import FixedEntropy, SeededEntropy
from nsbox.errors import LockTimeout
from nsbox.game import deterministic_strategy_payoffs
from nsbox.locality import is_local
from nsbox.service import create_app
from nsbox.store import MemoryStore, SQLiteStore

from .helpers import GOLDEN_SEED, LiveServer, provision
from .test_locality import oracle_is_local

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"

SQRT_HALF = math.sqrt(2.0) / 2.0


def report(label: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'} {label}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{label}  [{detail}]"


@pytest.fixture(scope="module")
def live_pr(pr):
    """One live HTTP deployment of a PR box shared by the network checks."""
    store = MemoryStore()
    box, alice, bob = provision(store, pr)
    app = create_app(store=store, admin_key="adm", entropy=SeededEntropy(101))
    with LiveServer(app) as server:
        yield server.url, box, alice, bob


def campaign_args(url, box, alice, bob, extra):
    return build_parser().parse_args([
        extra[0], "--server", url, "--box", str(box.box_id),
        "--alice-key", alice.api_key, "--bob-key", bob.api_key, *extra[1:],
    ])


def test_pr_box_play_is_perfect_over_http(live_pr):
    url, box, alice, bob = live_pr
    t0 = time.perf_counter()
    record = cmd_play(campaign_args(url, box, alice, bob, [
        "play", "--rounds", "1000", "--seed", "11", "--date", "20210501",
    ]))
    elapsed = time.perf_counter() - t0
    ok = (
        record.n == 1000
        and record.mean_payoff == 1.0
        and record.losses == 0
        and elapsed < 10.0
    )
    report(
        "PR box wins all 1000 rounds over HTTP",
        ok,
        f"mean={record.mean_payoff} losses={record.losses} t={elapsed:.1f}s",
    )


def test_classical_play_cannot_beat_one_half():
    t0 = time.perf_counter()
    record = cmd_play(build_parser().parse_args(
        ["play", "--strategy", "classical", "--rounds", "10000", "--seed", "12"]
    ))
    payoffs = deterministic_strategy_payoffs()
    best = max(payoffs.values())
    elapsed = time.perf_counter() - t0
    ok = (
        abs(record.mean_payoff - 0.5) <= 0.03
        and len(payoffs) == 16
        and best == 0.5
        and elapsed < 10.0
    )
    report(
        "classical strategies cap at payoff 1/2",
        ok,
        f"mean={record.mean_payoff:+.4f} best_of_16={best} t={elapsed:.1f}s",
    )


def brute_force_expected_payoff(behavior: Behavior) -> float:
    total = 0.0
    for x in (0, 1):
        for y in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    win = (a + b) % 2 == (x * y) % 2
                    total += 0.25 * behavior.table[x, y, a, b] * (1 if win else -1)
    return total


def test_tsirelson_box_attains_the_quantum_payoff():
    tsirelson = make_tsirelson_box()
    oracle = brute_force_expected_payoff(tsirelson)
    assert abs(oracle - SQRT_HALF) < 1e-12
    assert abs(chsh_expected_payoff(tsirelson) - oracle) < 1e-12
    record = cmd_play(build_parser().parse_args([
        "play", "--local", "--behavior", "tsirelson",
        "--rounds", "10000", "--seed", "13",
    ]))
    ok = abs(record.mean_payoff - SQRT_HALF) <= 0.03
    report(
        "tsirelson box plays at sqrt(2)/2",
        ok,
        f"mean={record.mean_payoff:+.4f} target={SQRT_HALF:.4f}",
    )


def test_sampled_frequencies_match_the_declared_table(live_pr, pr):
    rep = factorize_check(pr, n=10000, entropy=SeededEntropy(42))
    assert rep.pair_counts.min() > 0
    url, box, alice, bob = live_pr
    # one worker keeps the server's seeded draw order reproducible; the
    # concurrent path is exercised separately by the storm test
    http_report = cmd_verify(campaign_args(url, box, alice, bob, [
        "verify", "--rounds", "10000", "--workers", "1",
        "--seed", "14", "--date", "20210502",
    ]))
    ok = rep.max_tv <= 0.03 and http_report.max_tv <= 0.03
    report(
        "sampled tables match declared probabilities (engine and HTTP)",
        ok,
        f"engine_maxTV={rep.max_tv:.4f} http_maxTV={http_report.max_tv:.4f}",
    )


def test_outputs_reveal_nothing_about_the_counterpart(pr):
    log = sample_rounds(pr, 10000, SeededEntropy(7), first_mover="random")
    audit = no_signaling_audit(pr, log)
    worst_input = max(audit.max_tv_vs_counterpart_input.values())
    worst_order = max(audit.max_tv_vs_order.values())
    ok = worst_input <= 0.05 and worst_order <= 0.05
    report(
        "output marginals are flat across counterpart input and move order",
        ok,
        f"vs_input={worst_input:.4f} vs_order={worst_order:.4f}",
    )


def test_first_mover_does_not_shift_the_joint(pr):
    log_a = sample_rounds(pr, 10000, SeededEntropy(15), first_mover="alice")
    log_b = sample_rounds(pr, 10000, SeededEntropy(16), first_mover="bob")
    emp_a = empirical_table(pr, log_a)
    emp_b = empirical_table(pr, log_b)
    worst = max(
        total_variation(emp_a[x, y], emp_b[x, y])
        for x in (0, 1) for y in (0, 1)
    )
    ok = worst <= 0.05
    report(
        "alice-first and bob-first joints agree", ok, f"maxTV={worst:.4f}"
    )


def test_marginal_times_conditional_rebuilds_every_builtin():
    behaviors = [builder() for builder in BUILTIN_BUILDERS.values()]
    behaviors += [make_isotropic(0.3), make_local_deterministic((0, 1), (1, 0))]
    worst = 0.0
    for behavior in behaviors:
        for first in (Side.ALICE, Side.BOB):
            for x in (0, 1):
                for y in (0, 1):
                    f_in, s_in = (x, y) if first is Side.ALICE else (y, x)
                    m = marginal(behavior, first, f_in)
                    for f_out in (0, 1):
                        if m.probs[f_out] <= 1e-12:
                            continue
                        c = conditional(behavior, first, f_in, f_out, s_in)
                        for s_out in (0, 1):
                            a, b = (f_out, s_out) if first is Side.ALICE \
                                else (s_out, f_out)
                            rebuilt = m.probs[f_out] * c.probs[s_out]
                            worst = max(
                                worst, abs(rebuilt - behavior.table[x, y, a, b])
                            )
    ok = worst <= 1e-9
    report(
        "marginal times conditional rebuilds each table both ways",
        ok,
        f"worst_abs_err={worst:.2e} over {len(behaviors)} behaviors",
    )


def test_locality_frontier_sits_at_one_half():
    t0 = time.perf_counter()
    nonlocal_ok = (
        not is_local(make_pr_box()).is_local
        and not is_local(make_tsirelson_box()).is_local
    )
    local_ok = is_local(make_uniform_box()).is_local and all(
        is_local(make_local_deterministic(fa, fb)).is_local
        for fa in ((0, 0), (0, 1), (1, 0), (1, 1))
        for fb in ((0, 0), (0, 1), (1, 0), (1, 1))
    )
    def bisect(decide, width):
        lo, hi = 0.25, 0.75
        assert decide(lo) and not decide(hi)
        while hi - lo > width:
            mid = (lo + hi) / 2.0
            lo, hi = (mid, hi) if decide(mid) else (lo, mid)
        return (lo + hi) / 2.0

    boundary = bisect(lambda v: is_local(make_isotropic(v)).is_local, 1e-7)
    # independent feasibility-only solve, bracketed coarsely: near the
    # boundary both solvers sit inside their own numeric fuzz
    oracle_boundary = bisect(lambda v: oracle_is_local(make_isotropic(v)), 1e-4)
    elapsed = time.perf_counter() - t0
    ok = (
        nonlocal_ok and local_ok
        and abs(boundary - 0.5) <= 1e-6
        and abs(oracle_boundary - 0.5) <= 1e-3
        and elapsed < 5.0
    )
    report(
        "locality boundary of the isotropic family is 1/2",
        ok,
        f"boundary={boundary:.8f} err={abs(boundary - 0.5):.1e} "
        f"oracle={oracle_boundary:.5f} t={elapsed:.2f}s",
    )


def test_recorded_wire_bodies_reproduce_byte_for_byte(pr):
    store = MemoryStore()
    box, alice, bob = provision(store, pr)
    app = create_app(store=store, admin_key="adm", entropy=SeededEntropy(GOLDEN_SEED))
    calls = [
        (alice.api_key, "20211106001", "x", 0, "useBox_1_alice_x0.json"),
        (bob.api_key, "20211106001", "y", 0, "useBox_2_bob_y0.json"),
        (bob.api_key, "20211106002", "y", 1, "useBox_3_bob_y1.json"),
        (alice.api_key, "20211106002", "x", 1, "useBox_4_alice_x1.json"),
    ]
    outs = {}
    mismatches = []
    with LiveServer(app) as server:
        for key, tid, param, symbol, golden in calls:
            resp = httpx.get(
                f"{server.url}/api/v1/useBox",
                params={
                    "boxID": box.box_id, "transactionID": tid,
                    param: symbol, "apiKey": key,
                },
            )
            expected = (GOLDEN_DIR / golden).read_bytes()
            if resp.content != expected:
                mismatches.append(golden)
            outs[(param, tid)] = resp.json().get("a", resp.json().get("b"))
    correlated = outs[("x", "20211106001")] == outs[("y", "20211106001")]
    anticorrelated = outs[("x", "20211106002")] != outs[("y", "20211106002")]
    ok = not mismatches and correlated and anticorrelated
    report(
        "recorded wire bodies reproduce byte for byte",
        ok,
        f"mismatches={mismatches or 'none'} equal@00={correlated} "
        f"opposite@11={anticorrelated}",
    )


def test_duplicate_storm_and_fault_point_write_once(tmp_path, pr):
    # storm: 64 simultaneous identical first uses agree on one stored result
    store = SQLiteStore(tmp_path / "db")
    box, _, _ = provision(store, pr)
    n = 64
    barrier = threading.Barrier(n)
    outcomes = [None] * n

    def caller(i):
        barrier.wait()
        outcomes[i] = use_box(
            store, box.box_id, "storm", Side.ALICE, 0, SeededEntropy(1000 + i)
        )

    threads = [threading.Thread(target=caller, args=(i,)) for i in range(n)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(30)
    outputs = {o.output for o in outcomes}
    fresh_uses = sum(1 for o in outcomes if o.first_use)
    row = store.get_transaction(box.box_id, "storm")
    storm_ok = len(outputs) == 1 and fresh_uses == 1 and row.version == 1

    # fault point: the counterpart gets no answer until the first write is
    # durable, and an independent reader sees nothing before commit
    reader = SQLiteStore(tmp_path / "db")
    at_commit = threading.Event()
    release = threading.Event()
    store.before_commit_hook = lambda: (at_commit.set(), release.wait(10))
    first = {}

    def first_side():
        first["out"] = use_box(
            store, box.box_id, "fault", Side.ALICE, 0, FixedEntropy([0.7])
        ).output

    t = threading.Thread(target=first_side)
    t.start()
    assert at_commit.wait(10)
    invisible = reader.get_transaction(box.box_id, "fault") is None
    try:
        use_box(store, box.box_id, "fault", Side.BOB, 0,
                FixedEntropy([0.5]), timeout=0.3)
        blocked = False
    except LockTimeout:
        blocked = True
    store.before_commit_hook = None
    release.set()
    t.join(10)
    durable = reader.get_transaction(box.box_id, "fault")
    second = use_box(store, box.box_id, "fault", Side.BOB, 0, FixedEntropy([0.5]))
    fault_ok = (
        invisible and blocked
        and durable.side_state(Side.ALICE) == (0, first["out"])
        and second.output == first["out"]  # x = y = 0 correlates perfectly
    )
    reader.close()
    store.close()
    ok = storm_ok and fault_ok
    report(
        "duplicate storm stores once and no reply precedes durability",
        ok,
        f"outputs={outputs} fresh={fresh_uses} version={row.version} "
        f"invisible={invisible} blocked={blocked}",
    )
