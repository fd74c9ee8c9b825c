"""Classical strategies against boxes, head to head.

Run: python3 demos/04_chsh_tournament.py
"""

import random

from nsbox import (
    LocalBoxClient,
    MemoryStore,
    SeededEntropy,
    Side,
    classical_bound,
    deterministic_strategy_payoffs,
    make_pr_box,
    make_tsirelson_box,
    play_boxed,
    play_classical,
)

# every deterministic strategy pair, exactly; (f(0), f(1)) value tables
table = deterministic_strategy_payoffs()
print("deterministic strategy pairs and their exact average payoff:")
for (fa, fb), payoff in sorted(table.items(), key=lambda kv: -kv[1])[:4]:
    print(f"  a(x)={fa}  b(y)={fb}  ->  {payoff:+.2f}")
print(f"  ... 12 more; the best is {classical_bound()} and no mixing helps")

rng = random.Random(17)
rec = play_classical(20000, rng)
print(f"\nclassical play, {rec.n} rounds: mean {rec.mean_payoff:+.4f} "
      f"(CI half-width {rec.ci_halfwidth():.4f})")


def local_deployment(behavior, seed):
    store = MemoryStore()
    store.register_behavior(behavior)
    u1 = store.create_user("alice")
    u2 = store.create_user("bob")
    box = store.create_box_instance(behavior.name, u1.user_id, u2.user_id)
    entropy = SeededEntropy(seed)
    return (LocalBoxClient(store, box.box_id, Side.ALICE, entropy),
            LocalBoxClient(store, box.box_id, Side.BOB, entropy))


for behavior in (make_tsirelson_box(), make_pr_box()):
    alice, bob = local_deployment(behavior, 99)
    rec = play_boxed(alice, bob, 20000, random.Random(18),
                     behavior_name=behavior.name)
    print(f"{behavior.name} box, {rec.n} rounds: mean {rec.mean_payoff:+.4f} "
          f"({rec.wins} wins, {rec.losses} losses)")
