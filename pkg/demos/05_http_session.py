"""Full protocol over HTTP: provision a box, run two transactions, reveal,
and read the scoreboard.  Everything happens on a loopback server launched
by this script.

Run: python3 demos/05_http_session.py
"""

import threading
import time

import httpx
import uvicorn

from nsbox import MemoryStore, SeededEntropy, create_app

ADMIN = "demo-admin-key"

store = MemoryStore()
app = create_app(store=store, admin_key=ADMIN, entropy=SeededEntropy(5))
config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
server = uvicorn.Server(config)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.01)
port = server.servers[0].sockets[0].getsockname()[1]
base = f"http://127.0.0.1:{port}"
print(f"server listening on {base}")

# provision two users and a PR box (admin side)
admin = {"X-Admin-Key": ADMIN}
alice = httpx.post(f"{base}/api/v1/admin/createUser",
                   data={"displayName": "Alice"}, headers=admin).json()
bob = httpx.post(f"{base}/api/v1/admin/createUser",
                 data={"displayName": "Bob"}, headers=admin).json()
box = httpx.post(f"{base}/api/v1/admin/createBox",
                 data={"alice": alice["userID"], "bob": bob["userID"],
                       "behaviorName": "pr"},
                 headers=admin).json()
print(f"provisioned box {box['boxID']} ({box['behavior']}) "
      f"for {alice['userID']} and {bob['userID']}")


def use(key, tid, **inp):
    resp = httpx.get(f"{base}/api/v1/useBox",
                     params={"boxID": box["boxID"], "transactionID": tid,
                             "apiKey": key, **inp})
    name, symbol = ("x", inp["x"]) if "x" in inp else ("y", inp["y"])
    print(f"  useBox {name}={symbol} tid={tid}  ->  {resp.text}")
    return resp.json()


# two transactions; note the parties call in different orders and nobody
# coordinates beyond agreeing on the transaction id
print("\ntransaction 20211106001 (x=0, y=0):")
use(alice["apiKey"], "20211106001", x=0)
use(bob["apiKey"], "20211106001", y=0)
print("transaction 20211106002 (y=1 first, then x=1):")
use(bob["apiKey"], "20211106002", y=1)
use(alice["apiKey"], "20211106002", x=1)

# scoring requires both parties to disclose the round
for tid in ("20211106001", "20211106002"):
    for key in (alice["apiKey"], bob["apiKey"]):
        httpx.post(f"{base}/api/v1/game/reveal",
                   params={"apiKey": key, "boxID": box["boxID"],
                           "transactionID": tid})

board = httpx.get(f"{base}/api/v1/game/scoreboard",
                  params={"apiKey": alice["apiKey"],
                          "boxID": box["boxID"]}).json()
print(f"\nscoreboard: mean payoff {board['meanPayoff']} over "
      f"{len(board['rounds'])} revealed rounds")
for r in board["rounds"]:
    print(f"  {r['transactionID']}  x={r['x']} y={r['y']} "
          f"a={r['a']} b={r['b']}  payoff {r['payoff']:+d}")

server.should_exit = True
thread.join()
