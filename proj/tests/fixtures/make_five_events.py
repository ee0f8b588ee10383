"""Regenerates five_events_prices.csv and five_events.json.

Four tickers over consecutive weekdays; five events with a 10-day window.
After the break the daily moves get a drift of +1 in events 1-4 and -1 in
event 5, so the mean of the differences goes up in exactly four events.
DDD only starts trading after the first event's break date, CCC has one
blank close, and the events also list ZZZ, which has no data at all.
"""
import datetime as dt
import json
import random

rng = random.Random(20240611)
start = dt.date(2021, 1, 4)
days = []
d = start
while len(days) < 240:
    if d.weekday() < 5:
        days.append(d)
    d += dt.timedelta(days=1)

window = 10
bpd_index = [30 + 40 * k for k in range(5)]
drift = [1.0, 1.0, 1.0, 1.0, -1.0]

rows = []
for ticker, base in (("AAA", 100.0), ("BBB", 80.0), ("CCC", 120.0), ("DDD", 60.0)):
    close = base
    for i, day in enumerate(days):
        if i > 0:
            move = rng.gauss(0.0, 1.0)
            for k, b in enumerate(bpd_index):
                if b < i <= b + window:
                    move += drift[k]
            close += move
        if ticker == "DDD" and i <= bpd_index[0]:
            continue
        rows.append((day.isoformat(), ticker, f"{close:.4f}"))

# one missing close that falls outside every window
rows.append((days[5].isoformat(), "CCC", ""))
rows = [r for r in rows if not (r[0] == days[5].isoformat() and r[1] == "CCC" and r[2] != "")]

with open("five_events_prices.csv", "w") as f:
    f.write("date,ticker,close\n")
    for r in rows:
        f.write(",".join(r) + "\n")

events = [{"name": f"event {k + 1}", "bpd": days[b].isoformat(), "window_days": window,
           "tickers": ["AAA", "BBB", "CCC", "DDD", "ZZZ"] }
          for k, b in enumerate(bpd_index)]
with open("five_events.json", "w") as f:
    json.dump({"events": events}, f, indent=2)
    f.write("\n")
