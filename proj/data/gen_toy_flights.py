"""Regenerates data/toy_flights.csv. Deterministic; checked-in output is authoritative."""
import csv
import datetime
import random

rng = random.Random(20150101)
airlines = {"AA": 12.0, "DL": 6.0, "UA": 18.0}
airports = ["ATL", "JFK", "LAX", "ORD"]
reasons = ["weather", "carrier", "security"]

rows = []
for day in range(1, 61):
    date = (datetime.date(2015, 1, 1) + datetime.timedelta(days=day - 1)).isoformat()
    storm = 25.0 if day % 9 == 0 else 0.0
    for airline, base in airlines.items():
        for k in range(3):
            origin = airports[(day + k) % 4]
            dest = airports[(day + k + 1 + (k % 2)) % 4]
            dep = max(-10.0, rng.gauss(base + storm, 8.0))
            arr = dep + rng.gauss(-2.0, 4.0)
            weather = "" if rng.random() < 0.05 else f"{max(0.0, storm + rng.gauss(2.0, 3.0)):.1f}"
            security = f"{max(0.0, rng.gauss(1.0, 1.5)):.1f}"
            cancelled = rng.random() < 0.12
            reason = rng.choice(reasons) if cancelled else ""
            rows.append([date, airline, origin, dest, "1" if cancelled else "0", reason,
                         f"{dep:.1f}", f"{arr:.1f}", weather, security])

with open("toy_flights.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["DATE", "AIRLINE", "ORIGIN_AIRPORT", "DESTINATION_AIRPORT", "CANCELLED_STATUS",
                "CANCELLATION_REASON", "DEPARTURE_DELAY", "ARRIVAL_DELAY", "WEATHER_DELAY",
                "SECURITY_DELAY"])
    w.writerows(rows)
