#!/usr/bin/env python3
# Copyright 2026 The VAM Toolkit Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates responses.csv, a synthetic 120-row response batch.

Individual answers are synthetic. The batch is constructed so that its
aggregates are: 117 valid rows, median biodiversity allotment 10 %,
21 underestimates averaging 205 %, 5 overestimates averaging 39 %,
91 "about right" answers.
"""
import csv
import random
import sys
from pathlib import Path

COMPONENTS = [
    "carbon_oxygen", "water_yield", "soil_retention", "biodiversity_maintenance",
    "microclimate_regulation", "recreation", "aesthetic_enjoyment", "air_purification",
]
DEMOGRAPHICS = [
    "gender", "age_bracket", "education", "income", "visited_guangzhou",
    "lived_guangzhou", "nature_visit_frequency", "site_visit_frequency",
]
TARGET = "biodiversity_maintenance"

UNDER = [50, 80, 100, 100, 120, 150, 150, 180, 200, 200, 200,
         200, 220, 250, 250, 280, 300, 300, 300, 325, 350]
OVER = [20, 30, 40, 50, 55]
assert len(UNDER) == 21 and sum(UNDER) == 205 * 21
assert len(OVER) == 5 and sum(OVER) == 39 * 5


def main(out: Path) -> None:
    rng = random.Random(20070101)
    bio = [5] * 14 + [8] * 16 + [10] * 57 + [15] * 18 + [20] * 12
    assert len(bio) == 117
    rng.shuffle(bio)
    adjustments = ([("underestimated", p) for p in UNDER] + [("overestimated", p) for p in OVER]
                   + [("about_right", None)] * 91)
    rng.shuffle(adjustments)

    rows = []
    for i in range(117):
        others = [c for c in COMPONENTS if c != TARGET]
        remaining = 100 - bio[i]
        alloc = {TARGET: bio[i]}
        other_pct, other_label = "", ""
        if i % 13 == 0:
            other_pct, other_label = 5, rng.choice(["cultural heritage", "education", "scientific research"])
            remaining -= 5
        cuts = sorted(rng.sample(range(1, remaining), len(others) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [remaining])]
        for c, p in zip(others, parts):
            alloc[c] = p
        kind, pct = adjustments[i]
        rows.append((alloc, other_pct, other_label, kind, pct))

    # Three structurally invalid answers.
    bad_sum = dict(rows[0][0])
    largest = max((c for c in COMPONENTS if c != TARGET), key=lambda c: bad_sum[c])
    bad_sum[largest] -= 10
    missing = dict(rows[1][0]); missing["soil_retention"] = ""
    invalid = [
        (bad_sum, rows[0][1], rows[0][2], "about_right", None),
        (missing, "", "", "about_right", None),
        (dict(rows[2][0]), "", "", "overestimated", 120),
    ]
    ordered = list(rows)
    for pos, row in zip((16, 57, 102), invalid):
        ordered.insert(pos, row)
    assert len(ordered) == 120

    header = ["respondent_id"] + DEMOGRAPHICS + COMPONENTS + [
        "other", "other_label", "adjustment_kind", "adjustment_pct", "submitted_at"]
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for n, (alloc, other_pct, other_label, kind, pct) in enumerate(ordered, start=1):
            demo = [
                rng.choice(["female", "male"]),
                rng.choice(["18-25", "26-35", "36-45", "46-60", "60+"]),
                rng.choice(["high_school", "bachelor", "master", "doctorate"]),
                rng.choice(["<3000", "3000-6000", "6000-10000", ">10000"]),
                rng.choice(["yes", "no"]),
                rng.choice(["yes", "no"]),
                rng.choice(["weekly", "monthly", "yearly", "rarely"]),
                rng.choice(["never", "once", "several", "frequent"]),
            ]
            stamp = f"2017-{3 + n // 40:02d}-{1 + n % 28:02d}T{8 + n % 12:02d}:{n % 60:02d}:00Z"
            w.writerow([f"R{n:03d}"] + demo + [alloc[c] for c in COMPONENTS]
                       + [other_pct, other_label, kind, "" if pct is None else pct, stamp])


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("responses.csv"))
