#!/usr/bin/env python3
"""Regenerates the bundled synthetic study in data/synthetic/.

30 point locations on a jittered 6 x 5 lattice in the central US, seven
intervals on the default boundaries, and cumulative case counts drawn
multinomially with planted high- and low-risk groups whose relative risks
drift from interval to interval. Output is fully determined by SEED.
"""

import argparse
import datetime as dt
import pathlib

import numpy as np

SEED = 20200524
BOUNDARIES = ["2020-05-24", "2020-09-13", "2021-03-14", "2021-06-13",
              "2021-10-31", "2022-03-13", "2022-10-16", "2023-03-12"]
CASES_PER_INTERVAL = [2400, 5200, 3100, 4600, 7400, 3900, 3300]

# Location index -> per-interval relative risk multiplier.
PLANTED = {
    # persistent south-west hot spot
    (0, 1, 5, 6): [2.0, 1.8, 1.6, 2.2, 1.7, 1.9, 1.8],
    # north-east low-risk block
    (23, 24, 28, 29): [0.5, 0.6, 0.55, 0.45, 0.6, 0.5, 0.55],
    # centre hot spot that emerges mid-study
    (14, 15, 19): [1.0, 1.0, 1.7, 2.1, 2.4, 2.0, 2.2],
    # eastern block turning from low to high
    (9, 4): [0.6, 0.7, 1.0, 1.4, 1.6, 1.5, 1.6],
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(SEED)
    rows, cols = 6, 5
    locations = []
    for r in range(rows):
        for c in range(cols):
            idx = r * cols + c
            lat = 36.0 + 1.1 * r + rng.uniform(-0.3, 0.3)
            lon = -99.0 + 2.1 * c + rng.uniform(-0.4, 0.4)
            pop = int(np.clip(rng.lognormal(np.log(120_000), 0.7), 15_000, 900_000))
            area = float(np.round(rng.uniform(3_000, 15_000), 1))
            locations.append((f"S{idx + 1:02d}", f"Synthetic {idx + 1}", round(lat, 4), round(lon, 4), pop, area))

    with open(out / "population.csv", "w", newline="\n") as f:
        f.write("# synthetic study region, regenerate with tools/make_synthetic_data.py\n")
        f.write("id,name,lat,lon,population,land_area_km2\n")
        for loc in locations:
            f.write(",".join(str(v) for v in loc) + "\n")

    pops = np.array([loc[4] for loc in locations], dtype=float)
    dates = [dt.date.fromisoformat(d) for d in BOUNDARIES]
    cumulative = rng.integers(0, 40, size=len(locations))
    rows_out = [(dates[0] - dt.timedelta(days=1), cumulative.copy())]
    for k in range(len(dates) - 1):
        risk = np.ones(len(locations))
        for members, rr in PLANTED.items():
            risk[list(members)] = rr[k]
        weights = pops * risk
        new = rng.multinomial(CASES_PER_INTERVAL[k], weights / weights.sum())
        first_half = rng.binomial(new, 0.5)
        mid = dates[k] + (dates[k + 1] - dates[k]) / 2
        cumulative = cumulative + first_half
        rows_out.append((mid, cumulative.copy()))
        cumulative = cumulative + (new - first_half)
        rows_out.append((dates[k + 1] - dt.timedelta(days=1), cumulative.copy()))

    with open(out / "cases.csv", "w", newline="\n") as f:
        f.write("date,id,cases\n")
        for date, cum in rows_out:
            for loc, value in zip(locations, cum):
                f.write(f"{date.isoformat()},{loc[0]},{int(value)}\n")


if __name__ == "__main__":
    main()
