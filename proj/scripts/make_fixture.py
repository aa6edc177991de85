#!/usr/bin/env python3
"""Produce the desk-scale check-in fixtures.

Two modes:
  * --source <dataset_TSMC2014_NYC.txt>: seeded subsample of the public
    dataset (line order preserved).
  * no --source: synthesize rows in the same 8-column source layout with
    venue categories, hour-of-day profiles and place geography that give the
    benchmark questions non-trivial answers.

Output is deterministic for a given (city, rows, seed).
"""

import argparse
import datetime as dt
import random
import sys

NYC_BOXES = {
    "manhattan": (40.7000, 40.8750, -74.0180, -73.9300),
    "brooklyn": (40.5800, 40.7300, -74.0300, -73.8400),
    "queens": (40.6000, 40.7900, -73.9600, -73.7100),
    "bronx": (40.8000, 40.9100, -73.9300, -73.7700),
    "staten island": (40.5000, 40.6400, -74.2500, -74.0600),
}
NYC_REGION_WEIGHTS = [("manhattan", 50), ("brooklyn", 25), ("queens", 15),
                      ("bronx", 5), ("staten island", 5)]
CENTRAL_PARK = (40.7650, 40.7995, -73.9810, -73.9500)
JFK = (40.6250, 40.6600, -73.8200, -73.7500)
MIDTOWN = (40.7485, 40.7675, -74.0030, -73.9690)
DOWNTOWN = (40.7005, 40.7245, -74.0190, -73.9960)

TOKYO_BOX = (35.5300, 35.8200, 139.4700, 139.9300)

# hour profiles: relative weight per hour 0..23
FLAT = [1] * 24
DAYTIME = [0.3, 0.2, 0.1, 0.1, 0.2, 0.5, 1.5, 3, 5, 4, 3.5, 3.5,
           4.5, 4, 3, 3, 3.5, 4.5, 5, 4.5, 3.5, 2.5, 1.5, 0.8]
MORNING = [0.1, 0.1, 0.05, 0.05, 0.2, 0.8, 3, 6, 8, 6, 4, 3,
           3, 2.5, 2, 2, 2, 1.8, 1.5, 1, 0.6, 0.4, 0.2, 0.1]
NIGHT = [5, 4, 2.5, 1.2, 0.4, 0.1, 0.05, 0.05, 0.05, 0.1, 0.2, 0.4,
         0.6, 0.6, 0.6, 0.8, 1, 1.8, 3, 4.5, 5.5, 6.5, 7, 6.5]
COMMUTE = [0.3, 0.1, 0.05, 0.05, 0.3, 1.5, 4, 8, 9, 5, 2.5, 2,
           2.5, 2.2, 2, 2.5, 4, 7, 8, 5, 3, 2, 1.5, 0.8]
MEALS = [0.4, 0.2, 0.1, 0.05, 0.05, 0.1, 0.3, 0.8, 1.2, 1.2, 1.8, 4.5,
         6, 5, 2.5, 1.5, 1.5, 2.5, 4.5, 5.5, 4.5, 2.5, 1.2, 0.7]
HOME = [3, 2, 1, 0.6, 0.4, 0.6, 1.2, 1.8, 1.2, 0.6, 0.5, 0.5,
        0.6, 0.6, 0.6, 0.7, 0.9, 1.5, 2.5, 3.5, 4, 4.5, 4.5, 4]
WORK = [0.05, 0.05, 0.02, 0.02, 0.05, 0.2, 0.8, 3, 7, 8, 6, 4,
        3, 4, 4.5, 4, 3, 2, 1, 0.4, 0.2, 0.1, 0.1, 0.05]
OUTDOOR = [0.2, 0.1, 0.05, 0.05, 0.1, 0.4, 1.5, 2.5, 3, 3.2, 3.5, 3.6,
           3.8, 4, 4, 4.2, 4.5, 5, 5.2, 4.8, 3.8, 2.5, 1.2, 0.5]

# (category, weight, hour profile, place count, placement)
NYC_CATEGORIES = [
    ("Home (private)", 10.0, HOME, 120, "any"),
    ("Office", 8.5, WORK, 90, "midtown"),
    ("Bar", 7.2, NIGHT, 60, "any"),
    ("Subway", 6.2, COMMUTE, 45, "manhattan"),
    ("Coffee Shop", 5.3, MORNING, 40, "any"),
    ("Gym / Fitness Center", 4.2, DAYTIME, 30, "any"),
    ("Building", 3.6, WORK, 40, "downtown"),
    ("American Restaurant", 3.4, MEALS, 35, "any"),
    ("Train Station", 3.0, COMMUTE, 8, "manhattan"),
    ("Park", 2.9, OUTDOOR, 12, "central_park"),
    ("Deli / Bodega", 2.8, DAYTIME, 35, "any"),
    ("Food & Drink Shop", 2.6, DAYTIME, 30, "any"),
    ("Italian Restaurant", 2.5, MEALS, 25, "any"),
    ("Pizza Place", 2.3, MEALS, 25, "any"),
    ("Neighborhood", 2.1, OUTDOOR, 20, "any"),
    ("Clothing Store", 2.0, DAYTIME, 25, "manhattan"),
    ("Hotel", 1.9, HOME, 20, "midtown"),
    ("University", 1.8, WORK, 10, "manhattan"),
    ("Road", 1.7, COMMUTE, 20, "any"),
    ("Drugstore / Pharmacy", 1.6, DAYTIME, 20, "any"),
    ("Chinese Restaurant", 1.5, MEALS, 20, "any"),
    ("Nightclub", 1.4, NIGHT, 15, "any"),
    ("Music Venue", 1.3, NIGHT, 12, "any"),
    ("Mexican Restaurant", 1.2, MEALS, 15, "any"),
    ("Bus Station", 1.1, COMMUTE, 8, "any"),
    ("Movie Theater", 1.0, NIGHT, 8, "any"),
    ("Gym", 1.0, DAYTIME, 8, "any"),
    ("Airport", 0.9, FLAT, 3, "jfk"),
    ("Airport Terminal", 0.8, FLAT, 4, "jfk"),
    ("Laundry Service", 0.7, DAYTIME, 14, "any"),
    ("Bakery", 0.7, MORNING, 8, "any"),
    ("Plaza", 0.6, OUTDOOR, 6, "central_park"),
    ("Stadium", 0.5, NIGHT, 3, "any"),
    ("Museum", 0.5, DAYTIME, 5, "central_park"),
]

TOKYO_CATEGORIES = [
    ("Train Station", 22.0, COMMUTE, 40, "any"),
    ("Subway", 8.0, COMMUTE, 30, "any"),
    ("Convenience Store", 6.0, FLAT, 50, "any"),
    ("Ramen / Noodle House", 5.0, MEALS, 35, "any"),
    ("Japanese Restaurant", 4.5, MEALS, 35, "any"),
    ("Office", 4.0, WORK, 40, "any"),
    ("Bar", 3.8, NIGHT, 30, "any"),
    ("Home (private)", 3.2, HOME, 50, "any"),
    ("Coffee Shop", 3.0, MORNING, 25, "any"),
    ("Food & Drink Shop", 2.8, DAYTIME, 25, "any"),
    ("Electronics Store", 2.2, DAYTIME, 15, "any"),
    ("Mall", 2.0, DAYTIME, 12, "any"),
    ("Café", 2.0, DAYTIME, 20, "any"),
    ("Bookstore", 1.5, DAYTIME, 12, "any"),
    ("Park", 1.4, OUTDOOR, 10, "any"),
    ("Gym / Fitness Center", 1.0, DAYTIME, 10, "any"),
    ("Nightclub", 0.8, NIGHT, 8, "any"),
    ("Music Venue", 0.7, NIGHT, 8, "any"),
    ("Bus Station", 0.7, COMMUTE, 8, "any"),
    ("Laundry Service", 0.3, DAYTIME, 5, "any"),
]

START = dt.datetime(2012, 4, 12)
END = dt.datetime(2013, 2, 16, 23, 59, 59)


def uniform_in(rng, box):
    lat0, lat1, lon0, lon1 = box
    return rng.uniform(lat0, lat1), rng.uniform(lon0, lon1)


def place_location(rng, city, placement):
    if city == "tokyo":
        return uniform_in(rng, TOKYO_BOX)
    if placement == "central_park":
        return uniform_in(rng, CENTRAL_PARK)
    if placement == "jfk":
        return uniform_in(rng, JFK)
    if placement == "midtown":
        return uniform_in(rng, MIDTOWN)
    if placement == "downtown":
        return uniform_in(rng, DOWNTOWN)
    if placement == "manhattan":
        return uniform_in(rng, NYC_BOXES["manhattan"])
    names = [n for n, _ in NYC_REGION_WEIGHTS]
    weights = [w for _, w in NYC_REGION_WEIGHTS]
    region = rng.choices(names, weights)[0]
    return uniform_in(rng, NYC_BOXES[region])


def hexid(rng, n=24):
    return "".join(rng.choice("0123456789abcdef") for _ in range(n))


def utc_offset_minutes(city, local):
    if city == "tokyo":
        return 540
    # US eastern: DST from 2012-03-11 to 2012-11-04, then standard time
    return -240 if local < dt.datetime(2012, 11, 4, 2) else -300


def synthesize(city, rows, seed):
    rng = random.Random(seed)
    cats = NYC_CATEGORIES if city == "nyc" else TOKYO_CATEGORIES
    places = {}
    for name, _, _, count, placement in cats:
        plist = []
        for i in range(count):
            lat, lon = place_location(rng, city, placement)
            plist.append((hexid(rng), hexid(rng)[:24], lat, lon, 1.0 / (i + 1) ** 1.1))
        places[name] = plist
    cat_ids = {name: hexid(rng) for name, *_ in cats}
    users = [str(u) for u in range(1, 1084 if city == "nyc" else 2294)]
    user_weights = [1.0 / (i + 1) ** 0.8 for i in range(len(users))]
    rng.shuffle(user_weights)
    span = int((END - START).total_seconds() // 86400) + 1
    out = []
    forced_user = 0
    for _ in range(rows):
        name, _, profile, _, _ = rng.choices(cats, [c[1] for c in cats])[0]
        plist = places[name]
        venue, _, lat, lon, _ = rng.choices(plist, [p[4] for p in plist])[0]
        # user 123 is referenced by a benchmark question; keep a small history
        if city == "nyc" and forced_user < 14 and rng.random() < 0.004:
            user = "123"
            forced_user += 1
        else:
            user = rng.choices(users, user_weights)[0]
        day = rng.randrange(span)
        hour = rng.choices(range(24), profile)[0]
        local = START + dt.timedelta(days=day, hours=hour,
                                     minutes=rng.randrange(60), seconds=rng.randrange(60))
        if local > END:
            local = END - dt.timedelta(minutes=rng.randrange(600))
        off = utc_offset_minutes(city, local)
        utc = local - dt.timedelta(minutes=off)
        out.append((utc, [user, venue, cat_ids[name], name,
                          repr(round(lat, 9)), repr(round(lon, 9)), str(off),
                          utc.strftime("%a %b %d %H:%M:%S +0000 %Y")]))
    out.sort(key=lambda r: r[0])
    return ["\t".join(r[1]) for r in out]


def subsample(source, rows, seed):
    with open(source, encoding="utf-8", errors="replace") as f:
        lines = [l.rstrip("\n") for l in f if l.strip()]
    rng = random.Random(seed)
    idx = sorted(rng.sample(range(len(lines)), min(rows, len(lines))))
    return [lines[i] for i in idx]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--city", choices=["nyc", "tokyo"], required=True)
    ap.add_argument("--rows", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=20121122)
    ap.add_argument("--source")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    if args.source:
        lines = subsample(args.source, args.rows, args.seed)
    else:
        lines = synthesize(args.city, args.rows, args.seed + (0 if args.city == "nyc" else 1))
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")
    print(f"wrote {len(lines)} rows to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
