"""Independent consistency check for the Oklahoma fixture files.

Uses only the standard library. Checks county codes and names against the
published Oklahoma county code list and checks that both edge files refer
to known counties. The adjacency graph must form one connected component.

    python3 check_fixture.py
"""

import csv
import os
import sys
from collections import deque

HERE = os.path.dirname(os.path.abspath(__file__))

# Oklahoma county FIPS codes are assigned alphabetically as odd numbers 001..153.
NAMES = [
    "Adair", "Alfalfa", "Atoka", "Beaver", "Beckham", "Blaine", "Bryan",
    "Caddo", "Canadian", "Carter", "Cherokee", "Choctaw", "Cimarron",
    "Cleveland", "Coal", "Comanche", "Cotton", "Craig", "Creek", "Custer",
    "Delaware", "Dewey", "Ellis", "Garfield", "Garvin", "Grady", "Grant",
    "Greer", "Harmon", "Harper", "Haskell", "Hughes", "Jackson", "Jefferson",
    "Johnston", "Kay", "Kingfisher", "Kiowa", "Latimer", "Le Flore",
    "Lincoln", "Logan", "Love", "McClain", "McCurtain", "McIntosh", "Major",
    "Marshall", "Mayes", "Murray", "Muskogee", "Noble", "Nowata", "Okfuskee",
    "Oklahoma", "Okmulgee", "Osage", "Ottawa", "Pawnee", "Payne", "Pittsburg",
    "Pontotoc", "Pottawatomie", "Pushmataha", "Roger Mills", "Rogers",
    "Seminole", "Sequoyah", "Stephens", "Texas", "Tillman", "Tulsa",
    "Wagoner", "Washington", "Washita", "Woods", "Woodward",
]
EXPECTED = {f"40{2 * i + 1:03d}": name for i, name in enumerate(NAMES)}


def read(name):
    with open(os.path.join(HERE, name), newline="") as f:
        return list(csv.DictReader(f))


def main():
    problems = []
    counties = read("counties.csv")
    seen = {}
    for row in counties:
        fips = row["fips"]
        if fips in seen:
            problems.append(f"duplicate fips {fips}")
        seen[fips] = row
        if EXPECTED.get(fips) != row["name"]:
            problems.append(f"{fips}: name {row['name']!r} != {EXPECTED.get(fips)!r}")
        pop = int(row["pop_0_17"]) + int(row["pop_18_64"]) + int(row["pop_65plus"])
        if pop <= 0:
            problems.append(f"{fips}: non-positive population")
    if set(seen) != set(EXPECTED):
        problems.append(f"fips set mismatch: {sorted(set(EXPECTED) ^ set(seen))}")

    graph = {f: set() for f in seen}
    for a, b in ((r["fips_a"], r["fips_b"]) for r in read("adjacency.csv")):
        if a == b:
            problems.append(f"self loop {a}")
        if a not in seen or b not in seen:
            problems.append(f"dangling edge {a}-{b}")
            continue
        graph[a].add(b)
        graph[b].add(a)

    for r in read("air_routes.csv"):
        for f in (r["fips_a"], r["fips_b"]):
            if f not in seen:
                problems.append(f"dangling air edge endpoint {f}")
            elif seen[f]["has_airport"] != "true":
                problems.append(f"air edge endpoint {f} has no airport")

    start = next(iter(sorted(graph)))
    reached = {start}
    queue = deque([start])
    while queue:
        for n in graph[queue.popleft()]:
            if n not in reached:
                reached.add(n)
                queue.append(n)
    if len(reached) != len(graph):
        problems.append(f"adjacency not connected: {len(reached)}/{len(graph)} reached")

    for p in problems:
        print("FAIL", p)
    print(f"{len(counties)} counties, {sum(len(v) for v in graph.values()) // 2} adjacency edges,"
          f" {len(problems)} problems")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
