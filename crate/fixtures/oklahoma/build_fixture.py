"""Regenerate the Oklahoma county fixture.

Geometry and adjacency come from the US Census cartographic
boundary file cb_2016_us_county_500k (shipped inside the `plotly-geo` Python
package), which also supplies the land area used for density classes. Populations are rounded 2019 county estimates. Age shares and
hospital bed counts are approximations derived from density class; they are
stand-ins for real county data, not authoritative figures.

    pip install plotly-geo pyshp shapely
    python3 build_fixture.py
"""

import csv
import json
import os

import _plotly_geo
import shapefile
from shapely.geometry import mapping, shape

HERE = os.path.dirname(os.path.abspath(__file__))
SHP = os.path.join(
    os.path.dirname(_plotly_geo.__file__), "package_data", "cb_2016_us_county_500k"
)

# Rounded 2019 population estimates.
POPULATION = {
    "Adair": 22194, "Alfalfa": 5702, "Atoka": 13758, "Beaver": 5311,
    "Beckham": 21859, "Blaine": 9429, "Bryan": 47995, "Caddo": 28762,
    "Canadian": 148306, "Carter": 48111, "Cherokee": 48657, "Choctaw": 14672,
    "Cimarron": 2137, "Cleveland": 284014, "Coal": 5495, "Comanche": 120749,
    "Cotton": 5666, "Craig": 14142, "Creek": 71522, "Custer": 29003,
    "Delaware": 43009, "Dewey": 4891, "Ellis": 3859, "Garfield": 61056,
    "Garvin": 27711, "Grady": 55834, "Grant": 4333, "Greer": 5712,
    "Harmon": 2653, "Harper": 3688, "Haskell": 12627, "Hughes": 13279,
    "Jackson": 24530, "Jefferson": 6002, "Johnston": 11085, "Kay": 43538,
    "Kingfisher": 15765, "Kiowa": 8708, "Latimer": 10073, "Le Flore": 49853,
    "Lincoln": 34877, "Logan": 48011, "Love": 10253, "McClain": 40474,
    "McCurtain": 32832, "McIntosh": 19596, "Major": 7629, "Marshall": 16931,
    "Mayes": 41100, "Murray": 14073, "Muskogee": 67997, "Noble": 11131,
    "Nowata": 10076, "Okfuskee": 11993, "Oklahoma": 797434, "Okmulgee": 38465,
    "Osage": 46963, "Ottawa": 31127, "Pawnee": 16376, "Payne": 81784,
    "Pittsburg": 43654, "Pontotoc": 38284, "Pottawatomie": 72592,
    "Pushmataha": 11096, "Roger Mills": 3583, "Rogers": 92459,
    "Seminole": 24258, "Sequoyah": 41569, "Stephens": 43143, "Texas": 19983,
    "Tillman": 7250, "Tulsa": 651552, "Wagoner": 81289, "Washington": 51527,
    "Washita": 10916, "Woods": 8793, "Woodward": 20211,
}

# Commercial-service airports: Will Rogers (OKC), Tulsa Intl, Lawton-Fort Sill,
# Stillwater Regional.
AIRPORTS = {"40109", "40143", "40031", "40119"}

SQ_M_PER_SQ_MI = 2_589_988.11

# (under-18 share, 65+ share, beds per 1000) per density class
CLASS_PROFILE = {
    "urban": (0.245, 0.135, 4.4),
    "small": (0.240, 0.160, 2.6),
    "rural": (0.230, 0.190, 1.8),
}


def density_class(pop, aland):
    per_sq_mi = pop / (aland / SQ_M_PER_SQ_MI)
    if per_sq_mi >= 150.0:
        return "urban"
    if per_sq_mi >= 30.0:
        return "small"
    return "rural"


def main():
    reader = shapefile.Reader(SHP, encoding="latin-1")
    rows = []
    shapes = {}
    for sr in reader.iterShapeRecords():
        rec = sr.record.as_dict()
        if rec["STATEFP"] != "40":
            continue
        fips = rec["GEOID"]
        geom = shape(sr.shape.__geo_interface__)
        shapes[fips] = geom
        pop = POPULATION[rec["NAME"]]
        cls = density_class(pop, rec["ALAND"])
        young, old, beds_per_k = CLASS_PROFILE[cls]
        p0 = round(pop * young)
        p2 = round(pop * old)
        p1 = pop - p0 - p2
        beds = max(10, round(pop * beds_per_k / 1000.0))
        c = geom.representative_point() if not geom.contains(geom.centroid) else geom.centroid
        rows.append({
            "fips": fips, "name": rec["NAME"], "pop_0_17": p0, "pop_18_64": p1,
            "pop_65plus": p2, "density_class": cls, "total_beds": beds,
            "lat": f"{c.y:.4f}", "lon": f"{c.x:.4f}",
            "has_airport": "true" if fips in AIRPORTS else "false",
        })
    rows.sort(key=lambda r: r["fips"])
    assert len(rows) == 77, len(rows)

    with open(os.path.join(HERE, "counties.csv"), "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    # Rook-or-queen adjacency: polygons sharing a boundary point. A small
    # buffer absorbs slivers from the 1:500k generalisation.
    fips_sorted = [r["fips"] for r in rows]
    edges = []
    for i, a in enumerate(fips_sorted):
        ga = shapes[a].buffer(1e-4)
        for b in fips_sorted[i + 1:]:
            if ga.intersects(shapes[b]):
                edges.append((a, b))
    with open(os.path.join(HERE, "adjacency.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["fips_a", "fips_b"])
        w.writerows(edges)

    airports = sorted(AIRPORTS)
    with open(os.path.join(HERE, "air_routes.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["fips_a", "fips_b"])
        for i, a in enumerate(airports):
            for b in airports[i + 1:]:
                w.writerow([a, b])

    features = []
    for r in rows:
        geom = shapes[r["fips"]].simplify(0.005, preserve_topology=True)
        features.append({
            "type": "Feature",
            "properties": {"fips": r["fips"], "name": r["name"]},
            "geometry": json.loads(json.dumps(mapping(geom), default=list)),
        })
    with open(os.path.join(HERE, "counties.geojson"), "w") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f,
                  separators=(",", ":"))


if __name__ == "__main__":
    main()
