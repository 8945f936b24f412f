"""Regenerate src/arealstats/data/irregular30.geojson.

A 10 x 3 lattice of quadrilaterals whose shared vertices (boundary ones
included) are jittered, so units are irregular and the study region is not a
rectangle. Coordinates are planar, in kilometres.
"""
import json
from pathlib import Path

import numpy as np

COLS, ROWS, CELL, JITTER, SEED = 10, 3, 10.0, 0.3, 20240517


def main():
    rng = np.random.default_rng(SEED)
    vx, vy = np.meshgrid(np.arange(COLS + 1) * CELL, np.arange(ROWS + 1) * CELL)
    vx = vx + rng.uniform(-JITTER, JITTER, vx.shape) * CELL
    vy = vy + rng.uniform(-JITTER, JITTER, vy.shape) * CELL
    feats = []
    for i in range(ROWS):
        for j in range(COLS):
            ring = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j), (i, j)]
            coords = [[round(float(vx[a, b]), 6), round(float(vy[a, b]), 6)] for a, b in ring]
            feats.append(
                {
                    "type": "Feature",
                    "properties": {"id": f"u{i * COLS + j:02d}"},
                    "geometry": {"type": "Polygon", "coordinates": [coords]},
                }
            )
    out = Path(__file__).resolve().parents[1] / "src" / "arealstats" / "data" / "irregular30.geojson"
    out.write_text(json.dumps({"type": "FeatureCollection", "features": feats}, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
