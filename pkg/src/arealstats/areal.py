"""
Areal structures: collections of polygonal units with centroids, adjacency
and the union study region.

Structures are built either as a regular grid (:func:`build_grid`) or from a
planar GeoJSON FeatureCollection (:func:`load_structure`). Every feature must
carry a string ``id`` property.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidGeometryError, LoadError
from .geometry import (
    Point,
    Polygon,
    Rect,
    Region,
    Shape,
    _parts,
    polygon_area,
    polygon_centroid,
)

ADJACENCY_TOL = 1e-9

_GEOGRAPHIC_CRS_HINTS = ("crs84", "epsg:4326", "epsg::4326", "4269", "4258", "wgs84", "wgs 84")


class AdjacencyRule(str, enum.Enum):
    SHARED_EDGE = "shared-edge"  # rook
    SHARED_VERTEX = "shared-vertex"  # queen


@dataclass(frozen=True)
class ArealUnit:
    id: str
    shape: Shape
    centroid: Point
    area: float

    @classmethod
    def from_shape(cls, uid: str, shape: Shape) -> "ArealUnit":
        area = polygon_area(shape)
        if not area > 0:
            raise InvalidGeometryError(f"unit {uid!r} has zero area")
        return cls(uid, shape, polygon_centroid(shape), area)

    @property
    def parts(self):
        return _parts(self.shape)


@dataclass(frozen=True, eq=False)
class ArealStructure:
    units: tuple
    region: Region
    adjacency: Mapping[str, frozenset]
    rule: AdjacencyRule = AdjacencyRule.SHARED_EDGE

    @property
    def n_a(self) -> int:
        return len(self.units)

    @property
    def ids(self) -> list:
        return [u.id for u in self.units]

    def centroids(self, ids=None) -> np.ndarray:
        """Centroid array for ``ids`` (all units, in order, when omitted)."""
        if ids is None:
            return np.array([u.centroid for u in self.units], dtype=float).reshape(-1, 2)
        index = self.index
        return np.array([self.units[index[i]].centroid for i in ids], dtype=float).reshape(-1, 2)

    @property
    def index(self) -> dict:
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {u.id: k for k, u in enumerate(self.units)}
            object.__setattr__(self, "_index", cached)
        return cached


def _freeze(adj: dict) -> Mapping[str, frozenset]:
    return MappingProxyType({k: frozenset(v) for k, v in adj.items()})


def _union_region(units) -> Region:
    polys = [p for u in units for p in u.parts]
    region = Region(polys)
    bbox = region.bbox
    # units partition the study area, so covering the bbox means the union is the bbox
    if region.rect is None and abs(region.area - bbox.area) <= 1e-9 * bbox.area:
        region = Region(polys, rect=bbox)
    return region


def build_grid(rows: int, cols: int, cell_size: float = 1.0) -> ArealStructure:
    """Square ``rows`` x ``cols`` grid with rook adjacency and ids ``r{row}c{col}``."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    s = float(cell_size)
    units = []
    adj = {}
    for i in range(rows):
        for j in range(cols):
            uid = f"r{i}c{j}"
            poly = Rect(j * s, i * s, (j + 1) * s, (i + 1) * s).to_polygon()
            units.append(ArealUnit(uid, poly, Point((j + 0.5) * s, (i + 0.5) * s), s * s))
            nb = set()
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                a, b = i + di, j + dj
                if 0 <= a < rows and 0 <= b < cols:
                    nb.add(f"r{a}c{b}")
            adj[uid] = nb
    rect = Rect(0.0, 0.0, cols * s, rows * s)
    region = Region([rect.to_polygon()])
    return ArealStructure(tuple(units), region, _freeze(adj), AdjacencyRule.SHARED_EDGE)


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------


def _edges(unit: ArealUnit) -> np.ndarray:
    out = []
    for p in unit.parts:
        for ring in p.rings:
            out.append(np.hstack([ring, np.roll(ring, -1, axis=0)]))
    return np.vstack(out)


def _shares_edge(ea: np.ndarray, eb: np.ndarray, tol: float) -> bool:
    p = ea[:, None, 0:2]
    d = ea[:, None, 2:4] - p
    length = np.sqrt((d**2).sum(-1))
    r = eb[None, :, 0:2] - p
    s = eb[None, :, 2:4] - p
    safe = np.where(length > 0, length, 1.0)
    # perpendicular distances of eb endpoints from the line through ea
    dist_r = np.abs(d[..., 0] * r[..., 1] - d[..., 1] * r[..., 0]) / safe
    dist_s = np.abs(d[..., 0] * s[..., 1] - d[..., 1] * s[..., 0]) / safe
    collinear = (dist_r <= tol) & (dist_s <= tol) & (length > 0)
    if not collinear.any():
        return False
    tr = (d * r).sum(-1) / safe
    ts = (d * s).sum(-1) / safe
    lo = np.maximum(0.0, np.minimum(tr, ts))
    hi = np.minimum(length, np.maximum(tr, ts))
    return bool((collinear & (hi - lo > tol)).any())


def _boundary_gap(ea: np.ndarray, eb: np.ndarray) -> float:
    """Smallest distance from a vertex of one boundary to an edge of the other."""

    def vert_to_edges(v, e):
        a = e[None, :, 0:2]
        d = e[None, :, 2:4] - a
        seg2 = (d**2).sum(-1)
        w = v[:, None, :] - a
        u = np.clip((w * d).sum(-1) / np.where(seg2 > 0, seg2, 1.0), 0.0, 1.0)
        gap = w - u[..., None] * d
        return np.sqrt((gap**2).sum(-1)).min()

    return float(min(vert_to_edges(ea[:, 0:2], eb), vert_to_edges(eb[:, 0:2], ea)))


def compute_adjacency(units, rule: AdjacencyRule | str = AdjacencyRule.SHARED_EDGE, tol: float = ADJACENCY_TOL):
    """Symmetric, irreflexive adjacency between units.

    Shared-edge mode needs a common boundary segment longer than ``tol``;
    shared-vertex mode accepts any boundary contact within ``tol``.
    """
    rule = AdjacencyRule(rule)
    units = list(units)
    edges = [_edges(u) for u in units]
    boxes = np.array([[e[:, [0, 2]].min(), e[:, [1, 3]].min(), e[:, [0, 2]].max(), e[:, [1, 3]].max()] for e in edges])
    adj = {u.id: set() for u in units}
    for a in range(len(units)):
        overlap = (
            (boxes[a + 1 :, 0] <= boxes[a, 2] + tol)
            & (boxes[a + 1 :, 2] >= boxes[a, 0] - tol)
            & (boxes[a + 1 :, 1] <= boxes[a, 3] + tol)
            & (boxes[a + 1 :, 3] >= boxes[a, 1] - tol)
        )
        for b in np.flatnonzero(overlap) + a + 1:
            if rule is AdjacencyRule.SHARED_EDGE:
                touch = _shares_edge(edges[a], edges[b], tol)
            else:
                touch = _boundary_gap(edges[a], edges[b]) <= tol
            if touch:
                adj[units[a].id].add(units[b].id)
                adj[units[b].id].add(units[a].id)
    return _freeze(adj)


# ---------------------------------------------------------------------------
# GeoJSON
# ---------------------------------------------------------------------------


def _polygon_from_coords(coords, fid) -> Polygon:
    if not coords:
        raise LoadError(f"feature {fid!r}: empty polygon")
    try:
        return Polygon(coords[0], tuple(coords[1:]))
    except InvalidGeometryError as exc:
        raise LoadError(f"feature {fid!r}: {exc}") from exc


def _shape_from_geometry(geom, fid) -> Shape:
    if not geom or "type" not in geom:
        raise LoadError(f"feature {fid!r}: empty geometry")
    kind = geom["type"]
    coords = geom.get("coordinates")
    if not coords:
        raise LoadError(f"feature {fid!r}: empty geometry")
    if kind == "Polygon":
        return _polygon_from_coords(coords, fid)
    if kind == "MultiPolygon":
        parts = tuple(_polygon_from_coords(c, fid) for c in coords)
        return parts[0] if len(parts) == 1 else parts
    raise LoadError(f"feature {fid!r}: unsupported geometry type {kind!r}")


def _reject_geographic(doc):
    crs = doc.get("crs")
    if crs is None:
        return
    name = json.dumps(crs).lower()
    if any(h in name for h in _GEOGRAPHIC_CRS_HINTS):
        raise LoadError(
            "document declares a geographic CRS; distances and areas need planar "
            "coordinates, so reproject to a projected CRS before loading"
        )


def load_structure(source, rule: AdjacencyRule | str = AdjacencyRule.SHARED_EDGE) -> ArealStructure:
    """Load a planar GeoJSON FeatureCollection.

    ``source`` may be a path, a JSON string, or an already-parsed mapping.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text(encoding="utf-8")
            except OSError as exc:
                raise LoadError(f"cannot read {source}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LoadError(f"invalid JSON: {exc}") from exc
    if doc.get("type") != "FeatureCollection":
        raise LoadError("expected a GeoJSON FeatureCollection")
    _reject_geographic(doc)
    units = []
    seen = set()
    for k, feat in enumerate(doc.get("features") or []):
        props = feat.get("properties") or {}
        fid = props.get("id")
        if not isinstance(fid, str) or not fid:
            raise LoadError(f"feature #{k}: missing string 'id' property")
        if fid in seen:
            raise LoadError(f"feature {fid!r}: duplicate id")
        seen.add(fid)
        shape = _shape_from_geometry(feat.get("geometry"), fid)
        try:
            units.append(ArealUnit.from_shape(fid, shape))
        except InvalidGeometryError as exc:
            raise LoadError(f"feature {fid!r}: {exc}") from exc
    if not units:
        raise LoadError("feature collection has no features")
    rule = AdjacencyRule(rule)
    return ArealStructure(tuple(units), _union_region(units), compute_adjacency(units, rule), rule)


def _polygon_coords(p: Polygon):
    return [np.vstack([r, r[:1]]).tolist() for r in p.rings]


def dump_structure(structure: ArealStructure) -> dict:
    """Serialise a structure back to a GeoJSON FeatureCollection mapping."""
    feats = []
    for u in structure.units:
        if isinstance(u.shape, Polygon):
            geom = {"type": "Polygon", "coordinates": _polygon_coords(u.shape)}
        else:
            geom = {"type": "MultiPolygon", "coordinates": [_polygon_coords(p) for p in u.shape]}
        feats.append({"type": "Feature", "properties": {"id": u.id}, "geometry": geom})
    return {"type": "FeatureCollection", "features": feats}


def parse_structure_ref(ref: str, base_dir: Path | None = None) -> ArealStructure:
    """Resolve ``grid:R,C,S`` or ``file:path`` (a bare path also works)."""
    if ref.startswith("grid:"):
        parts = ref[5:].split(",")
        if len(parts) not in (2, 3):
            raise ValueError(f"grid reference must be grid:R,C[,S], got {ref!r}")
        rows, cols = int(parts[0]), int(parts[1])
        size = float(parts[2]) if len(parts) == 3 else 1.0
        return build_grid(rows, cols, size)
    path = Path(ref[5:] if ref.startswith("file:") else ref)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return load_structure(path)
