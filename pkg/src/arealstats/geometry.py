"""
Planar geometry primitives: polygons, regions, rectangles, distances and the
circle-in-region fraction used for isotropic edge correction.

Coordinates are planar (already projected); nothing here is geodesic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .errors import (
    DegenerateWeightError,
    DomainError,
    InsufficientPointsError,
    InvalidGeometryError,
)

DEFAULT_ARC_SAMPLES = 2048


class Point(NamedTuple):
    x: float
    y: float


def as_points(points) -> np.ndarray:
    """Coerce a point collection to a float ``(n, 2)`` array."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("point coordinates must be finite")
    return arr


def _ring_array(ring) -> np.ndarray:
    arr = np.asarray(ring, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidGeometryError(f"ring must be a sequence of (x, y) pairs, got {arr.shape}")
    if len(arr) > 1 and np.array_equal(arr[0], arr[-1]):
        arr = arr[:-1]
    if len(np.unique(arr, axis=0)) < 3:
        raise InvalidGeometryError("ring needs at least 3 distinct vertices")
    if not np.isfinite(arr).all():
        raise InvalidGeometryError("ring coordinates must be finite")
    return arr


def _ring_moments(ring: np.ndarray):
    """Signed area and first moments (Sx, Sy) of a ring via the shoelace formula."""
    x = ring[:, 0]
    y = ring[:, 1]
    # shift for conditioning; moments are shifted back below
    ox, oy = x.mean(), y.mean()
    x = x - ox
    y = y - oy
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    sx = ((x + xn) * cross).sum() / 6.0
    sy = ((y + yn) * cross).sum() / 6.0
    return a, sx + a * ox, sy + a * oy


@dataclass(frozen=True)
class Polygon:
    """An outer ring plus zero or more holes. Vertex order is irrelevant."""

    exterior: np.ndarray
    holes: tuple = ()

    def __post_init__(self):
        ext = _ring_array(self.exterior)
        holes = tuple(_ring_array(h) for h in self.holes)
        if _ring_moments(ext)[0] == 0.0:
            raise InvalidGeometryError("outer ring has zero area (collinear vertices)")
        for h in holes:
            if _ring_moments(h)[0] == 0.0:
                raise InvalidGeometryError("hole has zero area (collinear vertices)")
        object.__setattr__(self, "exterior", ext)
        object.__setattr__(self, "holes", holes)
        if holes:
            outer = _pack([Polygon.__new_unchecked(ext)])
            for h in holes:
                if not _kernels.points_in_region(h[:, 0], h[:, 1], *outer).all():
                    raise InvalidGeometryError("hole is not inside the outer ring")

    @classmethod
    def __new_unchecked(cls, exterior):
        obj = object.__new__(cls)
        object.__setattr__(obj, "exterior", exterior)
        object.__setattr__(obj, "holes", ())
        return obj

    @property
    def rings(self):
        return (self.exterior,) + self.holes

    def translated(self, dx: float, dy: float) -> "Polygon":
        v = np.array([dx, dy])
        return Polygon(self.exterior + v, tuple(h + v for h in self.holes))

    def scaled(self, c: float) -> "Polygon":
        return Polygon(self.exterior * c, tuple(h * c for h in self.holes))


Shape = Union[Polygon, Sequence[Polygon]]


def _parts(shape: Shape):
    if isinstance(shape, Polygon):
        return (shape,)
    parts = tuple(shape)
    if not parts:
        raise InvalidGeometryError("empty multipolygon")
    return parts


def _polygon_moments(p: Polygon):
    a, sx, sy = _ring_moments(p.exterior)
    sign = 1.0 if a > 0 else -1.0
    area, mx, my = sign * a, sign * sx, sign * sy
    for h in p.holes:
        ha, hx, hy = _ring_moments(h)
        s = 1.0 if ha > 0 else -1.0
        area -= s * ha
        mx -= s * hx
        my -= s * hy
    return area, mx, my


def polygon_area(p: Shape) -> float:
    """Unsigned area, holes subtracted; multipolygons sum their parts."""
    return float(sum(_polygon_moments(part)[0] for part in _parts(p)))


def polygon_centroid(p: Shape) -> Point:
    """Area-weighted centroid (first moment of area over area)."""
    area = mx = my = 0.0
    for part in _parts(p):
        a, sx, sy = _polygon_moments(part)
        area += a
        mx += sx
        my += sy
    if area <= 0.0:
        raise InvalidGeometryError("centroid of a zero-area polygon is undefined")
    return Point(mx / area, my / area)


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def degenerate(self) -> bool:
        return not (self.xmax > self.xmin and self.ymax > self.ymin)

    def as_tuple(self):
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def to_polygon(self) -> Polygon:
        return Polygon(
            [
                (self.xmin, self.ymin),
                (self.xmax, self.ymin),
                (self.xmax, self.ymax),
                (self.xmin, self.ymax),
            ]
        )


def _pack(polygons):
    edges = []
    starts = [0]
    bboxes = []
    for p in polygons:
        for ring in (p.exterior,) + tuple(p.holes):
            nxt = np.roll(ring, -1, axis=0)
            edges.append(np.hstack([ring, nxt]))
        starts.append(starts[-1] + sum(len(r) for r in (p.exterior,) + tuple(p.holes)))
        ext = p.exterior
        bboxes.append([ext[:, 0].min(), ext[:, 1].min(), ext[:, 0].max(), ext[:, 1].max()])
    return (
        np.ascontiguousarray(np.vstack(edges), dtype=np.float64),
        np.asarray(starts, dtype=np.int64),
        np.ascontiguousarray(bboxes, dtype=np.float64),
    )


def _as_rect(p: Polygon):
    """Return the Rect if ``p`` is exactly an axis-aligned rectangle, else None."""
    if p.holes or len(p.exterior) != 4:
        return None
    xs = np.unique(p.exterior[:, 0])
    ys = np.unique(p.exterior[:, 1])
    if len(xs) != 2 or len(ys) != 2:
        return None
    corners = {(x, y) for x in xs for y in ys}
    if {tuple(v) for v in p.exterior} != corners:
        return None
    return Rect(float(xs[0]), float(ys[0]), float(xs[1]), float(ys[1]))


@dataclass(frozen=True, eq=False)
class Region:
    """Union of polygons forming a study area.

    ``area`` is the sum of member polygon areas, so member polygons are
    expected not to overlap. ``rect`` is set when the region is one
    axis-aligned rectangle, which enables the exact edge-weight path.
    """

    polygons: tuple
    area: float = field(init=False)
    bbox: Rect = field(init=False)
    rect: Rect | None = field(init=False)
    packed: tuple = field(init=False, repr=False)

    def __init__(self, polygons, rect: Rect | None = None):
        polys = tuple(polygons)
        if not polys:
            raise InvalidGeometryError("a region needs at least one polygon")
        area = sum(polygon_area(p) for p in polys)
        if not area > 0:
            raise InvalidGeometryError("region area must be positive")
        allv = np.vstack([p.exterior for p in polys])
        bbox = Rect(*allv.min(axis=0), *allv.max(axis=0))
        if rect is None and len(polys) == 1:
            rect = _as_rect(polys[0])
        object.__setattr__(self, "polygons", polys)
        object.__setattr__(self, "area", float(area))
        object.__setattr__(self, "bbox", Rect(*map(float, bbox.as_tuple())))
        object.__setattr__(self, "rect", rect)
        object.__setattr__(self, "packed", _pack(polys))

    @classmethod
    def from_rect(cls, rect: Rect | Sequence[float]) -> "Region":
        if not isinstance(rect, Rect):
            rect = Rect(*map(float, rect))
        if rect.degenerate:
            raise InvalidGeometryError(f"degenerate rectangle {rect}")
        return cls([rect.to_polygon()])

    def contains_many(self, xy) -> np.ndarray:
        xy = as_points(xy)
        if self.rect is not None:
            r = self.rect
            return (
                (xy[:, 0] >= r.xmin)
                & (xy[:, 0] <= r.xmax)
                & (xy[:, 1] >= r.ymin)
                & (xy[:, 1] <= r.ymax)
            )
        return _kernels.points_in_region(xy[:, 0], xy[:, 1], *self.packed)

    def scaled(self, c: float) -> "Region":
        return Region([p.scaled(c) for p in self.polygons])

    def translated(self, dx: float, dy: float) -> "Region":
        return Region([p.translated(dx, dy) for p in self.polygons])


def contains(r: Region, pt) -> bool:
    """Closed-region membership: boundary points are inside."""
    return bool(r.contains_many(np.asarray(pt, dtype=float).reshape(1, 2))[0])


def min_pairwise_distance(points) -> float:
    xy = as_points(points)
    if len(xy) < 2:
        raise InsufficientPointsError("need at least 2 points for a pairwise distance")
    return float(_kernels.nn_distances(xy).min())


def bounding_rect(points) -> Rect:
    """Tightest axis-aligned rectangle around the points (may be degenerate)."""
    xy = as_points(points)
    if len(xy) == 0:
        raise InsufficientPointsError("bounding rectangle of an empty point set")
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    return Rect(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def edge_weight(
    center,
    radius: float,
    r: Region,
    n_samples: int = DEFAULT_ARC_SAMPLES,
    method: str = "auto",
) -> float:
    """Fraction of the circle about ``center`` that lies inside ``r``.

    ``method="auto"`` uses the closed form when ``r`` is a single axis-aligned
    rectangle and arc sampling otherwise; ``"exact"`` and ``"sampled"`` force
    one path.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    cx, cy = map(float, center)
    if not contains(r, (cx, cy)):
        raise DomainError(f"centre {(cx, cy)} is outside the region")
    if method not in ("auto", "exact", "sampled"):
        raise ValueError(f"unknown edge-weight method {method!r}")
    if method == "exact" and r.rect is None:
        raise ValueError("exact edge weights need a single axis-aligned rectangle")
    if r.rect is not None and method != "sampled":
        w = _kernels._rect_arc_fraction_scalar(cx, cy, float(radius), *r.rect.as_tuple())
    else:
        w = float(
            _kernels.sampled_fractions(
                np.array([cx]), np.array([cy]), np.array([float(radius)]), n_samples, *r.packed
            )[0]
        )
    if w <= 0.0:
        raise DegenerateWeightError(
            f"circle of radius {radius} about {(cx, cy)} lies entirely outside the region"
        )
    return w
