"""
Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorised pure-numpy version. The numba path is used when numba imports and
the environment variable ``AREALSTATS_DISABLE_NUMBA`` is unset (or ``0``).
Set ``AREALSTATS_DISABLE_NUMBA=1`` to force the numpy path; both paths are
importable directly (``*_numba`` / ``*_numpy``) so they can be cross-checked.

Packed region layout used by the region kernels:

    edges       (E, 4) float64   x0, y0, x1, y1 of every ring edge
    poly_start  (P + 1,) int64   edges of polygon p are edges[poly_start[p]:poly_start[p+1]]
    poly_bbox   (P, 4) float64   xmin, ymin, xmax, ymax per polygon

Membership is even-odd per polygon (outer ring and holes together), union
over polygons, and closed: points within ``tol`` of any edge count as inside.
"""
import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("AREALSTATS_DISABLE_NUMBA", "0").strip().lower() in (
    "1",
    "true",
    "yes",
)
NUMBA_ENABLED = numba is not None and not _DISABLED
BACKEND = "numba" if NUMBA_ENABLED else "numpy"

BOUNDARY_TOL = 1e-12


def _jit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# scalar helpers (compiled when numba is present)
# ---------------------------------------------------------------------------


def _rect_arc_fraction_scalar(cx, cy, r, x0, y0, x1, y1):
    """Fraction of the circle (cx, cy, r) lying in [x0, x1] x [y0, y1].

    The centre must lie in the rectangle. Each side whose distance to the
    centre is below ``r`` cuts off an arc of half-angle acos(d / r) around its
    outward normal; arcs of two adjacent sides overlap by
    ``a + b - pi/2`` when the shared corner is inside the circle. Opposite
    sides never overlap on a set of positive measure.
    """
    if r <= 0.0:
        return 1.0
    dl = cx - x0
    dr = x1 - cx
    db = cy - y0
    dt = y1 - cy
    half = 0.5 * math.pi
    al = math.acos(dl / r) if dl < r else 0.0
    ar = math.acos(dr / r) if dr < r else 0.0
    ab = math.acos(db / r) if db < r else 0.0
    at = math.acos(dt / r) if dt < r else 0.0
    outside = 2.0 * (al + ar + ab + at)
    outside -= max(0.0, al + ab - half)
    outside -= max(0.0, ab + ar - half)
    outside -= max(0.0, ar + at - half)
    outside -= max(0.0, at + al - half)
    frac = 1.0 - outside / (2.0 * math.pi)
    if frac < 0.0:
        return 0.0
    if frac > 1.0:
        return 1.0
    return frac


def _point_in_region_scalar(x, y, edges, poly_start, poly_bbox, tol):
    npoly = poly_bbox.shape[0]
    for p in range(npoly):
        if (
            x < poly_bbox[p, 0] - tol
            or x > poly_bbox[p, 2] + tol
            or y < poly_bbox[p, 1] - tol
            or y > poly_bbox[p, 3] + tol
        ):
            continue
        inside = False
        for e in range(poly_start[p], poly_start[p + 1]):
            ax = edges[e, 0]
            ay = edges[e, 1]
            bx = edges[e, 2]
            by = edges[e, 3]
            # closed boundary
            dx = bx - ax
            dy = by - ay
            seg2 = dx * dx + dy * dy
            if seg2 > 0.0:
                u = ((x - ax) * dx + (y - ay) * dy) / seg2
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
                px = ax + u * dx - x
                py = ay + u * dy - y
            else:
                px = ax - x
                py = ay - y
            if px * px + py * py <= tol * tol:
                return True
            if (ay > y) != (by > y):
                xint = ax + (y - ay) * dx / dy
                if x < xint:
                    inside = not inside
        if inside:
            return True
    return False


if numba is not None:
    _rect_arc_fraction_jit = numba.njit(cache=True, nogil=True)(_rect_arc_fraction_scalar)
    _point_in_region_jit = numba.njit(cache=True, nogil=True)(_point_in_region_scalar)
else:  # pragma: no cover
    _rect_arc_fraction_jit = _rect_arc_fraction_scalar
    _point_in_region_jit = _point_in_region_scalar


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@_jit
def _nn_distances_loop(xy):
    n = xy.shape[0]
    out = np.empty(n)
    for i in range(n):
        best = np.inf
        for j in range(n):
            if j == i:
                continue
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
        out[i] = math.sqrt(best)
    return out


@_jit
def _rect_fractions_loop(cx, cy, r, rect):
    n = cx.shape[0]
    out = np.empty(n)
    for k in range(n):
        out[k] = _rect_arc_fraction_jit(
            cx[k], cy[k], r[k], rect[0], rect[1], rect[2], rect[3]
        )
    return out


@_jit
def _points_in_region_loop(x, y, edges, poly_start, poly_bbox, tol):
    n = x.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for k in range(n):
        out[k] = _point_in_region_jit(x[k], y[k], edges, poly_start, poly_bbox, tol)
    return out


@_jit
def _sampled_fractions_loop(cx, cy, r, n_samples, edges, poly_start, poly_bbox, tol):
    n = cx.shape[0]
    out = np.empty(n)
    step = 2.0 * math.pi / n_samples
    for k in range(n):
        if r[k] <= 0.0:
            out[k] = 1.0
            continue
        hits = 0
        for m in range(n_samples):
            th = (m + 0.5) * step
            px = cx[k] + r[k] * math.cos(th)
            py = cy[k] + r[k] * math.sin(th)
            if _point_in_region_jit(px, py, edges, poly_start, poly_bbox, tol):
                hits += 1
        out[k] = hits / n_samples
    return out


@_jit
def _k_sums_rect_loop(xy, radii, rect):
    n = xy.shape[0]
    nr = radii.shape[0]
    tmax = radii[nr - 1]
    sums = np.zeros(nr)
    bad = 0
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d >= tmax:
                continue
            w = _rect_arc_fraction_jit(
                xy[i, 0], xy[i, 1], d, rect[0], rect[1], rect[2], rect[3]
            )
            if w <= 0.0:
                bad += 1
                continue
            inv = 1.0 / w
            for k in range(nr):
                if d < radii[k]:
                    sums[k] += inv
    return sums, bad


@_jit
def _k_sums_region_loop(xy, radii, n_samples, edges, poly_start, poly_bbox, tol):
    n = xy.shape[0]
    nr = radii.shape[0]
    tmax = radii[nr - 1]
    sums = np.zeros(nr)
    bad = 0
    dist = np.empty(n)
    one_c = np.empty(1)
    one_x = np.empty(1)
    one_r = np.empty(1)
    for i in range(n):
        m = 0
        for j in range(n):
            if j == i:
                continue
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d < tmax:
                dist[m] = d
                m += 1
        if m == 0:
            continue
        ds = np.sort(dist[:m])
        # weight cached per (point, distance): equal distances share one evaluation
        prev = -1.0
        w = 1.0
        for q in range(m):
            d = ds[q]
            if q == 0 or d != prev:
                one_x[0] = xy[i, 0]
                one_c[0] = xy[i, 1]
                one_r[0] = d
                w = _sampled_fractions_loop(
                    one_x, one_c, one_r, n_samples, edges, poly_start, poly_bbox, tol
                )[0]
                prev = d
            if w <= 0.0:
                bad += 1
                continue
            inv = 1.0 / w
            for k in range(nr):
                if d < radii[k]:
                    sums[k] += inv
    return sums, bad


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------


def _pairwise(xy):
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def nn_distances_numpy(xy):
    xy = np.asarray(xy, dtype=float)
    d = _pairwise(xy)
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def rect_fractions_numpy(cx, cy, r, rect):
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    r = np.asarray(r, dtype=float)
    x0, y0, x1, y1 = rect
    safe_r = np.where(r > 0, r, 1.0)

    def half_angle(dist):
        return np.where(dist < r, np.arccos(np.clip(dist / safe_r, -1.0, 1.0)), 0.0)

    al = half_angle(cx - x0)
    ar = half_angle(x1 - cx)
    ab = half_angle(cy - y0)
    at = half_angle(y1 - cy)
    half = 0.5 * np.pi
    outside = 2.0 * (al + ar + ab + at)
    for a, b in ((al, ab), (ab, ar), (ar, at), (at, al)):
        outside -= np.maximum(0.0, a + b - half)
    frac = np.clip(1.0 - outside / (2.0 * np.pi), 0.0, 1.0)
    return np.where(r > 0, frac, 1.0)


def points_in_region_numpy(x, y, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    result = np.zeros(x.shape, dtype=bool)
    for p in range(poly_bbox.shape[0]):
        e = edges[poly_start[p] : poly_start[p + 1]]
        bx0, by0, bx1, by1 = poly_bbox[p]
        cand = (
            ~result
            & (x >= bx0 - tol)
            & (x <= bx1 + tol)
            & (y >= by0 - tol)
            & (y <= by1 + tol)
        )
        if not cand.any():
            continue
        px = x[cand][:, None]
        py = y[cand][:, None]
        ax, ay, bx, by = (e[:, k][None, :] for k in range(4))
        dx = bx - ax
        dy = by - ay
        seg2 = dx * dx + dy * dy
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(seg2 > 0, ((px - ax) * dx + (py - ay) * dy) / seg2, 0.0)
            u = np.clip(u, 0.0, 1.0)
            on_edge = ((ax + u * dx - px) ** 2 + (ay + u * dy - py) ** 2 <= tol * tol).any(
                axis=1
            )
            straddle = (ay > py) != (by > py)
            xint = ax + (py - ay) * dx / np.where(dy != 0, dy, 1.0)
            crossings = (straddle & (px < xint)).sum(axis=1)
        inside = on_edge | (crossings % 2 == 1)
        idx = np.flatnonzero(cand)
        result[idx[inside]] = True
    return result


def sampled_fractions_numpy(cx, cy, r, n_samples, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    r = np.asarray(r, dtype=float)
    theta = (np.arange(n_samples) + 0.5) * (2.0 * np.pi / n_samples)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    out = np.empty(cx.shape[0])
    chunk = max(1, 65536 // n_samples)
    for s in range(0, cx.shape[0], chunk):
        sl = slice(s, s + chunk)
        px = cx[sl, None] + r[sl, None] * cos_t[None, :]
        py = cy[sl, None] + r[sl, None] * sin_t[None, :]
        hit = points_in_region_numpy(
            px.ravel(), py.ravel(), edges, poly_start, poly_bbox, tol
        ).reshape(px.shape)
        out[sl] = hit.sum(axis=1) / n_samples
    return np.where(r > 0, out, 1.0)


def _pair_terms(xy, tmax):
    d = _pairwise(xy)
    np.fill_diagonal(d, np.inf)
    i, j = np.nonzero(d < tmax)
    return i, d[i, j]


def _accumulate(d, w, radii):
    good = w > 0
    bad = int((~good).sum())
    inv = 1.0 / w[good]
    d = d[good]
    sums = np.array([inv[d < t].sum() for t in radii])
    return sums, bad


def k_sums_rect_numpy(xy, radii, rect):
    xy = np.asarray(xy, dtype=float)
    radii = np.asarray(radii, dtype=float)
    i, d = _pair_terms(xy, radii[-1])
    w = rect_fractions_numpy(xy[i, 0], xy[i, 1], d, rect)
    return _accumulate(d, w, radii)


def k_sums_region_numpy(xy, radii, n_samples, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    xy = np.asarray(xy, dtype=float)
    radii = np.asarray(radii, dtype=float)
    i, d = _pair_terms(xy, radii[-1])
    if i.size == 0:
        return np.zeros(radii.shape[0]), 0
    # one weight per distinct (point, distance)
    keys = np.stack([i.astype(float), d], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    ui = uniq[:, 0].astype(np.int64)
    w_u = sampled_fractions_numpy(
        xy[ui, 0], xy[ui, 1], uniq[:, 1], n_samples, edges, poly_start, poly_bbox, tol
    )
    return _accumulate(d, w_u[inverse.ravel()], radii)


# ---------------------------------------------------------------------------
# compiled wrappers + dispatch
# ---------------------------------------------------------------------------


def nn_distances_numba(xy):
    return _nn_distances_loop(np.ascontiguousarray(xy, dtype=np.float64))


def rect_fractions_numba(cx, cy, r, rect):
    return _rect_fractions_loop(
        np.ascontiguousarray(cx, dtype=np.float64),
        np.ascontiguousarray(cy, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
        np.asarray(rect, dtype=np.float64),
    )


def points_in_region_numba(x, y, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    return _points_in_region_loop(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        edges,
        poly_start,
        poly_bbox,
        float(tol),
    )


def sampled_fractions_numba(cx, cy, r, n_samples, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    return _sampled_fractions_loop(
        np.ascontiguousarray(cx, dtype=np.float64),
        np.ascontiguousarray(cy, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
        int(n_samples),
        edges,
        poly_start,
        poly_bbox,
        float(tol),
    )


def k_sums_rect_numba(xy, radii, rect):
    sums, bad = _k_sums_rect_loop(
        np.ascontiguousarray(xy, dtype=np.float64),
        np.ascontiguousarray(radii, dtype=np.float64),
        np.asarray(rect, dtype=np.float64),
    )
    return sums, int(bad)


def k_sums_region_numba(xy, radii, n_samples, edges, poly_start, poly_bbox, tol=BOUNDARY_TOL):
    sums, bad = _k_sums_region_loop(
        np.ascontiguousarray(xy, dtype=np.float64),
        np.ascontiguousarray(radii, dtype=np.float64),
        int(n_samples),
        edges,
        poly_start,
        poly_bbox,
        float(tol),
    )
    return sums, int(bad)


if NUMBA_ENABLED:
    nn_distances = nn_distances_numba
    rect_fractions = rect_fractions_numba
    points_in_region = points_in_region_numba
    sampled_fractions = sampled_fractions_numba
    k_sums_rect = k_sums_rect_numba
    k_sums_region = k_sums_region_numba
else:
    nn_distances = nn_distances_numpy
    rect_fractions = rect_fractions_numpy
    points_in_region = points_in_region_numpy
    sampled_fractions = sampled_fractions_numpy
    k_sums_rect = k_sums_rect_numpy
    k_sums_region = k_sums_region_numpy
