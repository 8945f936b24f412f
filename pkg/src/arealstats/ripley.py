"""
Ripley's K and L with isotropic (circumference-fraction) edge correction,
Monte Carlo null envelopes, and per-radius tests.

``k_hat`` follows the estimator literally: ``|A| / N**2`` times the sum over
ordered pairs ``i != j`` with ``d_ij < t`` of ``1 / w_ij``, where ``w_ij`` is
the fraction of the circle about point ``i`` through point ``j`` lying inside
the region. ``normalization="n(n-1)"`` switches the denominator to
``N (N - 1)``; test decisions do not depend on the choice.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ann import Tail
from .areal import ArealStructure
from .errors import (
    ContractViolationError,
    DegenerateWeightError,
    DomainError,
    InsufficientPointsError,
    InvalidRadiusGridError,
    SamplingInefficiencyError,
)
from .geometry import DEFAULT_ARC_SAMPLES, Region, as_points, min_pairwise_distance
from .rng import as_generator, substream

NORMALIZATIONS = ("n2", "n(n-1)")
QUANTILE_LEVELS = (0.025, 0.05, 0.95, 0.975)
MIN_ACCEPTANCE = 1e-4
MIN_SIMULATIONS = 100


@dataclass(frozen=True)
class RadiusGrid:
    radii: tuple

    def __post_init__(self):
        r = tuple(float(t) for t in self.radii)
        if not r or r[0] <= 0 or any(b <= a for a, b in zip(r, r[1:])):
            raise InvalidRadiusGridError(f"radii must be positive and strictly increasing: {r}")
        object.__setattr__(self, "radii", r)

    def __len__(self):
        return len(self.radii)

    def as_array(self) -> np.ndarray:
        return np.array(self.radii)


def radius_grid(structure: ArealStructure, count: int = 5) -> RadiusGrid:
    """Smallest radius twice the closest centroid spacing, largest a quarter of
    the study-area width (x-extent), interior radii evenly spaced."""
    if structure.n_a < 2:
        raise InsufficientPointsError("radius grid needs at least 2 units")
    t1 = 2.0 * min_pairwise_distance(structure.centroids())
    t5 = structure.region.bbox.width / 4.0
    if not t1 < t5:
        raise InvalidRadiusGridError(f"smallest radius {t1} is not below largest radius {t5}")
    return RadiusGrid(tuple(np.linspace(t1, t5, count)))


def _coerce_radii(radii) -> RadiusGrid:
    return radii if isinstance(radii, RadiusGrid) else RadiusGrid(tuple(radii))


@dataclass(frozen=True)
class KEstimate:
    radii: RadiusGrid
    khat: np.ndarray
    lhat: np.ndarray
    n: int
    area: float
    lambda_hat: float
    normalization: str = "n2"


def _scale(n: int, area: float, normalization: str) -> float:
    if normalization == "n2":
        return area / (n * n)
    if normalization == "n(n-1)":
        return area / (n * (n - 1))
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")


def _weighted_pair_sums(xy, region: Region, radii: np.ndarray, n_samples: int):
    if region.rect is not None:
        sums, bad = _kernels.k_sums_rect(xy, radii, region.rect.as_tuple())
    else:
        sums, bad = _kernels.k_sums_region(xy, radii, n_samples, *region.packed)
    if bad:
        raise DegenerateWeightError(f"{bad} pair(s) had a zero edge-correction weight")
    return sums


def k_hat(
    points,
    region: Region,
    radii,
    normalization: str = "n2",
    n_samples: int = DEFAULT_ARC_SAMPLES,
    check_inside: bool = True,
) -> KEstimate:
    xy = as_points(points)
    grid = _coerce_radii(radii)
    n = len(xy)
    if n < 2:
        raise InsufficientPointsError("K needs at least 2 points")
    if check_inside and not region.contains_many(xy).all():
        raise DomainError("every point must lie inside the region")
    scale = _scale(n, region.area, normalization)
    khat = _weighted_pair_sums(xy, region, grid.as_array(), n_samples) * scale
    return KEstimate(grid, khat, np.sqrt(khat / math.pi), n, region.area, n / region.area, normalization)


def sample_csr(n: int, region: Region, seed) -> np.ndarray:
    """``n`` i.i.d. uniform points on the region via bounding-box rejection."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = as_generator(seed)
    box = region.bbox
    if n == 0:
        return np.empty((0, 2))
    if region.rect is not None:
        u = rng.random((n, 2))
        return np.column_stack([box.xmin + u[:, 0] * box.width, box.ymin + u[:, 1] * box.height])
    rate = region.area / box.area
    if rate < MIN_ACCEPTANCE:
        raise SamplingInefficiencyError(f"acceptance rate {rate:.2e} is below {MIN_ACCEPTANCE}")
    out = []
    have = 0
    while have < n:
        m = int(math.ceil((n - have) / rate * 1.2)) + 16
        u = rng.random((m, 2))
        cand = np.column_stack([box.xmin + u[:, 0] * box.width, box.ymin + u[:, 1] * box.height])
        keep = cand[region.contains_many(cand)]
        out.append(keep[: n - have])
        have += len(out[-1])
    return np.vstack(out)


def order_statistic_quantile(sorted_samples: np.ndarray, q: float) -> np.ndarray:
    """The ceil(q * n)-th order statistic along axis 0 (no interpolation)."""
    m = sorted_samples.shape[0]
    k = max(1, math.ceil(round(q * m, 9)))
    return sorted_samples[k - 1]


@dataclass(frozen=True, eq=False)
class Envelope:
    radii: RadiusGrid
    n: int
    n_sim: int
    samples: np.ndarray  # (n_sim, n_radii), sorted per radius
    quantiles: dict = field(repr=False)
    seed: object = None
    normalization: str = "n2"

    def q(self, level: float) -> np.ndarray:
        return self.quantiles[level]


def mc_envelope(
    n: int,
    region: Region,
    radii,
    n_sim: int = 1000,
    seed=0,
    normalization: str = "n2",
    threads: int = 1,
    n_samples: int = DEFAULT_ARC_SAMPLES,
) -> Envelope:
    """Null distribution of K-hat from ``n_sim`` CSR patterns of size ``n``.

    Simulation ``s`` draws from ``substream(seed, s)``, so the result does not
    depend on ``threads``.
    """
    if n < 2:
        raise InsufficientPointsError("envelope needs n >= 2")
    if n_sim < MIN_SIMULATIONS:
        raise ValueError(f"n_sim must be >= {MIN_SIMULATIONS}")
    grid = _coerce_radii(radii)
    seed_int = int(seed)

    def one(s):
        try:
            pts = sample_csr(n, region, substream(seed_int, s))
            return k_hat(pts, region, grid, normalization, n_samples, check_inside=False).khat
        except Exception as exc:
            raise RuntimeError(f"envelope simulation {s} failed: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(n_sim)))
    else:
        rows = [one(s) for s in range(n_sim)]
    samples = np.sort(np.vstack(rows), axis=0)
    quantiles = {q: order_statistic_quantile(samples, q) for q in QUANTILE_LEVELS}
    return Envelope(grid, n, n_sim, samples, quantiles, seed, normalization)


@dataclass(frozen=True)
class KTestResult:
    estimate: KEstimate
    envelope: Envelope
    reject: np.ndarray
    tail: Tail


def decide_k(khat: np.ndarray, envelope: Envelope, tail: Tail | str) -> np.ndarray:
    tail = Tail(tail)
    if tail is Tail.RIGHT:
        return khat > envelope.q(0.95)
    if tail is Tail.TWO:
        return (khat > envelope.q(0.975)) | (khat < envelope.q(0.025))
    raise ValueError("the K test supports two-sided and right-tailed alternatives only")


def k_test(
    points,
    region: Region,
    envelope: Envelope,
    tail: Tail | str = Tail.TWO,
    n_samples: int = DEFAULT_ARC_SAMPLES,
    radii=None,
) -> KTestResult:
    """Compare a pattern's K-hat with ``envelope``.

    Passing ``radii`` is optional; when given it must match the envelope grid.
    """
    xy = as_points(points)
    if len(xy) != envelope.n:
        raise ContractViolationError(f"pattern has {len(xy)} points but envelope was built for {envelope.n}")
    if radii is not None and _coerce_radii(radii) != envelope.radii:
        raise ContractViolationError("pattern radii differ from the envelope's radius grid")
    est = k_hat(xy, region, envelope.radii, envelope.normalization, n_samples)
    return KTestResult(est, envelope, decide_k(est.khat, envelope, tail), Tail(tail))
