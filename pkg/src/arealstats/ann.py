"""
Clark-Evans average nearest neighbour ratio and its normal z-test.

The expected mean distance uses the infinite-area formula ``1 / (2 sqrt(rho))``
with no edge correction, and the standard error is ``0.26136 / sqrt(N rho)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateWindowError, InsufficientPointsError
from .geometry import Region, as_points, bounding_rect

SE_CONSTANT = 0.26136

# standard normal quantiles, fixed so decisions are bit-stable across platforms
Z_975 = 1.959964
Z_95 = 1.644854
Z_05 = -1.644854


class Tail(str, enum.Enum):
    TWO = "two"
    LEFT = "left"
    RIGHT = "right"


class WindowChoice(str, enum.Enum):
    STUDY = "study"  # window 1: the whole study area
    BBOX = "bbox"  # window 2: bounding rectangle of the observed points


@dataclass(frozen=True)
class AnnResult:
    n: int
    area: float
    rho: float
    r_bar_o: float
    r_bar_e: float
    ratio: float
    sigma: float
    z: float
    tail: Tail
    reject: bool


def nn_distances(points) -> np.ndarray:
    """Distance from each point to its nearest other point, in input order."""
    xy = as_points(points)
    if len(xy) < 2:
        raise InsufficientPointsError("nearest-neighbour distances need at least 2 points")
    return _kernels.nn_distances(xy)


def decide(z: float, tail: Tail | str) -> bool:
    tail = Tail(tail)
    if tail is Tail.TWO:
        return abs(z) > Z_975
    if tail is Tail.LEFT:
        return z < Z_05
    return z > Z_95


def ann_from_distances(nn: np.ndarray, area: float, tail: Tail | str = Tail.TWO) -> AnnResult:
    n = len(nn)
    rho = n / area if area > 0 else math.inf
    if not math.isfinite(rho):
        # subnormal areas overflow the intensity and leave sigma at zero
        raise DegenerateWindowError(f"window area {area!r} is too small for a finite intensity")
    r_bar_o = float(np.mean(nn))
    r_bar_e = 1.0 / (2.0 * math.sqrt(rho))
    sigma = SE_CONSTANT / math.sqrt(n * rho)
    z = (r_bar_o - r_bar_e) / sigma
    return AnnResult(n, float(area), rho, r_bar_o, r_bar_e, r_bar_o / r_bar_e, sigma, z, Tail(tail), decide(z, tail))


def window_area(points, study_region: Region, window: WindowChoice | str) -> float:
    if WindowChoice(window) is WindowChoice.STUDY:
        return study_region.area
    rect = bounding_rect(points)
    if rect.degenerate or not rect.area > 0:
        raise DegenerateWindowError(
            f"bounding rectangle {rect.as_tuple()} has zero area; window 2 is undefined"
        )
    return rect.area


def ann_test(
    points,
    study_region: Region,
    window: WindowChoice | str = WindowChoice.STUDY,
    tail: Tail | str = Tail.TWO,
) -> AnnResult:
    xy = as_points(points)
    nn = nn_distances(xy)
    return ann_from_distances(nn, window_area(xy, study_region, window), tail)
