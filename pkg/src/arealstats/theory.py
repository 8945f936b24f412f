"""
Lattice-point counts on the infinite unit grid.

On an infinite unit-spacing grid whose cells are each observed with
probability ``p``, the expected number of observed centroids within ``t`` of a
given centroid is ``p * N(t)`` and the intensity is ``p``, so
``K_grid(t) = N(t)`` whatever ``p`` is. No function here takes ``p`` for that
reason.

``N(t)`` counts integer points ``(x, y)`` with ``x**2 + y**2 <= t**2`` (the
Gauss circle problem). ``Er(t) = N(t) - pi t**2`` satisfies
``|Er(t)| <= C t**theta`` with ``1/2 < theta <= 131/208``; those constants are
documented below but never used in computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

# documentation only: best classical exponent bound for the error term
THETA_UPPER = Fraction(131, 208)
THETA_LOWER_EXCLUSIVE = Fraction(1, 2)

SNAP_TOL = 1e-9


def squared_radius(t: Real):
    """``t**2`` as an int when it is within ``SNAP_TOL`` of one, else a float.

    Radii such as ``math.sqrt(m)`` square to ``m`` up to rounding; snapping
    keeps the lattice points at exactly distance ``t`` inside the circle.
    """
    if t < 0:
        raise ValueError("radius must be non-negative")
    if isinstance(t, int):
        return t * t
    if isinstance(t, Fraction):
        sq = t * t
        return sq.numerator if sq.denominator == 1 else sq
    sq = float(t) * float(t)
    near = round(sq)
    if abs(sq - near) <= SNAP_TOL * max(1.0, sq):
        return int(near)
    return sq


def lattice_count_sq(m: int) -> int:
    """``N`` for squared radius ``m`` using the alternating divisor series."""
    if m < 0:
        raise ValueError("squared radius must be non-negative")
    total = 0
    i = 0
    while 4 * i + 1 <= m:
        total += m // (4 * i + 1) - m // (4 * i + 3)
        i += 1
    return 1 + 4 * total


def lattice_count_closed(t: Real) -> int:
    sq = squared_radius(t)
    # x**2 + y**2 is an integer, so only floor(t**2) matters
    m = sq if isinstance(sq, int) else math.floor(sq)
    return lattice_count_sq(m)


def lattice_count_oracle(t: Real) -> int:
    """Brute-force count over the square ``[-ceil(t), ceil(t)]**2``."""
    sq = squared_radius(t)
    if float(t) > 1e4:
        raise ValueError("oracle is limited to t <= 1e4")
    c = math.ceil(float(t))
    xs = np.arange(-c, c + 1, dtype=np.int64)
    ys2 = xs * xs
    count = 0
    for x in xs:
        if isinstance(sq, int):
            count += int(np.count_nonzero(x * x + ys2 <= sq))
        else:
            count += int(np.count_nonzero((x * x + ys2).astype(float) <= sq))
    return count


@dataclass(frozen=True)
class LatticeCount:
    t: float
    n_of_t: int
    k_csr: float
    error: float

    @property
    def scaled_error(self) -> float:
        """``|Er(t)| / sqrt(t)``."""
        return abs(self.error) / math.sqrt(self.t) if self.t > 0 else math.inf


def lattice_row(t: Real) -> LatticeCount:
    n = lattice_count_closed(t)
    k = math.pi * float(t) ** 2
    return LatticeCount(float(t), n, k, n - k)


def divergence_table(t_max: float, step: float) -> list:
    """Rows at ``t = step, 2 step, ...`` up to ``t_max`` comparing N(t) with pi t^2."""
    if not step > 0:
        raise ValueError("step must be positive")
    count = int(math.floor(t_max / step + 1e-9))
    return [lattice_row(k * step) for k in range(1, count + 1)]
