"""Reference exponents for dominance-product cost, d = n**zeta.

These constants come from the published rectangular matrix multiplication
bounds and are reference data only: the kernels in this package run at
exponent 3 (or 2.807 with Strassen), nowhere near these values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

# (r, omega(1, r, 1), zeta) anchors; zeta = (omega + r) / 2 - 1 rounded to 4 places
ANCHORS = (
    (1.0, 2.372864, 0.6865),
    (1.1, 2.456151, 0.7781),
    (1.2, 2.539392, 0.8697),
    (1.3, 2.624703, 0.9624),
    (1.4, 2.711707, 1.0559),
)

# (zeta_min, zeta_max, u, v): cost d**u * n**v on that zeta range
LINEAR_FORMS = (
    (0.687, 0.87, 0.909, 1.75),
    (0.87, 0.963, 0.921, 1.739),
    (0.963, 1.056, 0.931, 1.73),
)

OMEGA = ANCHORS[0][1]
ALPHA = 0.302
SMALL_D = (0.697, 1.896)          # d**0.697 * n**1.896 + n**(2 + o(1))
RECT_BOUND = (0.535, 1.839)       # n x m by m x n product in m**0.535 * n**1.839
ZETA_MAX = ANCHORS[-1][2]


class UnsupportedZeta(ValueError):
    pass


@dataclass(frozen=True)
class ExponentPrediction:
    zeta: float
    regime: str                  # "small-d" or "interpolated"
    exponent: float              # DP(n, n**zeta) = n**exponent, up to polylog
    r: Optional[float]           # n x n**r x n product size; None for small-d
    omega_r: Optional[float]
    u: float                     # published linear form exponent ~= u*zeta + v
    v: float
    segment: Optional[int] = None
    unmodeled_o1: bool = False   # the n**(2+o(1)) floor's o(1) is not modelled


def huang_pan_exponents(omega: float = OMEGA, alpha: float = ALPHA):
    """(exponent of m, exponent of n) for an n x m by m x n product, n**alpha <= m <= n."""
    return (omega - 2) / (1 - alpha), (2 - omega * alpha) / (1 - alpha)


def small_d_block_exponents(zeta: float, rect=RECT_BOUND):
    """Block size exponent sigma (s = n**sigma) balancing (dn/s)**a * n**b against d*n*s,
    and the resulting cost exponent."""
    a, b = rect
    sigma = (a * (1 + zeta) + b - 1 - zeta) / (1 + a)
    return sigma, 1 + zeta + sigma


def interpolate_omega(r: float, lo: int) -> float:
    """omega(1, r, 1) bound by linear interpolation between anchors lo and lo+1."""
    ra, wa, _ = ANCHORS[lo]
    rb, wb, _ = ANCHORS[lo + 1]
    return ((rb - r) * wa + (r - ra) * wb) / (rb - ra)


def solve_r(zeta: float, lo: int) -> float:
    """Closed-form r with (omega_r + r)/2 - 1 = zeta on segment [r_lo, r_lo+1]."""
    ri, wi, _ = ANCHORS[lo]
    rj, wj, _ = ANCHORS[lo + 1]
    return (2 * (zeta + 1) * (rj - ri) - rj * wi + ri * wj) / (wj + rj - wi - ri)


def _segment(zeta: float) -> int:
    for i in range(len(ANCHORS) - 1):
        if zeta <= ANCHORS[i + 1][2]:
            return i
    raise UnsupportedZeta(zeta)


def _linear_form(zeta: float):
    for zmin, zmax, u, v in LINEAR_FORMS:
        if zeta <= zmax:
            return u, v
    return LINEAR_FORMS[-1][2:]


def predict_exponent(zeta: float) -> ExponentPrediction:
    if not (0 < zeta <= ZETA_MAX) or math.isnan(zeta):
        raise UnsupportedZeta(
            f"zeta={zeta} outside (0, {ZETA_MAX}]; the anchor table stops there")
    z0 = ANCHORS[0][2]
    if zeta < z0:
        a, b = SMALL_D
        e = a * zeta + b
        if e < 2.0:
            return ExponentPrediction(zeta, "small-d", 2.0, None, None, 0.0, 2.0,
                                      unmodeled_o1=True)
        return ExponentPrediction(zeta, "small-d", e, None, None, a, b, unmodeled_o1=True)

    i = _segment(zeta)
    ri, _, zi = ANCHORS[i]
    rj, _, zj = ANCHORS[i + 1]
    # r is linear in zeta; pinning the line to the tabulated zeta knots makes
    # every anchor exact (solve_r on unrounded knots differs by < 1e-4)
    r = ri + (zeta - zi) * (rj - ri) / (zj - zi)
    omega_r = interpolate_omega(r, i)
    u, v = _linear_form(zeta)
    return ExponentPrediction(zeta, "interpolated", omega_r, r, omega_r, u, v, segment=i)


def block_size_exponent(omega_k: float) -> float:
    """s = n**((omega_k - 1)/2) balances d*n**omega_k/s (chunked C) against n*d*s (scan)."""
    return (omega_k - 1) / 2
