"""Angular supports: unions of (elevation, azimuth) rectangles and their coefficient-space geometry.

A support rectangle maps to an annular sector in the (gamma_x, gamma_y) plane:
radius between the sines of the elevation bounds, polar angle inside the
azimuth interval.  Beam selection needs exact sector-versus-cell intersection
tests; they live here next to the membership test so the two stay consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import atan2, cos, degrees, hypot, radians, sin, sqrt

from .arrays import AngleCoefficientPair

__all__ = [
    "AngularSupport",
    "support_contains",
    "support_intersects_box",
    "support_bounding_box",
    "support_boundary_polyline",
]

_EPS = 1e-9  # inclusive tolerance for boundary contact, coefficient units
_ANG_EPS = 1e-9  # degrees

_AXES = ((0.0, 1.0, 0.0), (90.0, 0.0, 1.0), (180.0, -1.0, 0.0), (270.0, 0.0, -1.0))


@dataclass(frozen=True)
class AngularSupport:
    """Union of closed (elevation, azimuth) rectangles in degrees.

    Each rectangle is ``((el_lo, el_hi), (az_lo, az_hi))``; elevation lies in
    [0, 90] and azimuth is read modulo 360 so the interval may extend past 360
    (e.g. ``(345, 365)``).  ``coefficient_shift`` translates the whole support
    in (gamma_x, gamma_y) space, modelling a rigid estimation offset: a pair p
    lies in the shifted support iff p - shift lies in the unshifted one.  An
    empty rectangle tuple is a valid support containing nothing.
    """

    rectangles: tuple[tuple[tuple[float, float], tuple[float, float]], ...]
    coefficient_shift: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        for (el_lo, el_hi), (az_lo, az_hi) in self.rectangles:
            if not 0.0 <= el_lo <= el_hi <= 90.0:
                raise ValueError("elevation interval must satisfy 0 <= lo <= hi <= 90")
            if not az_lo <= az_hi:
                raise ValueError("azimuth interval must be ordered low <= high")

    @property
    def is_empty(self) -> bool:
        return len(self.rectangles) == 0

    def shifted(self, dx: float, dy: float) -> "AngularSupport":
        """The same support translated by (dx, dy) in coefficient space."""
        sx, sy = self.coefficient_shift
        return replace(self, coefficient_shift=(sx + dx, sy + dy))


def support_contains(support: AngularSupport, pair: AngleCoefficientPair) -> bool:
    """True iff the coefficient pair lies inside the (possibly shifted) support."""
    sx, sy = support.coefficient_shift
    x = pair.gamma_x - sx
    y = pair.gamma_y - sy
    r = hypot(x, y)
    if r > 1.0:
        return False
    azimuth = degrees(atan2(y, x)) % 360.0
    for (el_lo, el_hi), (az_lo, az_hi) in support.rectangles:
        r_lo = sin(radians(el_lo))
        r_hi = sin(radians(el_hi))
        if r < r_lo - _EPS or r > r_hi + _EPS:
            continue
        if r <= _EPS and r_lo <= _EPS:
            return True  # boresight: azimuth is undefined
        if _azimuth_contains(az_lo, az_hi, azimuth):
            return True
    return False


def _azimuth_contains(az_lo: float, az_hi: float, azimuth: float) -> bool:
    span = az_hi - az_lo
    if span >= 360.0:
        return True
    offset = (azimuth - az_lo) % 360.0
    return offset <= span + _ANG_EPS or offset >= 360.0 - _ANG_EPS


def _azimuth_pieces(az_lo: float, az_hi: float) -> list[tuple[float, float]]:
    """Split a modulo-360 interval into non-wrapping pieces within [0, 360]."""
    span = az_hi - az_lo
    if span >= 360.0:
        return [(0.0, 360.0)]
    a = az_lo % 360.0
    b = a + span
    if b <= 360.0:
        return [(a, b)]
    return [(a, 360.0), (0.0, b - 360.0)]


def support_intersects_box(
    support: AngularSupport,
    x_bounds: tuple[float, float],
    y_bounds: tuple[float, float],
) -> bool:
    """Exact test of whether the support meets a closed axis-aligned box.

    The box is translated by minus the support's coefficient shift, which is
    equivalent to (and cheaper than) shifting the curved region itself.
    Boundary contact counts as intersection.
    """
    sx, sy = support.coefficient_shift
    x0, x1 = x_bounds[0] - sx, x_bounds[1] - sx
    y0, y1 = y_bounds[0] - sy, y_bounds[1] - sy
    for (el_lo, el_hi), (az_lo, az_hi) in support.rectangles:
        r0 = sin(radians(el_lo))
        r1 = sin(radians(el_hi))
        for a, b in _azimuth_pieces(az_lo, az_hi):
            if _sector_meets_box(r0, r1, a, b, x0, x1, y0, y1):
                return True
    return False


def _angle_in(a: float, b: float, deg: float) -> bool:
    return (
        a - _ANG_EPS <= deg <= b + _ANG_EPS
        or a - _ANG_EPS <= deg + 360.0 <= b + _ANG_EPS
        or a - _ANG_EPS <= deg - 360.0 <= b + _ANG_EPS
    )


def _sector_meets_box(
    r0: float, r1: float, a: float, b: float, x0: float, x1: float, y0: float, y1: float
) -> bool:
    """Does the annular sector {r in [r0,r1], angle in [a,b] deg} meet the box?

    A nonempty intersection implies one of: a box corner inside the sector, a
    sector feature point (radial corner or arc/axis crossing) inside the box,
    or a boundary crossing (arc vs. box edge, radial edge vs. box).  All four
    families are tested exactly, with a small inclusive tolerance.
    """

    def in_box(px: float, py: float) -> bool:
        return x0 - _EPS <= px <= x1 + _EPS and y0 - _EPS <= py <= y1 + _EPS

    def in_sector(px: float, py: float) -> bool:
        r = hypot(px, py)
        if r < r0 - _EPS or r > r1 + _EPS:
            return False
        if r <= _EPS:
            return r0 <= _EPS
        return _angle_in(a, b, degrees(atan2(py, px)) % 360.0)

    # 1. box corners inside the sector
    for px in (x0, x1):
        for py in (y0, y1):
            if in_sector(px, py):
                return True

    # 2. sector feature points inside the box
    for ang in (a, b):
        ca, sa = cos(radians(ang)), sin(radians(ang))
        if in_box(r0 * ca, r0 * sa) or in_box(r1 * ca, r1 * sa):
            return True
    for axis_ang, ux, uy in _AXES:
        if _angle_in(a, b, axis_ang):
            if in_box(r0 * ux, r0 * uy) or in_box(r1 * ux, r1 * uy):
                return True

    # 3. arcs crossing box edges
    for r in (r0, r1):
        if r <= _EPS:
            continue
        for xc in (x0, x1):
            d2 = r * r - xc * xc
            if d2 >= -_EPS:
                s = sqrt(max(d2, 0.0))
                for yv in (s, -s):
                    if y0 - _EPS <= yv <= y1 + _EPS and _angle_in(
                        a, b, degrees(atan2(yv, xc)) % 360.0
                    ):
                        return True
        for yc in (y0, y1):
            d2 = r * r - yc * yc
            if d2 >= -_EPS:
                s = sqrt(max(d2, 0.0))
                for xv in (s, -s):
                    if x0 - _EPS <= xv <= x1 + _EPS and _angle_in(
                        a, b, degrees(atan2(yc, xv)) % 360.0
                    ):
                        return True

    # 4. radial edges crossing the box
    for ang in (a, b):
        ca, sa = cos(radians(ang)), sin(radians(ang))
        if _segment_meets_box(r0 * ca, r0 * sa, r1 * ca, r1 * sa, x0, x1, y0, y1):
            return True
    return False


def _segment_meets_box(
    px: float, py: float, qx: float, qy: float, x0: float, x1: float, y0: float, y1: float
) -> bool:
    """Liang-Barsky clip: does the closed segment meet the closed box?"""
    dx = qx - px
    dy = qy - py
    t0, t1 = 0.0, 1.0
    for d, lo, hi, p in ((dx, x0, x1, px), (dy, y0, y1, py)):
        if abs(d) < 1e-300:
            if p < lo - _EPS or p > hi + _EPS:
                return False
            continue
        ta = (lo - _EPS - p) / d
        tb = (hi + _EPS - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


def support_bounding_box(support: AngularSupport) -> tuple[float, float, float, float]:
    """Exact (xmin, xmax, ymin, ymax) of the support in coefficient space.

    Sector extremes are attained at radial corner points or where an arc
    crosses a coordinate axis, so collecting those feature points is exact.
    Empty supports return an inverted (unsatisfiable) box.
    """
    xs: list[float] = []
    ys: list[float] = []
    for (el_lo, el_hi), (az_lo, az_hi) in support.rectangles:
        r0 = sin(radians(el_lo))
        r1 = sin(radians(el_hi))
        for a, b in _azimuth_pieces(az_lo, az_hi):
            for ang in (a, b):
                ca, sa = cos(radians(ang)), sin(radians(ang))
                for r in (r0, r1):
                    xs.append(r * ca)
                    ys.append(r * sa)
            for axis_ang, ux, uy in _AXES:
                if _angle_in(a, b, axis_ang):
                    for r in (r0, r1):
                        xs.append(r * ux)
                        ys.append(r * uy)
    if not xs:
        return (float("inf"), float("-inf"), float("inf"), float("-inf"))
    sx, sy = support.coefficient_shift
    return (min(xs) + sx, max(xs) + sx, min(ys) + sy, max(ys) + sy)


def support_boundary_polyline(
    rectangle: tuple[tuple[float, float], tuple[float, float]],
    points_per_edge: int = 32,
) -> list[tuple[float, float]]:
    """Closed polyline tracing one support rectangle in coefficient space.

    Walks the rectangle boundary in (elevation, azimuth) and maps each sample
    through the coefficient parametrization; used for plotting/dump output.
    """
    (el_lo, el_hi), (az_lo, az_hi) = rectangle
    corners = [(el_lo, az_lo), (el_lo, az_hi), (el_hi, az_hi), (el_hi, az_lo), (el_lo, az_lo)]
    points: list[tuple[float, float]] = []
    for (e0, a0), (e1, a1) in zip(corners[:-1], corners[1:]):
        for i in range(points_per_edge):
            t = i / points_per_edge
            pair = AngleCoefficientPair.from_angles(e0 + t * (e1 - e0), a0 + t * (a1 - a0))
            points.append((pair.gamma_x, pair.gamma_y))
    points.append(points[0])
    return points
