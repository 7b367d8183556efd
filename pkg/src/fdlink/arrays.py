"""Uniform rectangular arrays: phase responses, steering vectors, and the beam grid.

Conventions fixed here and used everywhere else:

* Elements sit on an ``mx`` x ``my`` lattice with pitch ``spacing_d`` in carrier
  wavelengths; the x-axis index is the slow (outer) index, so element ``(u, v)``
  (0-based) maps to flat index ``u * my + v``.
* A propagation direction is carried as the coefficient pair
  ``gamma_x = sin(el) cos(az)``, ``gamma_y = sin(el) sin(az)`` with elevation in
  [0, 90] degrees and azimuth modulo 360 degrees.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from math import cos, radians, sin

import numpy as np

__all__ = [
    "UraGeometry",
    "AngleCoefficientPair",
    "GridCell",
    "phase_response_vector",
    "steering_vector",
    "quantized_angle_grid",
    "phase_response_matrix",
]


@dataclass(frozen=True)
class UraGeometry:
    """An mx-by-my uniform rectangular array with element pitch in wavelengths."""

    mx: int
    my: int
    spacing_d: float = 0.5

    def __post_init__(self) -> None:
        if self.mx < 1 or self.my < 1:
            raise ValueError("array must have at least one element per axis")
        if not self.spacing_d > 0.0:
            raise ValueError("element spacing must be positive")

    @property
    def m(self) -> int:
        """Total element count."""
        return self.mx * self.my


@dataclass(frozen=True)
class AngleCoefficientPair:
    """Directional coefficients (sin(el)cos(az), sin(el)sin(az)), each in [-1, 1]."""

    gamma_x: float
    gamma_y: float

    def __post_init__(self) -> None:
        if not (-1.0 <= self.gamma_x <= 1.0) or not (-1.0 <= self.gamma_y <= 1.0):
            raise ValueError("angle coefficients must lie in [-1, 1]")

    @classmethod
    def from_angles(cls, elevation_deg: float, azimuth_deg: float) -> "AngleCoefficientPair":
        """Coefficient pair of an (elevation, azimuth) direction given in degrees."""
        el = radians(elevation_deg)
        az = radians(azimuth_deg)
        return cls(sin(el) * cos(az), sin(el) * sin(az))


def phase_response_vector(geom: UraGeometry, pair: AngleCoefficientPair) -> np.ndarray:
    """Unit-modulus array response toward one direction.

    Entry ``u * my + v`` equals ``exp(j 2 pi d (u gamma_x + v gamma_y))``; the
    x-axis index varies slowest, matching the flat element ordering.
    """
    step = 2.0 * np.pi * geom.spacing_d
    px = np.exp(1j * step * pair.gamma_x * np.arange(geom.mx))
    py = np.exp(1j * step * pair.gamma_y * np.arange(geom.my))
    return np.kron(px, py)


def steering_vector(geom: UraGeometry, pair: AngleCoefficientPair, side: str) -> np.ndarray:
    """Unit-norm steering vector; the receive side conjugates the phase response."""
    v = phase_response_vector(geom, pair) / np.sqrt(geom.m)
    if side == "transmit":
        return v
    if side == "receive":
        return np.conj(v)
    raise ValueError(f"side must be 'transmit' or 'receive', got {side!r}")


@dataclass(frozen=True)
class GridCell:
    """One beam of the orthogonal grid: coefficient pair, covered cell, 1-based grid indices."""

    pair: AngleCoefficientPair
    x_bounds: tuple[float, float]
    y_bounds: tuple[float, float]
    x_index: int
    y_index: int


def quantized_angle_grid(geom: UraGeometry) -> tuple[GridCell, ...]:
    """The mx*my orthogonal beam grid, row-major in (x, y) grid indices.

    Per axis the grid coordinates are ``lambda_k = -1 + (2k - 1)/m`` for
    ``k = 1..m`` and the cell of each pair spans ``[lambda - 1/m, lambda + 1/m]``.
    At half-wavelength spacing, steering vectors at distinct grid pairs are
    exactly orthogonal.
    """

    def axis(count: int) -> list[tuple[float, tuple[float, float]]]:
        half = 1.0 / count
        return [
            (lam, (lam - half, lam + half))
            for lam in (-1.0 + (2 * k - 1) / count for k in range(1, count + 1))
        ]

    cells = []
    for kx, (lam_x, x_bounds) in enumerate(axis(geom.mx), start=1):
        for ky, (lam_y, y_bounds) in enumerate(axis(geom.my), start=1):
            cells.append(GridCell(AngleCoefficientPair(lam_x, lam_y), x_bounds, y_bounds, kx, ky))
    return tuple(cells)


def phase_response_matrix(
    geom: UraGeometry, pairs: Sequence[AngleCoefficientPair], side: str
) -> np.ndarray:
    """Stacked phase responses for a sequence of directions.

    Transmit side: L x M with rows the conjugate-transposed phase vectors.
    Receive side: M x L with columns the plain phase vectors.
    """
    if len(pairs) == 0:
        raise ValueError("no paths")
    if side not in ("transmit", "receive"):
        raise ValueError(f"side must be 'transmit' or 'receive', got {side!r}")
    gx = np.array([p.gamma_x for p in pairs])
    gy = np.array([p.gamma_y for p in pairs])
    step = 2.0 * np.pi * geom.spacing_d
    px = np.exp(1j * step * np.outer(gx, np.arange(geom.mx)))
    py = np.exp(1j * step * np.outer(gy, np.arange(geom.my)))
    rows = (px[:, :, None] * py[:, None, :]).reshape(len(pairs), geom.m)
    if side == "transmit":
        return np.conj(rows)
    return rows.T.copy()
