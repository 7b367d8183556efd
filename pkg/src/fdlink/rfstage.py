"""RF-stage design: grid-beam selection against angular supports and analog beamformer assembly.

The transmit (receive) RF beamformer keeps exactly the grid beams whose cells
meet the intended departure (arrival) support while staying clear of the
self-interference support, so the analog stage both captures the intended
link and nulls the leakage directions.  Entries are unit-modulus scaled by
1/sqrt(M): realizable with phase shifters only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arrays import (
    AngleCoefficientPair,
    GridCell,
    UraGeometry,
    quantized_angle_grid,
    steering_vector,
)
from .supports import AngularSupport, support_contains, support_intersects_box

__all__ = [
    "RfBeamformerPair",
    "select_grid_cells",
    "select_angle_pairs",
    "build_rf_beamformers",
    "identity_rf_pair",
    "draw_coefficient_error",
    "perturb_support_coefficients",
]

_LITERAL_SAMPLES = 33  # per-axis lattice density for the single-point selection rule


@dataclass(frozen=True, eq=False)
class RfBeamformerPair:
    """Analog beamformers of one node: transmit columns and receive rows.

    ``f_t`` is Mt x Nt with columns the transmit steering vectors of the
    selected pairs; ``f_r`` is Nr x Mr with rows the receive steering vectors.
    Both are tall-unitary (f_tᴴ f_t = I, f_r f_rᴴ = I) because distinct grid
    beams are orthogonal at half-wavelength spacing.
    """

    f_t: np.ndarray
    f_r: np.ndarray
    tx_pairs: tuple[AngleCoefficientPair, ...]
    rx_pairs: tuple[AngleCoefficientPair, ...]

    @property
    def n_t(self) -> int:
        return self.f_t.shape[1]

    @property
    def n_r(self) -> int:
        return self.f_r.shape[0]


def select_grid_cells(
    grid: tuple[GridCell, ...] | list[GridCell],
    cover: AngularSupport,
    exclude: AngularSupport,
    rule: str = "strict",
) -> list[GridCell]:
    """Grid cells kept for beamforming, in grid (row-major) order.

    Under the default ``strict`` rule a cell is kept iff it intersects
    ``cover`` and is wholly disjoint from ``exclude``; a beam whose cell
    merely grazes the leakage region would not null it.  The ``literal`` rule
    instead keeps a cell when some single point of it lies inside ``cover``
    and outside ``exclude`` (tested on a dense lattice), retained only for
    comparison.
    """
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    if rule not in ("strict", "literal"):
        raise ValueError(f"rule must be 'strict' or 'literal', got {rule!r}")
    kept = []
    for cell in grid:
        if rule == "strict":
            ok = support_intersects_box(
                cover, cell.x_bounds, cell.y_bounds
            ) and not support_intersects_box(exclude, cell.x_bounds, cell.y_bounds)
        else:
            ok = _literal_cell_ok(cover, exclude, cell)
        if ok:
            kept.append(cell)
    return kept


def _literal_cell_ok(cover: AngularSupport, exclude: AngularSupport, cell: GridCell) -> bool:
    x0, x1 = cell.x_bounds
    y0, y1 = cell.y_bounds
    n = _LITERAL_SAMPLES
    for i in range(n):
        x = x0 + (x1 - x0) * i / (n - 1)
        for j in range(n):
            y = y0 + (y1 - y0) * j / (n - 1)
            if abs(x) > 1.0 or abs(y) > 1.0:
                continue
            p = AngleCoefficientPair(x, y)
            if support_contains(cover, p) and not support_contains(exclude, p):
                return True
    return False


def select_angle_pairs(
    grid: tuple[GridCell, ...] | list[GridCell],
    cover: AngularSupport,
    exclude: AngularSupport,
    rule: str = "strict",
) -> tuple[AngleCoefficientPair, ...]:
    """Coefficient pairs of the selected grid beams; raises if none survive."""
    kept = select_grid_cells(grid, cover, exclude, rule)
    if not kept:
        raise ValueError("no feasible beams")
    return tuple(cell.pair for cell in kept)


@lru_cache(maxsize=64)
def _cached_grid(geom: UraGeometry) -> tuple[GridCell, ...]:
    return quantized_angle_grid(geom)


@lru_cache(maxsize=4096)
def _cached_pairs(
    geom: UraGeometry, cover: AngularSupport, exclude: AngularSupport, rule: str
) -> tuple[AngleCoefficientPair, ...]:
    return select_angle_pairs(_cached_grid(geom), cover, exclude, rule)


def build_rf_beamformers(
    tx_geom: UraGeometry,
    rx_geom: UraGeometry,
    intended_aod: AngularSupport,
    intended_aoa: AngularSupport,
    si_aod: AngularSupport,
    si_aoa: AngularSupport,
    rule: str = "strict",
) -> RfBeamformerPair:
    """Analog beamformer pair of one node from its four angular supports.

    Transmit beams cover the intended departure support and avoid the
    self-interference departure support; receive beams cover the intended
    arrival support and avoid the self-interference arrival support.  Pass
    empty exclusion supports for a half-duplex design with no leakage to
    dodge.
    """
    tx_pairs = _cached_pairs(tx_geom, intended_aod, si_aod, rule)
    rx_pairs = _cached_pairs(rx_geom, intended_aoa, si_aoa, rule)
    f_t = np.column_stack([steering_vector(tx_geom, p, "transmit") for p in tx_pairs])
    f_r = np.stack([steering_vector(rx_geom, p, "receive") for p in rx_pairs])
    return RfBeamformerPair(f_t, f_r, tx_pairs, rx_pairs)


def identity_rf_pair(tx_geom: UraGeometry, rx_geom: UraGeometry) -> RfBeamformerPair:
    """Pass-through RF stage (one RF chain per element), used by fully digital baselines."""
    return RfBeamformerPair(
        np.eye(tx_geom.m, dtype=complex), np.eye(rx_geom.m, dtype=complex), (), ()
    )


def draw_coefficient_error(geom: UraGeometry, rng: np.random.Generator) -> tuple[float, float]:
    """One estimation-error offset: per axis uniform within the first-null beamwidth.

    The x (y) component is uniform on [-1/mx, +1/mx] ([-1/my, +1/my]), drawn
    x first.
    """
    dx = rng.uniform(-1.0 / geom.mx, 1.0 / geom.mx)
    dy = rng.uniform(-1.0 / geom.my, 1.0 / geom.my)
    return float(dx), float(dy)


def perturb_support_coefficients(
    pair: AngleCoefficientPair, geom: UraGeometry, rng: np.random.Generator
) -> AngleCoefficientPair:
    """The pair displaced by one estimation-error draw, clamped to [-1, 1] per axis."""
    dx, dy = draw_coefficient_error(geom, rng)
    return AngleCoefficientPair(
        float(np.clip(pair.gamma_x + dx, -1.0, 1.0)),
        float(np.clip(pair.gamma_y + dy, -1.0, 1.0)),
    )
