"""Channel construction: clustered far-field draws and the deterministic near-field coupling.

Far-field channels (the intended link and the reflective self-interference
component) follow a clustered geometry model: per path, a complex Gaussian
gain, a uniform distance whose ``tau**-eta`` power enters as an amplitude
factor (distances in meters, the factor treated as dimensionless), and
uniform departure/arrival angles inside the cluster rectangles.  The
near-field self-interference component is a deterministic spherical-wave
coupling between the co-located transmit and receive arrays, normalized to an
exact isolation level.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arrays import AngleCoefficientPair, UraGeometry, phase_response_matrix
from .supports import AngularSupport

__all__ = [
    "DEFAULT_PATH_LOSS_EXPONENT",
    "ClusterSpec",
    "PathSet",
    "DuplexPlacement",
    "ChannelRealization",
    "sample_paths",
    "intended_channel",
    "near_field_si_channel",
    "far_field_si_channel",
    "composite_si_channel",
    "angular_support",
]

DEFAULT_PATH_LOSS_EXPONENT = 3.76


@dataclass(frozen=True)
class ClusterSpec:
    """One scattering cluster: angle means/spreads in degrees, path count, distances in meters."""

    mean_elevation: float
    mean_azimuth: float
    spread_elevation: float
    spread_azimuth: float
    paths_per_cluster: int
    distance_range: tuple[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "distance_range", tuple(float(x) for x in self.distance_range))
        if self.spread_elevation < 0.0 or self.spread_azimuth < 0.0:
            raise ValueError("angle spreads must be nonnegative")
        if not (
            0.0 <= self.mean_elevation - self.spread_elevation
            and self.mean_elevation + self.spread_elevation <= 90.0
        ):
            raise ValueError("elevation interval mean +/- spread must stay within [0, 90] degrees")
        if self.paths_per_cluster < 1:
            raise ValueError("paths_per_cluster must be positive")
        if len(self.distance_range) != 2 or not 0.0 < self.distance_range[0] <= self.distance_range[1]:
            raise ValueError("distance_range must satisfy 0 < min <= max")


@dataclass(frozen=True, eq=False)
class PathSet:
    """One far-field draw: complex gains, distances (m), and endpoint directions per path."""

    gains: np.ndarray
    distances_m: np.ndarray
    departures: tuple[AngleCoefficientPair, ...]
    arrivals: tuple[AngleCoefficientPair, ...]

    @property
    def path_count(self) -> int:
        return len(self.departures)


@dataclass(frozen=True)
class DuplexPlacement:
    """Relative placement of a node's transmit and receive URAs.

    ``d1`` separates the arrays along the transmit x-axis, ``d2`` along the
    normal axis (both in wavelengths); ``theta_rot`` rotates the receive array
    in degrees.
    """

    d1: float
    d2: float
    theta_rot: float = 0.0

    def __post_init__(self) -> None:
        if self.d1 < 0.0 or self.d2 < 0.0:
            raise ValueError("array separations must be nonnegative")


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """A channel matrix with its provenance tag; far-field kinds keep their path draw."""

    matrix: np.ndarray
    paths: PathSet | None
    kind: str  # {intended, si_near_field, si_far_field, si_composite}


def sample_paths(
    departure_clusters: Sequence[ClusterSpec],
    arrival_clusters: Sequence[ClusterSpec],
    rng: np.random.Generator,
) -> PathSet:
    """Draw one far-field path realization.

    Clusters are paired positionally: the c-th departure and c-th arrival
    cluster describe the two ends of the same scatterer group, so they must
    agree on path count and distance range.  Angles are uniform in
    [mean - spread, mean + spread], distances uniform in the range, and gains
    i.i.d. complex Gaussian with per-path variance 1/L_total.
    """
    if len(departure_clusters) == 0 or len(departure_clusters) != len(arrival_clusters):
        raise ValueError("departure and arrival cluster lists must be nonempty and equal-length")
    for dep, arr in zip(departure_clusters, arrival_clusters):
        if dep.paths_per_cluster != arr.paths_per_cluster:
            raise ValueError("paired clusters must agree on paths_per_cluster")
        if dep.distance_range != arr.distance_range:
            raise ValueError("paired clusters must agree on distance_range")
    total = sum(c.paths_per_cluster for c in departure_clusters)
    sigma = np.sqrt(1.0 / (2.0 * total))
    gains = []
    distances = []
    departures: list[AngleCoefficientPair] = []
    arrivals: list[AngleCoefficientPair] = []
    for dep, arr in zip(departure_clusters, arrival_clusters):
        count = dep.paths_per_cluster
        z = rng.standard_normal((count, 2))
        gains.append((z[:, 0] + 1j * z[:, 1]) * sigma)
        distances.append(rng.uniform(dep.distance_range[0], dep.distance_range[1], count))
        departures.extend(_draw_cluster_pairs(dep, count, rng))
        arrivals.extend(_draw_cluster_pairs(arr, count, rng))
    return PathSet(
        np.concatenate(gains), np.concatenate(distances), tuple(departures), tuple(arrivals)
    )


def _draw_cluster_pairs(
    cluster: ClusterSpec, count: int, rng: np.random.Generator
) -> list[AngleCoefficientPair]:
    el = rng.uniform(
        cluster.mean_elevation - cluster.spread_elevation,
        cluster.mean_elevation + cluster.spread_elevation,
        count,
    )
    az = rng.uniform(
        cluster.mean_azimuth - cluster.spread_azimuth,
        cluster.mean_azimuth + cluster.spread_azimuth,
        count,
    )
    return [AngleCoefficientPair.from_angles(e, a) for e, a in zip(el, az)]


def _far_field_matrix(
    tx: UraGeometry, rx: UraGeometry, paths: PathSet, eta: float
) -> np.ndarray:
    phi_r = phase_response_matrix(rx, paths.arrivals, "receive")  # Mr x L
    phi_t = phase_response_matrix(tx, paths.departures, "transmit")  # L x Mt
    coeff = paths.gains * paths.distances_m ** (-eta)
    return (phi_r * coeff[np.newaxis, :]) @ phi_t


def intended_channel(
    tx: UraGeometry,
    rx: UraGeometry,
    paths: PathSet,
    eta: float = DEFAULT_PATH_LOSS_EXPONENT,
) -> ChannelRealization:
    """Far-field intended channel: Phi_r diag(tau^-eta g) Phi_t."""
    if paths.path_count == 0:
        raise ValueError("no paths")
    return ChannelRealization(_far_field_matrix(tx, rx, paths, eta), paths, "intended")


def far_field_si_channel(
    tx: UraGeometry,
    rx: UraGeometry,
    paths: PathSet,
    eta: float = DEFAULT_PATH_LOSS_EXPONENT,
) -> ChannelRealization:
    """Reflective (far-field) self-interference channel; same construction as the intended one."""
    if paths.path_count == 0:
        raise ValueError("no paths")
    return ChannelRealization(_far_field_matrix(tx, rx, paths, eta), paths, "si_far_field")


@lru_cache(maxsize=16)
def _near_field_raw(
    tx: UraGeometry, rx: UraGeometry, placement: DuplexPlacement
) -> tuple[np.ndarray, float]:
    """Unscaled spherical-wave coupling matrix and its Frobenius norm (cached; read-only)."""
    if tx.spacing_d != rx.spacing_d:
        raise ValueError("transmit and receive arrays must share one element spacing")
    d = tx.spacing_d
    theta = np.radians(placement.theta_rot)
    u = np.arange(rx.mx)[:, None, None, None]
    v = np.arange(rx.my)[None, :, None, None]
    m = np.arange(tx.mx)[None, None, :, None]
    n = np.arange(tx.my)[None, None, None, :]
    across = u * d * np.sin(theta) + placement.d2
    along = m * d + u * d * np.cos(theta) + placement.d1
    lateral = (n - v) * d
    delta = np.sqrt(across**2 + along**2 + lateral**2)
    if np.any(delta < 1e-12):
        raise ValueError("coincident antenna elements")
    raw = (np.exp(-2j * np.pi * delta) / delta).reshape(rx.m, tx.m)
    raw.flags.writeable = False
    return raw, float(np.linalg.norm(raw))


def near_field_si_channel(
    tx: UraGeometry,
    rx: UraGeometry,
    placement: DuplexPlacement,
    isolation_db: float,
) -> ChannelRealization:
    """Deterministic spherical-wave coupling between the co-located arrays.

    Element (u, v) <- (m, n) carries ``(kappa / delta) exp(-j 2 pi delta)``
    with ``delta`` the inter-element distance in wavelengths; ``kappa`` is
    chosen so the squared Frobenius norm equals ``10**(-isolation_db/10)``
    exactly.
    """
    if isolation_db < 0.0:
        raise ValueError("isolation_db must be nonnegative")
    raw, raw_norm = _near_field_raw(tx, rx, placement)
    scale = 10.0 ** (-isolation_db / 20.0) / raw_norm
    return ChannelRealization(raw * scale, None, "si_near_field")


def composite_si_channel(
    near: ChannelRealization, far: ChannelRealization
) -> ChannelRealization:
    """Elementwise sum of the near-field and far-field self-interference parts."""
    if near.matrix.shape != far.matrix.shape:
        raise ValueError("dimension mismatch between near-field and far-field channels")
    return ChannelRealization(near.matrix + far.matrix, far.paths, "si_composite")


def angular_support(clusters: Sequence[ClusterSpec]) -> AngularSupport:
    """One (elevation, azimuth) rectangle per cluster: means +/- spreads."""
    return AngularSupport(
        tuple(
            (
                (c.mean_elevation - c.spread_elevation, c.mean_elevation + c.spread_elevation),
                (c.mean_azimuth - c.spread_azimuth, c.mean_azimuth + c.spread_azimuth),
            )
            for c in clusters
        )
    )
