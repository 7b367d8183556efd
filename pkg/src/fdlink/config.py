"""Simulation configuration: per-node geometry, cluster sets, powers, and run controls.

``default_config()`` is the reference scenario used throughout: two 16x16-URA
full-duplex nodes, one intended and one self-interference cluster per link
direction, 30 dBm transmit power, 60 dB antenna isolation, 10 MHz of -174
dBm/Hz noise, four streams each way, and 2000 Monte Carlo realizations.
Configs serialize to/from JSON with field names matching the dataclasses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from typing import Any

from .channel import ClusterSpec, DuplexPlacement
from .arrays import UraGeometry
from .metrics import NoiseModel

__all__ = [
    "ARCHITECTURES",
    "NodeConfig",
    "SimConfig",
    "default_config",
    "config_to_dict",
    "config_from_dict",
    "save_config",
    "load_config",
]

ARCHITECTURES = ("abjhpc_smmse", "abjhpc_svd", "abhpc_hd", "fdpc_hd", "fdpc_fd")


@dataclass(frozen=True)
class NodeConfig:
    """One full-duplex node: arrays, its outgoing/incoming cluster sets, streams, placement.

    ``intended_departure_clusters`` describe the link this node transmits;
    ``intended_arrival_clusters`` the link it receives.  The two
    self-interference lists describe its own transmit-to-receive leakage and
    are paired positionally.
    """

    tx_geometry: UraGeometry
    rx_geometry: UraGeometry
    intended_departure_clusters: tuple[ClusterSpec, ...]
    intended_arrival_clusters: tuple[ClusterSpec, ...]
    si_departure_clusters: tuple[ClusterSpec, ...]
    si_arrival_clusters: tuple[ClusterSpec, ...]
    stream_count: int
    placement: DuplexPlacement

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "intended_departure_clusters", tuple(self.intended_departure_clusters)
        )
        object.__setattr__(
            self, "intended_arrival_clusters", tuple(self.intended_arrival_clusters)
        )
        object.__setattr__(self, "si_departure_clusters", tuple(self.si_departure_clusters))
        object.__setattr__(self, "si_arrival_clusters", tuple(self.si_arrival_clusters))
        if self.stream_count < 1:
            raise ValueError("stream_count must be positive")


@dataclass(frozen=True)
class SimConfig:
    """Full experiment description; immutable so realizations can share it freely."""

    node1: NodeConfig
    node2: NodeConfig
    p_t_dbm: float = 30.0
    p_is_db: float = 60.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    architecture: str = "abjhpc_smmse"
    transfer_block: bool = False
    imperfect_angles: bool = False
    realizations: int = 2000
    master_seed: int = 12345
    si_synthetic_paths: int = 100
    si_tau_hat_m: float | None = None
    path_loss_exponent: float = 3.76
    literal_pair_rule: bool = False

    def __post_init__(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ValueError(
                f"architecture must be one of {ARCHITECTURES}, got {self.architecture!r}"
            )
        if self.realizations < 0:
            raise ValueError("realizations must be nonnegative")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.si_synthetic_paths < 1:
            raise ValueError("si_synthetic_paths must be positive")
        if self.p_is_db < 0.0:
            raise ValueError("p_is_db must be nonnegative")

    @property
    def combiner_method(self) -> str:
        """Baseband combiner implied by the architecture."""
        return "smmse" if self.architecture in ("abjhpc_smmse", "fdpc_fd") else "svd"

    @property
    def duplex(self) -> str:
        """'fd' when both nodes transmit simultaneously, else 'hd'."""
        return "hd" if self.architecture in ("abhpc_hd", "fdpc_hd") else "fd"

    @property
    def p_t_mw(self) -> float:
        return 10.0 ** (self.p_t_dbm / 10.0)

    def tau_hat_m_for(self, node: NodeConfig) -> float:
        """Distance guess used by the covariance surrogate: configured value or the
        mean midpoint of the node's self-interference distance ranges."""
        if self.si_tau_hat_m is not None:
            return self.si_tau_hat_m
        mids = [
            0.5 * (c.distance_range[0] + c.distance_range[1])
            for c in node.si_departure_clusters
        ]
        return sum(mids) / len(mids)


def _cluster(mean_el: float, mean_az: float, paths: int, dist: tuple[float, float]) -> ClusterSpec:
    return ClusterSpec(
        mean_elevation=mean_el,
        mean_azimuth=mean_az,
        spread_elevation=10.0,
        spread_azimuth=10.0,
        paths_per_cluster=paths,
        distance_range=dist,
    )


def default_config(**overrides: Any) -> SimConfig:
    """The reference two-node scenario; keyword overrides replace top-level fields."""
    geom = UraGeometry(16, 16, 0.5)
    intended_dist = (35.0, 50.0)
    si_dist = (5.0, 15.0)
    placement = DuplexPlacement(d1=2.0, d2=0.0, theta_rot=0.0)
    node1 = NodeConfig(
        tx_geometry=geom,
        rx_geometry=geom,
        intended_departure_clusters=(_cluster(40.0, 315.0, 20, intended_dist),),
        intended_arrival_clusters=(_cluster(40.0, 205.0, 20, intended_dist),),
        si_departure_clusters=(_cluster(40.0, 150.0, 20, si_dist),),
        si_arrival_clusters=(_cluster(40.0, 75.0, 20, si_dist),),
        stream_count=4,
        placement=placement,
    )
    node2 = NodeConfig(
        tx_geometry=geom,
        rx_geometry=geom,
        intended_departure_clusters=(_cluster(40.0, 355.0, 20, intended_dist),),
        intended_arrival_clusters=(_cluster(40.0, 245.0, 20, intended_dist),),
        si_departure_clusters=(_cluster(40.0, 150.0, 20, si_dist),),
        si_arrival_clusters=(_cluster(40.0, 75.0, 20, si_dist),),
        stream_count=4,
        placement=placement,
    )
    return SimConfig(node1=node1, node2=node2, **overrides)


def with_square_arrays(config: SimConfig, elements: int) -> SimConfig:
    """All four URAs replaced by square side x side arrays with ``elements`` antennas."""
    side = round(elements**0.5)
    if side * side != elements:
        raise ValueError(f"array size {elements} is not a perfect square")
    spacing = config.node1.tx_geometry.spacing_d
    geom = UraGeometry(side, side, spacing)
    node1 = replace(config.node1, tx_geometry=geom, rx_geometry=geom)
    node2 = replace(config.node2, tx_geometry=geom, rx_geometry=geom)
    return replace(config, node1=node1, node2=node2)


def with_stream_counts(config: SimConfig, streams: int) -> SimConfig:
    """Both nodes set to transmit ``streams`` data streams."""
    return replace(
        config,
        node1=replace(config.node1, stream_count=streams),
        node2=replace(config.node2, stream_count=streams),
    )


__all__ += ["with_square_arrays", "with_stream_counts"]


# ---------------------------------------------------------------------------
# JSON (de)serialization.  Dicts mirror the dataclass field names exactly.
# ---------------------------------------------------------------------------

def _geometry_to_dict(g: UraGeometry) -> dict[str, Any]:
    return {"mx": g.mx, "my": g.my, "spacing_d": g.spacing_d}


def _cluster_to_dict(c: ClusterSpec) -> dict[str, Any]:
    return {
        "mean_elevation": c.mean_elevation,
        "mean_azimuth": c.mean_azimuth,
        "spread_elevation": c.spread_elevation,
        "spread_azimuth": c.spread_azimuth,
        "paths_per_cluster": c.paths_per_cluster,
        "distance_range": list(c.distance_range),
    }


def _node_to_dict(n: NodeConfig) -> dict[str, Any]:
    return {
        "tx_geometry": _geometry_to_dict(n.tx_geometry),
        "rx_geometry": _geometry_to_dict(n.rx_geometry),
        "intended_departure_clusters": [_cluster_to_dict(c) for c in n.intended_departure_clusters],
        "intended_arrival_clusters": [_cluster_to_dict(c) for c in n.intended_arrival_clusters],
        "si_departure_clusters": [_cluster_to_dict(c) for c in n.si_departure_clusters],
        "si_arrival_clusters": [_cluster_to_dict(c) for c in n.si_arrival_clusters],
        "stream_count": n.stream_count,
        "placement": {
            "d1": n.placement.d1,
            "d2": n.placement.d2,
            "theta_rot": n.placement.theta_rot,
        },
    }


def config_to_dict(config: SimConfig) -> dict[str, Any]:
    """Plain-dict form of a config, suitable for JSON."""
    return {
        "node1": _node_to_dict(config.node1),
        "node2": _node_to_dict(config.node2),
        "p_t_dbm": config.p_t_dbm,
        "p_is_db": config.p_is_db,
        "noise": {
            "psd_dbm_per_hz": config.noise.psd_dbm_per_hz,
            "bandwidth_hz": config.noise.bandwidth_hz,
        },
        "architecture": config.architecture,
        "transfer_block": config.transfer_block,
        "imperfect_angles": config.imperfect_angles,
        "realizations": config.realizations,
        "master_seed": config.master_seed,
        "si_synthetic_paths": config.si_synthetic_paths,
        "si_tau_hat_m": config.si_tau_hat_m,
        "path_loss_exponent": config.path_loss_exponent,
        "literal_pair_rule": config.literal_pair_rule,
    }


def _build(cls: type, data: Any, where: str) -> Any:
    """Construct a dataclass from a dict, naming the offending field on error."""
    if not isinstance(data, dict):
        raise ValueError(f"field '{where}': expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"field '{where}': unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"field '{where}': {exc}") from exc


def _clusters_from(data: Any, where: str) -> tuple[ClusterSpec, ...]:
    if not isinstance(data, list):
        raise ValueError(f"field '{where}': expected a list")
    out = []
    for i, item in enumerate(data):
        if isinstance(item, dict) and "distance_range" in item:
            item = dict(item, distance_range=tuple(item["distance_range"]))
        out.append(_build(ClusterSpec, item, f"{where}[{i}]"))
    return tuple(out)


def _node_from_dict(data: Any, where: str) -> NodeConfig:
    if not isinstance(data, dict):
        raise ValueError(f"field '{where}': expected an object")
    required = {
        "tx_geometry",
        "rx_geometry",
        "intended_departure_clusters",
        "intended_arrival_clusters",
        "si_departure_clusters",
        "si_arrival_clusters",
        "stream_count",
        "placement",
    }
    missing = required - set(data)
    if missing:
        raise ValueError(f"field '{where}': missing keys {sorted(missing)}")
    unknown = set(data) - required
    if unknown:
        raise ValueError(f"field '{where}': unknown keys {sorted(unknown)}")
    return NodeConfig(
        tx_geometry=_build(UraGeometry, data["tx_geometry"], f"{where}.tx_geometry"),
        rx_geometry=_build(UraGeometry, data["rx_geometry"], f"{where}.rx_geometry"),
        intended_departure_clusters=_clusters_from(
            data["intended_departure_clusters"], f"{where}.intended_departure_clusters"
        ),
        intended_arrival_clusters=_clusters_from(
            data["intended_arrival_clusters"], f"{where}.intended_arrival_clusters"
        ),
        si_departure_clusters=_clusters_from(
            data["si_departure_clusters"], f"{where}.si_departure_clusters"
        ),
        si_arrival_clusters=_clusters_from(
            data["si_arrival_clusters"], f"{where}.si_arrival_clusters"
        ),
        stream_count=data["stream_count"],
        placement=_build(DuplexPlacement, data["placement"], f"{where}.placement"),
    )


def config_from_dict(data: dict[str, Any]) -> SimConfig:
    """Inverse of :func:`config_to_dict`, with field-level diagnostics."""
    if not isinstance(data, dict):
        raise ValueError("config root must be an object")
    top = {f.name for f in fields(SimConfig)}
    unknown = set(data) - top
    if unknown:
        raise ValueError(f"field '<root>': unknown keys {sorted(unknown)}")
    if "node1" not in data or "node2" not in data:
        raise ValueError("field '<root>': missing keys ['node1', 'node2']")
    kwargs: dict[str, Any] = {
        "node1": _node_from_dict(data["node1"], "node1"),
        "node2": _node_from_dict(data["node2"], "node2"),
    }
    for key, value in data.items():
        if key in ("node1", "node2"):
            continue
        kwargs[key] = _build(NoiseModel, value, "noise") if key == "noise" else value
    try:
        return SimConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"field '<root>': {exc}") from exc


def save_config(config: SimConfig, path: str) -> None:
    """Write a config as indented JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path: str) -> SimConfig:
    """Read a JSON config written by :func:`save_config` (or by hand)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)
