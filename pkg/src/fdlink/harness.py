"""Monte Carlo harness: seeded realizations, parameter sweeps, and long-format CSV output.

Every realization is a pure function of (config, index): the index is mixed
with the master seed into an independent random stream per random component
(two intended channels, two self-interference channels, angle-estimation
errors, two covariance-surrogate draws), so results are bit-identical whether
realizations run serially or across a process pool, and different
architectures see the same channel draws at the same index.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bbstage import (
    effective_channel,
    estimate_si_covariance,
    normalize_combiner_rows,
    smmse_combiner,
    svd_combiner,
    svd_precoder,
)
from .channel import (
    ChannelRealization,
    angular_support,
    composite_si_channel,
    far_field_si_channel,
    intended_channel,
    near_field_si_channel,
    sample_paths,
)
from .config import NodeConfig, SimConfig, with_square_arrays, with_stream_counts
from .metrics import (
    NodeDims,
    achievable_rate_fd,
    achievable_rate_hd,
    energy_efficiency,
    hardware_budget,
    interference_noise_covariance,
    per_stream_powers,
)
from .rfstage import (
    RfBeamformerPair,
    build_rf_beamformers,
    draw_coefficient_error,
    identity_rf_pair,
)
from .supports import AngularSupport
from .transfer import decompose_combiner, decompose_precoder

__all__ = [
    "SWEEP_PARAMETERS",
    "RealizationResult",
    "SweepRecord",
    "SweepResult",
    "realization_seed",
    "run_realization",
    "apply_sweep_value",
    "run_sweep",
    "count_failures",
    "write_csv",
    "read_csv",
    "CSV_HEADER",
]

SWEEP_PARAMETERS = ("p_t_dbm", "p_is_db", "array_size", "stream_count", "angle_error_on")

CSV_HEADER = ("scenario", "param", "value", "realization", "seed", "metric", "metric_value")


@dataclass(frozen=True)
class RealizationResult:
    """Metrics of one realization; ``error`` set (and metrics = {'failed': 1.0}) on failure."""

    index: int
    seed: int
    metrics: dict[str, float]
    error: str | None = None


@dataclass(frozen=True)
class SweepRecord:
    """One long-format output row."""

    scenario: str
    param: str
    value: float
    realization: int
    seed: int
    metric: str
    metric_value: float


@dataclass(frozen=True)
class SweepResult:
    """All records of one or more sweeps; aggregation happens downstream."""

    records: tuple[SweepRecord, ...]

    def merged_with(self, other: "SweepResult") -> "SweepResult":
        return SweepResult(self.records + other.records)


def realization_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit seed tag recorded for one (master_seed, index) pair."""
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, np.uint64)[0])


def _spawn_streams(master_seed: int, index: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence([master_seed, index]).spawn(7)
    return [np.random.default_rng(c) for c in children]


def _design_support(
    clusters, geom, rng: np.random.Generator, imperfect: bool
) -> tuple[AngularSupport, AngularSupport]:
    """(true, design) support pair; the design copy may carry an estimation offset."""
    true = angular_support(clusters)
    if not imperfect:
        return true, true
    dx, dy = draw_coefficient_error(geom, rng)
    return true, true.shifted(dx, dy)


def _suppression_metrics(
    out: dict[str, float],
    label: str,
    node_tag: str,
    channel: ChannelRealization,
    rf: RfBeamformerPair,
) -> None:
    mat = channel.matrix
    after_tx = mat @ rf.f_t
    after_rx = rf.f_r @ mat
    after_joint = rf.f_r @ after_tx
    out[f"{label}_fro2_raw_{node_tag}"] = float(np.linalg.norm(mat) ** 2)
    out[f"{label}_fro2_tx_{node_tag}"] = float(np.linalg.norm(after_tx) ** 2)
    out[f"{label}_fro2_rx_{node_tag}"] = float(np.linalg.norm(after_rx) ** 2)
    out[f"{label}_fro2_joint_{node_tag}"] = float(np.linalg.norm(after_joint) ** 2)


def run_realization(config: SimConfig, index: int) -> RealizationResult:
    """Execute the full pipeline once; selection/rank failures become tagged records."""
    seed = realization_seed(config.master_seed, index)
    r_h1, r_h2, r_si1, r_si2, r_perturb, r_w1, r_w2 = _spawn_streams(
        config.master_seed, index
    )
    n1, n2 = config.node1, config.node2
    eta = config.path_loss_exponent
    fd = config.duplex == "fd"
    noise_mw = config.noise.noise_var_mw
    p_t_mw = config.p_t_mw

    try:
        # Channel draws (independent streams, so skipping one never shifts another).
        paths_12 = sample_paths(
            n1.intended_departure_clusters, n2.intended_arrival_clusters, r_h1
        )
        paths_21 = sample_paths(
            n2.intended_departure_clusters, n1.intended_arrival_clusters, r_h2
        )
        h12 = intended_channel(n1.tx_geometry, n2.rx_geometry, paths_12, eta)
        h21 = intended_channel(n2.tx_geometry, n1.rx_geometry, paths_21, eta)
        si1 = si2 = si1_near = si2_near = si1_far = si2_far = None
        if fd:
            si_paths_1 = sample_paths(
                n1.si_departure_clusters, n1.si_arrival_clusters, r_si1
            )
            si_paths_2 = sample_paths(
                n2.si_departure_clusters, n2.si_arrival_clusters, r_si2
            )
            si1_far = far_field_si_channel(n1.tx_geometry, n1.rx_geometry, si_paths_1, eta)
            si2_far = far_field_si_channel(n2.tx_geometry, n2.rx_geometry, si_paths_2, eta)
            si1_near = near_field_si_channel(
                n1.tx_geometry, n1.rx_geometry, n1.placement, config.p_is_db
            )
            si2_near = near_field_si_channel(
                n2.tx_geometry, n2.rx_geometry, n2.placement, config.p_is_db
            )
            si1 = composite_si_channel(si1_near, si1_far)
            si2 = composite_si_channel(si2_near, si2_far)

        # Angular supports: the true ones drive the covariance surrogate, the design
        # copies (optionally offset by an estimation error) drive beam selection.
        imperfect = config.imperfect_angles
        aod1_true, aod1 = _design_support(
            n1.intended_departure_clusters, n1.tx_geometry, r_perturb, imperfect
        )
        aoa1_true, aoa1 = _design_support(
            n1.intended_arrival_clusters, n1.rx_geometry, r_perturb, imperfect
        )
        si_aod1_true, si_aod1 = _design_support(
            n1.si_departure_clusters, n1.tx_geometry, r_perturb, imperfect
        )
        si_aoa1_true, si_aoa1 = _design_support(
            n1.si_arrival_clusters, n1.rx_geometry, r_perturb, imperfect
        )
        aod2_true, aod2 = _design_support(
            n2.intended_departure_clusters, n2.tx_geometry, r_perturb, imperfect
        )
        aoa2_true, aoa2 = _design_support(
            n2.intended_arrival_clusters, n2.rx_geometry, r_perturb, imperfect
        )
        si_aod2_true, si_aod2 = _design_support(
            n2.si_departure_clusters, n2.tx_geometry, r_perturb, imperfect
        )
        si_aoa2_true, si_aoa2 = _design_support(
            n2.si_arrival_clusters, n2.rx_geometry, r_perturb, imperfect
        )

        # RF stage.
        arch = config.architecture
        if arch in ("fdpc_hd", "fdpc_fd"):
            rf1 = identity_rf_pair(n1.tx_geometry, n1.rx_geometry)
            rf2 = identity_rf_pair(n2.tx_geometry, n2.rx_geometry)
        else:
            rule = "literal" if config.literal_pair_rule else "strict"
            empty = AngularSupport(())
            if arch == "abhpc_hd":
                si_aod1 = si_aoa1 = si_aod2 = si_aoa2 = empty
            rf1 = build_rf_beamformers(
                n1.tx_geometry, n1.rx_geometry, aod1, aoa1, si_aod1, si_aoa1, rule
            )
            rf2 = build_rf_beamformers(
                n2.tx_geometry, n2.rx_geometry, aod2, aoa2, si_aod2, si_aoa2, rule
            )

        # Effective channels and stream clamping.
        eff_12 = effective_channel(rf2.f_r, h12.matrix, rf1.f_t)
        eff_21 = effective_channel(rf1.f_r, h21.matrix, rf2.f_t)
        s_12 = min(n1.stream_count, rf1.n_t, rf2.n_r)  # link 1 -> 2, decoded at node 2
        s_21 = min(n2.stream_count, rf2.n_t, rf1.n_r)  # link 2 -> 1, decoded at node 1

        # Baseband precoders (at the transmitting node of each link).
        pre_12 = svd_precoder(eff_12, p_t_mw, noise_mw, s_12)
        pre_21 = svd_precoder(eff_21, p_t_mw, noise_mw, s_21)
        b_t1, b_t2 = pre_12.b_t, pre_21.b_t
        if config.transfer_block:
            b_t1 = decompose_precoder(b_t1, p_t_mw).reconstruct()
            b_t2 = decompose_precoder(b_t2, p_t_mw).reconstruct()

        # Baseband combiners (at the receiving node of each link).
        if config.combiner_method == "smmse":
            w1 = estimate_si_covariance(
                n1.tx_geometry,
                n1.rx_geometry,
                rf1.f_t,
                rf1.f_r,
                b_t1,
                si_aod1_true,
                si_aoa1_true,
                config.si_synthetic_paths,
                config.tau_hat_m_for(n1),
                eta,
                r_w1,
            )
            w2 = estimate_si_covariance(
                n2.tx_geometry,
                n2.rx_geometry,
                rf2.f_t,
                rf2.f_r,
                b_t2,
                si_aod2_true,
                si_aoa2_true,
                config.si_synthetic_paths,
                config.tau_hat_m_for(n2),
                eta,
                r_w2,
            )
            comb_at_2 = smmse_combiner(eff_12, b_t1, w2.w_hat, noise_mw)
            comb_at_1 = smmse_combiner(eff_21, b_t2, w1.w_hat, noise_mw)
        else:
            comb_at_2 = svd_combiner(eff_12, s_12)
            comb_at_1 = svd_combiner(eff_21, s_21)
        if config.transfer_block:
            comb_at_2 = replace(comb_at_2, b_r=decompose_combiner(comb_at_2.b_r).reconstruct())
            comb_at_1 = replace(comb_at_1, b_r=decompose_combiner(comb_at_1.b_r).reconstruct())
        comb_at_2 = normalize_combiner_rows(comb_at_2)
        comb_at_1 = normalize_combiner_rows(comb_at_1)

        # Rates and per-stream powers.
        eff_si_1 = effective_channel(rf1.f_r, si1.matrix, rf1.f_t) if fd else None
        eff_si_2 = effective_channel(rf2.f_r, si2.matrix, rf2.f_t) if fd else None
        c_at_2 = interference_noise_covariance(
            comb_at_2.b_r, eff_si_2, b_t2 if fd else None, rf2.f_r, noise_mw
        )
        c_at_1 = interference_noise_covariance(
            comb_at_1.b_r, eff_si_1, b_t1 if fd else None, rf1.f_r, noise_mw
        )
        rate_at_2 = achievable_rate_fd(eff_12, b_t1, comb_at_2.b_r, c_at_2)
        rate_at_1 = achievable_rate_fd(eff_21, b_t2, comb_at_1.b_r, c_at_1)
        rate_total = (
            rate_at_1 + rate_at_2 if fd else achievable_rate_hd(rate_at_1, rate_at_2)
        )
        streams_at_2 = per_stream_powers(
            eff_12, eff_si_2, b_t1, b_t2 if fd else None, comb_at_2.b_r, noise_mw
        )
        streams_at_1 = per_stream_powers(
            eff_21, eff_si_1, b_t2, b_t1 if fd else None, comb_at_1.b_r, noise_mw
        )

        # Hardware/energy accounting.
        dims = (
            NodeDims(n1.tx_geometry.m, n1.rx_geometry.m, rf1.n_t, rf1.n_r, s_12),
            NodeDims(n2.tx_geometry.m, n2.rx_geometry.m, rf2.n_t, rf2.n_r, s_21),
        )
        p_t_w = p_t_mw / 1000.0
        metrics: dict[str, float] = {}
        metrics["n_t_node1"] = float(rf1.n_t)
        metrics["n_r_node1"] = float(rf1.n_r)
        metrics["n_t_node2"] = float(rf2.n_t)
        metrics["n_r_node2"] = float(rf2.n_r)
        metrics["s_eff_node1"] = float(s_21)
        metrics["s_eff_node2"] = float(s_12)
        metrics["rate_node1_bpshz"] = rate_at_1
        metrics["rate_node2_bpshz"] = rate_at_2
        metrics["rate_total_bpshz"] = rate_total
        if arch.startswith("fdpc"):
            budget = hardware_budget("fdpc", dims)
            metrics["ee_bpshz_per_w"] = energy_efficiency(rate_total, p_t_w, budget)
        else:
            plain = hardware_budget("abjhpc_plain", dims)
            xfer = hardware_budget("abjhpc_transfer", dims)
            ee_plain = energy_efficiency(rate_total, p_t_w, plain)
            ee_xfer = energy_efficiency(rate_total, p_t_w, xfer)
            metrics["ee_bpshz_per_w"] = ee_xfer if config.transfer_block else ee_plain
            metrics["ee_plain_bpshz_per_w"] = ee_plain
            metrics["ee_transfer_bpshz_per_w"] = ee_xfer

        for node_tag, streams, link_channel, streams_count in (
            ("node1", streams_at_1, h21, s_21),
            ("node2", streams_at_2, h12, s_12),
        ):
            metrics[f"noise_mw_{node_tag}"] = float(noise_mw)
            for k, sp in enumerate(streams, start=1):
                metrics[f"intended_mw_{node_tag}_s{k}"] = sp.intended_mw
                metrics[f"isi_mw_{node_tag}_s{k}"] = sp.isi_mw
                metrics[f"si_mw_{node_tag}_s{k}"] = sp.si_mw
            raw = float(np.linalg.norm(link_channel.matrix) ** 2)
            metrics[f"intended_before_total_mw_{node_tag}"] = p_t_mw * raw
            metrics[f"intended_before_perstream_mw_{node_tag}"] = (
                p_t_mw / streams_count
            ) * raw

        for node_tag, link_channel, rf_rx, rf_tx in (
            ("node1", h21, rf1, rf2),
            ("node2", h12, rf2, rf1),
        ):
            mat = link_channel.matrix
            joint = rf_rx.f_r @ mat @ rf_tx.f_t
            metrics[f"intended_fro2_raw_{node_tag}"] = float(np.linalg.norm(mat) ** 2)
            metrics[f"intended_fro2_joint_{node_tag}"] = float(np.linalg.norm(joint) ** 2)

        if fd:
            for node_tag, composite, near, far, rf in (
                ("node1", si1, si1_near, si1_far, rf1),
                ("node2", si2, si2_near, si2_far, rf2),
            ):
                metrics[f"si_before_mw_{node_tag}"] = p_t_mw * float(
                    np.linalg.norm(composite.matrix) ** 2
                )
                _suppression_metrics(metrics, "si", node_tag, composite, rf)
                _suppression_metrics(metrics, "si_near", node_tag, near, rf)
                _suppression_metrics(metrics, "si_far", node_tag, far, rf)

        return RealizationResult(index, seed, metrics)
    except ValueError as exc:
        return RealizationResult(index, seed, {"failed": 1.0}, error=str(exc))


def apply_sweep_value(config: SimConfig, param: str, value: float) -> SimConfig:
    """A copy of the config with one sweep parameter applied."""
    if param == "p_t_dbm":
        return replace(config, p_t_dbm=float(value))
    if param == "p_is_db":
        return replace(config, p_is_db=float(value))
    if param == "array_size":
        return with_square_arrays(config, int(value))
    if param == "stream_count":
        return with_stream_counts(config, int(value))
    if param == "angle_error_on":
        return replace(config, imperfect_angles=bool(value))
    raise ValueError(f"unknown sweep parameter {param!r}")


def _run_job(job: tuple[SimConfig, int]) -> RealizationResult:
    return run_realization(job[0], job[1])


def run_sweep(
    config: SimConfig,
    param: str,
    values,
    realizations: int | None = None,
    workers: int | None = None,
    scenario: str = "default",
) -> SweepResult:
    """Cross product of sweep values and realization indices, serial or pooled.

    Record order (and content) is identical for any worker count; ``values``
    are taken in the given order and realizations count up from zero.
    """
    if param not in SWEEP_PARAMETERS:
        raise ValueError(
            f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMETERS}"
        )
    count = config.realizations if realizations is None else realizations
    values = list(values)
    jobs = [(apply_sweep_value(config, param, v), idx) for v in values for idx in range(count)]
    if workers is not None and workers > 1 and jobs:
        chunk = max(1, len(jobs) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=chunk))
    else:
        results = [_run_job(job) for job in jobs]
    records: list[SweepRecord] = []
    pos = 0
    for v in values:
        for idx in range(count):
            res = results[pos]
            pos += 1
            for name, metric_value in res.metrics.items():
                records.append(
                    SweepRecord(scenario, param, float(v), idx, res.seed, name, float(metric_value))
                )
    return SweepResult(tuple(records))


def count_failures(result: SweepResult) -> dict[tuple[str, str, float], int]:
    """Failed realizations per (scenario, param, value) sweep point."""
    out: dict[tuple[str, str, float], int] = {}
    for rec in result.records:
        if rec.metric == "failed":
            key = (rec.scenario, rec.param, rec.value)
            out[key] = out.get(key, 0) + 1
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(result: SweepResult, path: str) -> None:
    """Write records sorted (stably) by (scenario, param, value, realization)."""
    ordered = sorted(
        result.records, key=lambda r: (r.scenario, r.param, r.value, r.realization)
    )
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for rec in ordered:
                writer.writerow(
                    [
                        rec.scenario,
                        rec.param,
                        _fmt(rec.value),
                        rec.realization,
                        rec.seed,
                        rec.metric,
                        _fmt(rec.metric_value),
                    ]
                )
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def read_csv(path: str) -> SweepResult:
    """Parse a file written by :func:`write_csv` back into records."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(CSV_HEADER):
                raise ValueError(f"unexpected CSV header in {path}: {header}")
            records = tuple(
                SweepRecord(
                    row[0], row[1], float(row[2]), int(row[3]), int(row[4]), row[5], float(row[6])
                )
                for row in reader
            )
    except OSError as exc:
        raise OSError(f"failed to read CSV from {path}: {exc}") from exc
    return SweepResult(records)
