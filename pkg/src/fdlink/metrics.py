"""Link metrics: per-stream power decomposition, achievable rates, hardware cost, energy efficiency.

All powers are carried in linear milliwatts; dB/dBm conversions happen only at
the I/O boundary.  Rates are log-det expressions evaluated through Hermitian
factorizations so the results are real by construction.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from math import log10

import numpy as np

__all__ = [
    "NoiseModel",
    "StreamPowers",
    "LinkMetrics",
    "NodeDims",
    "HardwareBudget",
    "per_stream_powers",
    "interference_noise_covariance",
    "achievable_rate_fd",
    "achievable_rate_hd",
    "hardware_budget",
    "energy_efficiency",
]


@dataclass(frozen=True)
class NoiseModel:
    """Thermal noise: power spectral density in dBm/Hz over a bandwidth in Hz."""

    psd_dbm_per_hz: float = -174.0
    bandwidth_hz: float = 1e7

    def __post_init__(self) -> None:
        if not self.bandwidth_hz > 0.0:
            raise ValueError("bandwidth must be positive")

    @property
    def noise_var_mw(self) -> float:
        """Noise power in linear milliwatts."""
        return 10.0 ** ((self.psd_dbm_per_hz + 10.0 * log10(self.bandwidth_hz)) / 10.0)


@dataclass(frozen=True)
class StreamPowers:
    """Power split of one combined stream, in milliwatts."""

    intended_mw: float
    isi_mw: float
    si_mw: float
    noise_mw: float


@dataclass(frozen=True)
class LinkMetrics:
    """Two-way link summary: per-stream powers per node and the rates."""

    streams_node1: tuple[StreamPowers, ...]
    streams_node2: tuple[StreamPowers, ...]
    rate_node1_bpshz: float
    rate_node2_bpshz: float
    rate_total_bpshz: float
    energy_efficiency_bpshz_per_w: float | None = None


@dataclass(frozen=True)
class NodeDims:
    """Array/beam/stream sizes of one node, for hardware accounting."""

    m_t: int
    m_r: int
    n_t: int
    n_r: int
    s: int


@dataclass(frozen=True)
class HardwareBudget:
    """RF-chain and phase-shifter counts with per-unit powers in watts."""

    n_rf: int
    n_ps: int
    p_rf_w: float = 0.250
    p_ps_w: float = 0.001

    def __post_init__(self) -> None:
        if self.n_rf < 0 or self.n_ps < 0:
            raise ValueError("hardware counts must be nonnegative")


def per_stream_powers(
    eff_intended: np.ndarray,
    eff_si: np.ndarray | None,
    b_t_local: np.ndarray,
    b_t_remote: np.ndarray | None,
    b_r: np.ndarray,
    noise_var: float,
) -> tuple[StreamPowers, ...]:
    """Decompose each combined stream into intended / inter-stream / self-interference / noise power.

    ``b_t_local`` is the precoder of the node transmitting the decoded data;
    ``b_t_remote`` is the receiving node's own precoder, whose transmission
    leaks back through ``eff_si``.  Pass ``eff_si = None`` (or ``b_t_remote =
    None``) for a half-duplex receiver.  Requires unit-norm combiner rows so
    the noise term is exactly ``noise_var``.
    """
    norms = np.linalg.norm(b_r, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("combiner rows must be unit-norm")
    g = b_r @ eff_intended @ b_t_local
    intended = np.abs(np.diagonal(g)) ** 2
    isi = np.sum(np.abs(g) ** 2, axis=1) - intended
    if eff_si is None or b_t_remote is None:
        si = np.zeros(g.shape[0])
    else:
        leak = b_r @ eff_si @ b_t_remote
        si = np.sum(np.abs(leak) ** 2, axis=1)
    return tuple(
        StreamPowers(float(p), float(max(q, 0.0)), float(r), float(noise_var))
        for p, q, r in zip(intended, isi, si)
    )


def interference_noise_covariance(
    b_r: np.ndarray,
    eff_si: np.ndarray | None,
    b_t_remote: np.ndarray | None,
    f_r: np.ndarray,
    noise_var: float,
) -> np.ndarray:
    """Covariance of combined self-interference plus modified noise (Hermitian PSD, S x S).

    ``C = b_r eff_si b_t b_tᴴ eff_siᴴ b_rᴴ + noise_var * b_r f_r f_rᴴ b_rᴴ``;
    the self-interference term is dropped when ``eff_si`` is None.
    """
    noise_part = noise_var * (b_r @ f_r) @ (b_r @ f_r).conj().T
    if eff_si is None or b_t_remote is None:
        c = noise_part
    else:
        leak = b_r @ eff_si @ b_t_remote
        c = leak @ leak.conj().T + noise_part
    return 0.5 * (c + c.conj().T)


def _logdet_hpd(a: np.ndarray, what: str) -> float:
    a = 0.5 * (a + a.conj().T)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular {what}") from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diagonal(chol)))))


def achievable_rate_fd(
    eff_intended: np.ndarray, b_t: np.ndarray, b_r: np.ndarray, c_tot: np.ndarray
) -> float:
    """Rate of one direction: log2 det(I + C⁻¹ · (b_r ℋ b_t)(b_r ℋ b_t)ᴴ) in bits/s/Hz.

    Evaluated as logdet(C + signal) - logdet(C) over Hermitian factorizations,
    so the value is real and nonnegative by construction.
    """
    g = b_r @ eff_intended @ b_t
    signal = g @ g.conj().T
    ln_det_sum = _logdet_hpd(c_tot + signal, "signal-plus-interference covariance")
    ln_det_c = _logdet_hpd(c_tot, "interference-plus-noise covariance")
    return max((ln_det_sum - ln_det_c) / np.log(2.0), 0.0)


def achievable_rate_hd(rate_node1: float, rate_node2: float) -> float:
    """Half-duplex total: each direction gets half the channel uses."""
    return 0.5 * (rate_node1 + rate_node2)


def hardware_budget(architecture: str, dims: Sequence[NodeDims]) -> HardwareBudget:
    """RF-chain and phase-shifter counts summed over nodes.

    ``fdpc``: one chain per antenna, no phase shifters.  ``abjhpc_plain``: one
    chain per selected beam, a full phase-shifter bank between chains and
    elements.  ``abjhpc_transfer``: chains cut to twice the per-node stream
    count, with the transfer block's extra phase-shifter layer (sized 2s per
    stream direction; the receive side serves the opposite node's streams, so
    this architecture requires exactly two nodes).
    """
    if len(dims) == 0:
        raise ValueError("dims must be nonempty")
    if architecture == "fdpc":
        return HardwareBudget(sum(d.m_t + d.m_r for d in dims), 0)
    if architecture == "abjhpc_plain":
        return HardwareBudget(
            sum(d.n_t + d.n_r for d in dims),
            sum(d.n_t * d.m_t + d.n_r * d.m_r for d in dims),
        )
    if architecture == "abjhpc_transfer":
        if len(dims) != 2:
            raise ValueError("transfer-block accounting requires exactly two nodes")
        n_ps = 0
        for here, other in (dims, dims[::-1]):
            n_ps += here.n_t * (here.m_t + 2 * here.s) + here.n_r * (here.m_r + 2 * other.s)
        return HardwareBudget(sum(2 * d.s for d in dims), n_ps)
    raise ValueError(f"unknown architecture {architecture!r}")


def energy_efficiency(rate_total: float, p_t_w: float, budget: HardwareBudget) -> float:
    """Rate per watt: rate / (2 p_t + n_rf p_rf + n_ps p_ps)."""
    if p_t_w < 0.0:
        raise ValueError("transmit power must be nonnegative")
    denom = 2.0 * p_t_w + budget.n_rf * budget.p_rf_w + budget.n_ps * budget.p_ps_w
    if denom <= 0.0:
        raise ValueError("total consumed power is zero")
    return rate_total / denom
