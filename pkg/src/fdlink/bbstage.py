"""Baseband stage: SVD precoding with water-filled power loading and two combiner designs.

The precoder points the configured number of streams along the dominant right
singular directions of the effective channel and loads power by water-filling.
The combiner is either the matching SVD combiner (left singular rows) or an
MMSE solution that only knows the self-interference statistically, through a
covariance surrogate built from synthetic paths drawn inside the
self-interference angular supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .arrays import AngleCoefficientPair, UraGeometry, phase_response_matrix
from .supports import AngularSupport

__all__ = [
    "BbPrecoder",
    "BbCombiner",
    "SiCovarianceEstimate",
    "effective_channel",
    "waterfill",
    "svd_precoder",
    "svd_combiner",
    "estimate_si_covariance",
    "smmse_combiner",
    "smmse_objective",
    "normalize_combiner_rows",
]


@dataclass(frozen=True, eq=False)
class BbPrecoder:
    """Baseband precoder (Nt x S) and its per-stream power allocation (sums to the budget)."""

    b_t: np.ndarray
    allocation: np.ndarray


@dataclass(frozen=True, eq=False)
class BbCombiner:
    """Baseband combiner (S x Nr) tagged with the design that produced it."""

    b_r: np.ndarray
    method: str  # {svd, smmse}


@dataclass(frozen=True, eq=False)
class SiCovarianceEstimate:
    """Statistical self-interference covariance surrogate (Nr x Nr, Hermitian PSD)."""

    w_hat: np.ndarray
    synthetic_path_count: int
    tau_hat_m: float


def effective_channel(f_r: np.ndarray, h: np.ndarray, f_t: np.ndarray) -> np.ndarray:
    """Reduced-size channel seen by the baseband stage: f_r @ h @ f_t."""
    if f_r.shape[1] != h.shape[0] or h.shape[1] != f_t.shape[0]:
        raise ValueError(
            f"dimension mismatch: cannot chain {f_r.shape} @ {h.shape} @ {f_t.shape}"
        )
    return f_r @ h @ f_t


def waterfill(singular_values: np.ndarray, p_t: float, noise_var: float) -> np.ndarray:
    """Water-filling power allocation over parallel subchannels.

    Returns ``P_n = max(mu - noise_var / (p_t * s_n**2), 0)`` with the water
    level ``mu`` bisected until the allocation sums to ``p_t`` within relative
    1e-12.  Zero singular values receive zero power.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("singular_values must be a nonempty 1-D array")
    if np.any(np.diff(s) > 1e-12):
        raise ValueError("singular values must be nonincreasing")
    if p_t <= 0.0 or noise_var <= 0.0:
        raise ValueError("p_t and noise_var must be positive")
    if not np.any(s > 0.0):
        raise ValueError("all singular values are zero")
    floors = np.full(s.shape, np.inf)
    active = s > 0.0
    floors[active] = noise_var / (p_t * s[active] ** 2)
    lo = float(floors.min())
    hi = lo + p_t
    mu = hi
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        total = float(np.maximum(mu - floors, 0.0).sum())
        if abs(total - p_t) <= 1e-12 * p_t:
            break
        if total > p_t:
            hi = mu
        else:
            lo = mu
    return np.maximum(mu - floors, 0.0)


def _canonical_svd(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with a deterministic phase convention.

    Each right singular vector is rotated so its largest-magnitude entry is
    real positive, and the paired left singular vector is co-rotated, keeping
    the product unchanged.  Returns (u, s, v) with ``mat = u @ diag(s) @ vᴴ``.
    """
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    v = vh.conj().T.copy()
    u = u.copy()
    for k in range(v.shape[1]):
        idx = int(np.argmax(np.abs(v[:, k])))
        entry = v[idx, k]
        mag = abs(entry)
        if mag > 0.0:
            rot = np.conj(entry) / mag
            v[:, k] *= rot
            u[:, k] *= rot
    return u, s, v


def _require_rank(s: np.ndarray, stream_count: int) -> None:
    if stream_count < 1:
        raise ValueError("stream count must be positive")
    tol = 1e-12 * (s[0] if s.size else 0.0)
    if int(np.count_nonzero(s > tol)) < stream_count:
        raise ValueError("effective channel rank below stream count")


def svd_precoder(
    eff_channel: np.ndarray, p_t: float, noise_var: float, s: int
) -> BbPrecoder:
    """Dominant right singular directions scaled by the square-rooted water-fill powers."""
    _, sv, v = _canonical_svd(np.asarray(eff_channel))
    _require_rank(sv, s)
    allocation = waterfill(sv[:s], p_t, noise_var)
    b_t = v[:, :s] * np.sqrt(allocation)[np.newaxis, :]
    return BbPrecoder(b_t, allocation)


def svd_combiner(eff_channel: np.ndarray, s: int) -> BbCombiner:
    """Conjugate-transposed dominant left singular vectors as combiner rows."""
    u, sv, _ = _canonical_svd(np.asarray(eff_channel))
    _require_rank(sv, s)
    return BbCombiner(u[:, :s].conj().T, "svd")


def _draw_support_pairs(
    support: AngularSupport, count: int, rng: np.random.Generator
) -> tuple[AngleCoefficientPair, ...]:
    """Uniform angle draws inside a support, area-weighted across its rectangles."""
    rects = support.rectangles
    spans = np.array(
        [(el[1] - el[0], az[1] - az[0]) for el, az in rects], dtype=float
    )
    if len(rects) > 1:
        areas = spans[:, 0] * spans[:, 1]
        total = float(areas.sum())
        weights = areas / total if total > 0.0 else np.full(len(rects), 1.0 / len(rects))
        idx = rng.choice(len(rects), size=count, p=weights)
    else:
        idx = np.zeros(count, dtype=int)
    el_lo = np.array([el[0] for el, _ in rects])[idx]
    az_lo = np.array([az[0] for _, az in rects])[idx]
    el = el_lo + rng.random(count) * spans[idx, 0]
    az = az_lo + rng.random(count) * spans[idx, 1]
    sx, sy = support.coefficient_shift
    pairs = []
    for e, a in zip(el, az):
        p = AngleCoefficientPair.from_angles(float(e), float(a))
        if sx != 0.0 or sy != 0.0:
            p = AngleCoefficientPair(
                float(np.clip(p.gamma_x + sx, -1.0, 1.0)),
                float(np.clip(p.gamma_y + sy, -1.0, 1.0)),
            )
        pairs.append(p)
    return tuple(pairs)


def estimate_si_covariance(
    tx_geom: UraGeometry,
    rx_geom: UraGeometry,
    f_t: np.ndarray,
    f_r: np.ndarray,
    b_t: np.ndarray,
    si_aod: AngularSupport,
    si_aoa: AngularSupport,
    synthetic_path_count: int,
    tau_hat_m: float,
    eta: float,
    rng: np.random.Generator,
) -> SiCovarianceEstimate:
    """Self-interference covariance surrogate from angular statistics only.

    Synthetic departure/arrival pairs are drawn uniformly inside the
    self-interference supports (departures first), assembled into phase
    response matrices, and combined with the node's own beamformers and
    precoder:

        w_hat = (f_r Φ_r Φ_t f_t b_t)(...)ᴴ / (tau_hat**(2 eta) * count)

    Hermitian positive semidefinite by construction.
    """
    if si_aod.is_empty or si_aoa.is_empty:
        raise ValueError("self-interference supports must be nonempty")
    if synthetic_path_count < 1:
        raise ValueError("synthetic_path_count must be positive")
    if tau_hat_m <= 0.0:
        raise ValueError("tau_hat_m must be positive")
    departures = _draw_support_pairs(si_aod, synthetic_path_count, rng)
    arrivals = _draw_support_pairs(si_aoa, synthetic_path_count, rng)
    phi_t = phase_response_matrix(tx_geom, departures, "transmit")  # L x Mt
    phi_r = phase_response_matrix(rx_geom, arrivals, "receive")  # Mr x L
    g = f_r @ phi_r @ phi_t @ f_t @ b_t
    w_hat = (g @ g.conj().T) / (tau_hat_m ** (2.0 * eta) * synthetic_path_count)
    w_hat = 0.5 * (w_hat + w_hat.conj().T)
    return SiCovarianceEstimate(w_hat, synthetic_path_count, tau_hat_m)


def smmse_combiner(
    eff_channel: np.ndarray, b_t: np.ndarray, w_hat: np.ndarray, noise_var: float
) -> BbCombiner:
    """MMSE combiner against the intended stream mix plus the covariance surrogate.

    Closed form ``b_r = b_tᴴ ℋᴴ (ℋ b_t b_tᴴ ℋᴴ + w_hat + noise_var I)⁻¹``,
    the unique stationary point of the surrogate mean-square error.
    """
    hb = eff_channel @ b_t
    n_r = eff_channel.shape[0]
    a = hb @ hb.conj().T + w_hat + noise_var * np.eye(n_r)
    a = 0.5 * (a + a.conj().T)
    try:
        factor = cho_factor(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular inner matrix in combiner design") from exc
    b_r = cho_solve(factor, hb).conj().T
    return BbCombiner(b_r, "smmse")


def smmse_objective(
    b_r: np.ndarray, eff_channel: np.ndarray, b_t: np.ndarray, w_hat: np.ndarray, noise_var: float
) -> float:
    """Surrogate mean-square error a combiner attains: the quantity smmse_combiner minimizes.

    Equals ``||b_r ℋ b_t - I||_F² + tr(b_r (w_hat + noise_var I) b_rᴴ)``.
    """
    hb = eff_channel @ b_t
    s = b_t.shape[1]
    mismatch = b_r @ hb - np.eye(s)
    noise_like = w_hat + noise_var * np.eye(eff_channel.shape[0])
    return float(
        np.linalg.norm(mismatch) ** 2 + np.real(np.trace(b_r @ noise_like @ b_r.conj().T))
    )


def normalize_combiner_rows(combiner: BbCombiner) -> BbCombiner:
    """The same combiner with each row scaled to unit 2-norm."""
    norms = np.linalg.norm(combiner.b_r, axis=1)
    if np.any(norms < 1e-150):
        raise ValueError("cannot normalize a zero combiner row")
    return BbCombiner(combiner.b_r / norms[:, np.newaxis], combiner.method)
