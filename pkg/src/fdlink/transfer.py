"""Transfer-block decomposition: trade RF chains for an extra phase-shifter layer.

A baseband matrix B factors exactly as T @ B_red (precoder side) or
B_red @ T (combiner side), where every entry of T is a sum of two unit
phase-shifter responses — modulus in [0, 2] — and B_red is a small square
matrix needing only one RF chain per stream.  The factorization is lossless,
so the achievable rate is untouched while the RF-chain count drops to the
stream count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TransferDecomposition", "decompose_precoder", "decompose_combiner"]


@dataclass(frozen=True, eq=False)
class TransferDecomposition:
    """Phase-shifter-pair matrix ``t`` and reduced baseband matrix ``b_red``.

    ``side`` records the reconstruction order: ``t @ b_red`` for a precoder,
    ``b_red @ t`` for a combiner.
    """

    t: np.ndarray
    b_red: np.ndarray
    side: str  # {precoder, combiner}

    def reconstruct(self) -> np.ndarray:
        """The original baseband matrix, rebuilt from the two factors."""
        if self.side == "precoder":
            return self.t @ self.b_red
        return self.b_red @ self.t


def _phase_pair_matrix(mat: np.ndarray) -> np.ndarray:
    """Entrywise e^{j angle(B)} (e^{j beta} + e^{-j beta}) with cos(beta) = |B| / max|B|.

    The sum of the two conjugate phasors collapses to 2 cos(beta) times the
    entry's phase, i.e. exactly (2 / max|B|) * B; zero entries get beta = 90
    degrees and vanish, consistent with the [0, 2] modulus budget.
    """
    peak = float(np.abs(mat).max(initial=0.0))
    if peak == 0.0:
        raise ValueError("cannot decompose an all-zero matrix")
    return (2.0 / peak) * mat


def _solve_gram(gram: np.ndarray, rhs: np.ndarray, t: np.ndarray, target: np.ndarray, side: str) -> np.ndarray:
    """Least-squares factor via the Hermitian Gram system, pinv fallback when singular.

    Precoder side solves ``gram @ x = rhs``; combiner side solves the mirrored
    ``x @ gram = rhs`` (via the Hermitian transpose of the same system).
    """
    gram = 0.5 * (gram + gram.conj().T)
    scale = max(1.0, float(np.linalg.norm(target)))
    try:
        if side == "precoder":
            sol = np.linalg.solve(gram, rhs)
        else:
            sol = np.linalg.solve(gram, rhs.conj().T).conj().T
    except np.linalg.LinAlgError:
        sol = None
    if sol is not None:
        rebuilt = t @ sol if side == "precoder" else sol @ t
        if np.linalg.norm(rebuilt - target) <= 1e-11 * scale:
            return sol
    if side == "precoder":
        return np.linalg.pinv(t) @ target
    return target @ np.linalg.pinv(t)


def decompose_precoder(b_t: np.ndarray, p_t: float) -> TransferDecomposition:
    """Exact factorization ``b_t = t @ b_red`` with ``|t| <= 2`` entrywise.

    ``p_t`` is the transmit power budget the input must respect; the factors
    inherit it because the product reproduces ``b_t`` exactly.
    """
    b_t = np.asarray(b_t)
    if float(np.real(np.trace(b_t @ b_t.conj().T))) > p_t * (1.0 + 1e-9) + 1e-12:
        raise ValueError("precoder exceeds the transmit power budget")
    t = _phase_pair_matrix(b_t)
    b_red = _solve_gram(t.conj().T @ t, t.conj().T @ b_t, t, b_t, "precoder")
    return TransferDecomposition(t, b_red, "precoder")


def decompose_combiner(b_r: np.ndarray) -> TransferDecomposition:
    """Exact factorization ``b_r = b_red @ t`` with ``|t| <= 2`` entrywise."""
    b_r = np.asarray(b_r)
    t = _phase_pair_matrix(b_r)
    b_red = _solve_gram(t @ t.conj().T, b_r @ t.conj().T, t, b_r, "combiner")
    return TransferDecomposition(t, b_red, "combiner")
