"""Zero-forcing precoder/decoder construction and residual SI power gain.

ZF beamformers are the normalised columns (rows) of the Moore-Penrose
pseudo-inverse of the downlink (uplink) channel.  Any externally supplied
(V, W) pair with unit-norm columns/rows is accepted wherever beamformers
are consumed, so non-ZF linear designs can be plugged in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError, SingularChannelError

__all__ = ["BeamformerPair", "zf_precoder", "zf_decoder", "residual_si_gain"]

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class BeamformerPair:
    """Precoder V (M x K, unit-norm columns) and decoder W (K x N, unit-norm rows)."""

    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V)
        W = np.asarray(self.W)
        if V.ndim != 2 or W.ndim != 2 or V.shape[1] != W.shape[0]:
            raise InvalidParameterError("V must be M x K and W must be K x N")
        if not np.allclose(np.linalg.norm(V, axis=0), 1.0, atol=_NORM_TOL):
            raise InvalidParameterError("columns of V must have unit norm")
        if not np.allclose(np.linalg.norm(W, axis=1), 1.0, atol=_NORM_TOL):
            raise InvalidParameterError("rows of W must have unit norm")


def _check_rank(H: np.ndarray) -> None:
    s = np.linalg.svd(H, compute_uv=False)
    tol = max(H.shape) * np.finfo(float).eps * s[0]
    if s[-1] <= tol:
        raise SingularChannelError(
            f"channel matrix of shape {H.shape} is rank deficient "
            f"(smallest singular value {s[-1]:.3e} <= tol {tol:.3e})"
        )


def zf_precoder(H_down: np.ndarray) -> np.ndarray:
    """ZF precoder: columns of H^+ = H^H (H H^H)^-1, scaled to unit norm.

    ``H_down`` is the K x M combined downlink channel with K <= M; the
    result V is M x K and satisfies H_down @ V = diagonal with positive
    real entries.
    """
    H = np.asarray(H_down, dtype=complex)
    if H.ndim != 2:
        raise InvalidParameterError("H_down must be a 2-D matrix")
    K, M = H.shape
    if K > M:
        raise InvalidParameterError(f"need K <= M, got K={K}, M={M}")
    _check_rank(H)
    pinv = H.conj().T @ np.linalg.inv(H @ H.conj().T)
    return pinv / np.linalg.norm(pinv, axis=0, keepdims=True)


def zf_decoder(H_up: np.ndarray) -> np.ndarray:
    """ZF decoder: rows of H^+ = (H^H H)^-1 H^H, scaled to unit norm.

    ``H_up`` is the N x K combined uplink channel with K <= N; the result
    W is K x N and satisfies W @ H_up = diagonal with positive real entries.
    """
    H = np.asarray(H_up, dtype=complex)
    if H.ndim != 2:
        raise InvalidParameterError("H_up must be a 2-D matrix")
    N, K = H.shape
    if K > N:
        raise InvalidParameterError(f"need K <= N, got K={K}, N={N}")
    _check_rank(H)
    pinv = np.linalg.inv(H.conj().T @ H) @ H.conj().T
    return pinv / np.linalg.norm(pinv, axis=1, keepdims=True)


def residual_si_gain(w_row: np.ndarray, H_si: np.ndarray, V: np.ndarray) -> float:
    """Residual SI power gain ||w^T H V||^2 for one decoder row."""
    w = np.asarray(w_row, dtype=complex).reshape(-1)
    H = np.asarray(H_si, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if H.ndim != 2 or V.ndim != 2 or w.shape[0] != H.shape[0] or H.shape[1] != V.shape[0]:
        raise InvalidParameterError(
            f"incompatible shapes: w {w.shape}, H {H.shape}, V {V.shape}"
        )
    row = w @ H @ V
    return float(np.real(np.vdot(row, row)))


# ---------------------------------------------------------------------------
# Batched variants used by the Monte Carlo engine.  Rank deficiency is
# reported as a boolean mask instead of an exception so callers can
# regenerate the offending trials.

def _gram_bad(G: np.ndarray, dim_max: int) -> np.ndarray:
    ev = np.linalg.eigvalsh(G)
    tol = (dim_max * np.finfo(float).eps) ** 2 * ev[..., -1]
    return ev[..., 0] <= tol


def zf_precoder_batch(H_down: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched zf_precoder over shape (B, K, M); returns (V, bad_mask)."""
    H = np.asarray(H_down, dtype=complex)
    B, K, M = H.shape
    G = H @ H.conj().transpose(0, 2, 1)
    bad = _gram_bad(G, max(K, M))
    G[bad] = np.eye(K)
    pinv = np.linalg.solve(G, H).conj().transpose(0, 2, 1)
    return pinv / np.linalg.norm(pinv, axis=1, keepdims=True), bad


def zf_decoder_batch(H_up: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched zf_decoder over shape (B, N, K); returns (W, bad_mask)."""
    H = np.asarray(H_up, dtype=complex)
    B, N, K = H.shape
    Hh = H.conj().transpose(0, 2, 1)
    G = Hh @ H
    bad = _gram_bad(G, max(N, K))
    G[bad] = np.eye(K)
    pinv = np.linalg.solve(G, Hh)
    return pinv / np.linalg.norm(pinv, axis=2, keepdims=True), bad
