"""Monte Carlo engine: residual SI experiments and SINR term sampling.

Trials are partitioned into fixed-size blocks; block ``b`` of a run draws
all of its randomness from the Philox substream (seed, stream_id = b), so
results are bitwise reproducible no matter how many workers execute the
blocks.  Rank-deficient channel draws (vanishingly rare for Gaussian
matrices) are regenerated from a dedicated retry substream and counted.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numpy.random import Generator

from .beamforming import zf_decoder_batch, zf_precoder_batch
from .channel import RicianSpec, RngHandle, generate_batch
from .closedform import SystemGeometry, gamma_mimo
from .exceptions import InvalidParameterError
from .stats import GofReport, gamma_cdf, ks_distance

__all__ = [
    "Mode",
    "Direction",
    "ExperimentConfig",
    "SinrSample",
    "McReport",
    "run_si_empirical",
    "run_si_theoretical",
    "sinr_sample_downlink",
    "sinr_sample_uplink",
    "run_sinr",
]

BLOCK_SIZE = 1 << 14
# Retry substreams live far above any realistic block index.
_RETRY_BASE = 1 << 48

RAYLEIGH = RicianSpec(0.0, 1.0)


class Mode(enum.Enum):
    EMPIRICAL = "empirical"
    THEORETICAL = "theoretical"


class Direction(enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


@dataclass(frozen=True)
class ExperimentConfig:
    geom: SystemGeometry
    si_spec: RicianSpec
    trials: int
    seed: int
    noise_power: float = 1.0
    mode: Mode = Mode.EMPIRICAL
    direction: Direction = Direction.DOWNLINK

    def __post_init__(self):
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials!r}")
        if not (self.noise_power >= 0 and math.isfinite(self.noise_power)):
            raise InvalidParameterError(
                f"noise_power must be >= 0, got {self.noise_power}"
            )


@dataclass(frozen=True)
class SinrSample:
    """One radio's power-gain decomposition and assembled SINR."""

    useful: float
    mui: float
    ici: float
    cmi: float
    si: float
    noise: float
    sinr: float


@dataclass(frozen=True)
class McReport:
    samples: np.ndarray
    emp_m1: float
    emp_m2: float
    emp_var: float
    gof: GofReport
    config_echo: ExperimentConfig
    regenerated_trials: int = 0


def _blocks(trials: int):
    """(block_index, block_size) partition; fixed regardless of worker count."""
    full, rem = divmod(trials, BLOCK_SIZE)
    out = [(b, BLOCK_SIZE) for b in range(full)]
    if rem:
        out.append((full, rem))
    return out


def _map_blocks(fn, trials: int, threads: int):
    blocks = _blocks(trials)
    if threads <= 1 or len(blocks) == 1:
        return [fn(b, n) for b, n in blocks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda bn: fn(*bn), blocks))


def _si_gains_block(cfg: ExperimentConfig, block: int, n: int) -> tuple[np.ndarray, int]:
    """Uplink-side residual SI gains ||w_1^T H_si V||^2 for one block."""
    K, M, N = cfg.geom.K, cfg.geom.M, cfg.geom.N
    gen = RngHandle(cfg.seed, block).generator()
    H_si = generate_batch(n, N, M, cfg.si_spec, gen)
    H_down = generate_batch(n, K, M, RAYLEIGH, gen)
    H_up = generate_batch(n, N, K, RAYLEIGH, gen)

    regen = 0
    V, bad_v = zf_precoder_batch(H_down)
    W, bad_w = zf_decoder_batch(H_up)
    bad = bad_v | bad_w
    if np.any(bad):
        retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
        idx = np.flatnonzero(bad)
        while idx.size:
            regen += idx.size
            H_down[idx] = generate_batch(idx.size, K, M, RAYLEIGH, retry)
            H_up[idx] = generate_batch(idx.size, N, K, RAYLEIGH, retry)
            V[idx], bad_v = zf_precoder_batch(H_down[idx])
            W[idx], bad_w = zf_decoder_batch(H_up[idx])
            idx = idx[bad_v | bad_w]

    w1 = W[:, 0:1, :]  # decoder row for stream k = 1
    rows = w1 @ H_si @ V  # (n, 1, K)
    gains = np.sum(np.abs(rows) ** 2, axis=(1, 2))
    return gains, regen


def _report(cfg: ExperimentConfig, samples: np.ndarray, regenerated: int) -> McReport:
    gp = gamma_mimo(cfg.geom, cfg.si_spec)
    emp_m1 = float(samples.mean())
    emp_m2 = float(np.mean(samples**2))
    emp_var = emp_m2 - emp_m1**2
    gof = GofReport(
        ks_statistic=ks_distance(samples, lambda x: gamma_cdf(x, gp)),
        mean_rel_err=abs(emp_m1 - gp.mean) / gp.mean,
        var_rel_err=abs(emp_var - gp.variance) / gp.variance,
        sample_count=samples.size,
    )
    return McReport(
        samples=samples,
        emp_m1=emp_m1,
        emp_m2=emp_m2,
        emp_var=emp_var,
        gof=gof,
        config_echo=cfg,
        regenerated_trials=regenerated,
    )


def run_si_empirical(cfg: ExperimentConfig, threads: int = 1) -> McReport:
    """Residual SI gains from the full transmit/receive chain with ZF beamforming."""
    if cfg.mode is not Mode.EMPIRICAL:
        raise InvalidParameterError("config mode must be EMPIRICAL")
    parts = _map_blocks(lambda b, n: _si_gains_block(cfg, b, n), cfg.trials, threads)
    samples = np.concatenate([p[0] for p in parts])
    regenerated = sum(p[1] for p in parts)
    return _report(cfg, samples, regenerated)


def run_si_theoretical(cfg: ExperimentConfig, threads: int = 1) -> McReport:
    """Residual SI gains drawn directly from the moment-matched Gamma law."""
    if cfg.mode is not Mode.THEORETICAL:
        raise InvalidParameterError("config mode must be THEORETICAL")
    gp = gamma_mimo(cfg.geom, cfg.si_spec)

    def block(b, n):
        gen = RngHandle(cfg.seed, b).generator()
        return gen.gamma(gp.kappa, gp.theta, size=n)

    parts = _map_blocks(block, cfg.trials, threads)
    return _report(cfg, np.concatenate(parts), 0)


# ---------------------------------------------------------------------------
# SINR term sampling


def _sq(z: np.ndarray) -> np.ndarray:
    return np.abs(z) ** 2


def _regen_zf(gen_fn, zf_fn, mats, bf, bad, retry: Generator) -> int:
    regen = 0
    idx = np.flatnonzero(bad)
    while idx.size:
        regen += idx.size
        mats[idx] = gen_fn(retry, idx.size)
        bf[idx], still = zf_fn(mats[idx])
        idx = idx[still]
    return regen


def _sinr_block_downlink(cfg: ExperimentConfig, block: int, n: int) -> dict:
    L, K, M = cfg.geom.L, cfg.geom.K, cfg.geom.M
    gen = RngHandle(cfg.seed, block).generator()
    retry = None

    def own_draw(g, m):
        return generate_batch(m, K, M, RAYLEIGH, g)

    H_own = own_draw(gen, n)
    V_own, bad = zf_precoder_batch(H_own)
    regen = 0
    if np.any(bad):
        retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
        regen += _regen_zf(own_draw, zf_precoder_batch, H_own, V_own, bad, retry)

    G = H_own @ V_own  # (n, K, K); row k = gains of radio k
    g2 = _sq(G)
    useful = np.einsum("bkk->bk", g2).copy()
    mui = g2.sum(axis=2) - useful

    ici = np.zeros((n, K))
    for _ in range(L - 1):
        H_j = own_draw(gen, n)  # other cell's own downlink channel
        V_j, bad = zf_precoder_batch(H_j)
        if np.any(bad):
            if retry is None:
                retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
            regen += _regen_zf(own_draw, zf_precoder_batch, H_j, V_j, bad, retry)
        H_cross = generate_batch(n, K, M, RAYLEIGH, gen)  # rows: per-radio 1 x M
        ici += _sq(H_cross @ V_j).sum(axis=2)

    # Cross-mode: one Rayleigh scalar per FD radio in every cell except self.
    n_cmi = L * K - 1
    if n_cmi > 0:
        cmi = _sq(generate_batch(n, K, n_cmi, RAYLEIGH, gen)).sum(axis=2)
    else:
        cmi = np.zeros((n, K))

    si = _sq(generate_batch(n, K, 1, cfg.si_spec, gen))[:, :, 0]
    sigma = math.sqrt(cfg.noise_power) if cfg.noise_power > 0 else 0.0
    if sigma > 0:
        noise = _sq(generate_batch(n, K, 1, RicianSpec(0.0, sigma), gen))[:, :, 0]
    else:
        noise = np.zeros((n, K))

    sinr = useful / (mui + ici + cmi + si + noise)
    return dict(
        useful=useful, mui=mui, ici=ici, cmi=cmi, si=si, noise=noise, sinr=sinr,
        regenerated=regen,
    )


def _sinr_block_uplink(cfg: ExperimentConfig, block: int, n: int) -> dict:
    L, K, M, N = cfg.geom.L, cfg.geom.K, cfg.geom.M, cfg.geom.N
    gen = RngHandle(cfg.seed, block).generator()
    retry = None
    regen = 0

    def up_draw(g, m):
        return generate_batch(m, N, K, RAYLEIGH, g)

    def down_draw(g, m):
        return generate_batch(m, K, M, RAYLEIGH, g)

    H_up = up_draw(gen, n)
    W, bad = zf_decoder_batch(H_up)
    if np.any(bad):
        retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
        regen += _regen_zf(up_draw, zf_decoder_batch, H_up, W, bad, retry)

    H_down = down_draw(gen, n)  # own cell's downlink channel, fixes V for the SI term
    V_own, bad = zf_precoder_batch(H_down)
    if np.any(bad):
        if retry is None:
            retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
        regen += _regen_zf(down_draw, zf_precoder_batch, H_down, V_own, bad, retry)

    H_si = generate_batch(n, N, M, cfg.si_spec, gen)

    G = W @ H_up  # (n, K, K)
    g2 = _sq(G)
    useful = np.einsum("bkk->bk", g2).copy()
    mui = g2.sum(axis=2) - useful

    # Inter-cell: uplink transmissions of FD radios in other cells; own-cell
    # radios already enter through the multi-user term.
    n_ici = K * (L - 1)
    if n_ici > 0:
        H_x = generate_batch(n, N, n_ici, RAYLEIGH, gen)
        ici = _sq(W @ H_x).sum(axis=2)
    else:
        ici = np.zeros((n, K))

    cmi = np.zeros((n, K))
    for _ in range(L - 1):
        H_j = down_draw(gen, n)
        V_j, bad = zf_precoder_batch(H_j)
        if np.any(bad):
            if retry is None:
                retry = RngHandle(cfg.seed, _RETRY_BASE + block).generator()
            regen += _regen_zf(down_draw, zf_precoder_batch, H_j, V_j, bad, retry)
        H_cross = generate_batch(n, N, M, RAYLEIGH, gen)
        cmi += _sq(W @ H_cross @ V_j).sum(axis=2)

    si = _sq(W @ H_si @ V_own).sum(axis=2)

    sigma = math.sqrt(cfg.noise_power) if cfg.noise_power > 0 else 0.0
    if sigma > 0:
        eta = generate_batch(n, N, 1, RicianSpec(0.0, sigma), gen)
        noise = _sq(W @ eta)[:, :, 0]
    else:
        noise = np.zeros((n, K))

    sinr = useful / (mui + ici + cmi + si + noise)
    return dict(
        useful=useful, mui=mui, ici=ici, cmi=cmi, si=si, noise=noise, sinr=sinr,
        regenerated=regen,
    )


_TERM_KEYS = ("useful", "mui", "ici", "cmi", "si", "noise", "sinr")


def run_sinr(cfg: ExperimentConfig, threads: int = 1) -> dict:
    """All SINR terms over cfg.trials; arrays of shape (trials, K) per term."""
    block_fn = (
        _sinr_block_downlink if cfg.direction is Direction.DOWNLINK else _sinr_block_uplink
    )
    parts = _map_blocks(lambda b, n: block_fn(cfg, b, n), cfg.trials, threads)
    out = {k: np.concatenate([p[k] for p in parts]) for k in _TERM_KEYS}
    out["regenerated"] = sum(p["regenerated"] for p in parts)
    return out


def _samples_from_block(block: dict) -> list[SinrSample]:
    return [
        SinrSample(
            useful=float(block["useful"][0, k]),
            mui=float(block["mui"][0, k]),
            ici=float(block["ici"][0, k]),
            cmi=float(block["cmi"][0, k]),
            si=float(block["si"][0, k]),
            noise=float(block["noise"][0, k]),
            sinr=float(block["sinr"][0, k]),
        )
        for k in range(block["useful"].shape[1])
    ]


def sinr_sample_downlink(cfg: ExperimentConfig, rng: RngHandle) -> list[SinrSample]:
    """One downlink trial: a SinrSample per served radio."""
    if cfg.direction is not Direction.DOWNLINK:
        raise InvalidParameterError("config direction must be DOWNLINK")
    one = replace(cfg, trials=1, seed=rng.seed)
    return _samples_from_block(_sinr_block_downlink(one, rng.stream_id, 1))


def sinr_sample_uplink(cfg: ExperimentConfig, rng: RngHandle) -> list[SinrSample]:
    """One uplink trial: a SinrSample per served radio."""
    if cfg.direction is not Direction.UPLINK:
        raise InvalidParameterError("config direction must be UPLINK")
    one = replace(cfg, trials=1, seed=rng.seed)
    return _samples_from_block(_sinr_block_uplink(one, rng.stream_id, 1))
