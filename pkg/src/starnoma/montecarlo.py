"""Monte Carlo estimates of the near/far ergodic rates.

Each drop places one near user (inner disk) and one far user (outer ring),
draws their composite gains and records

    near:  log2(1 + gamma_near) if gamma_sic >= gamma_th else 0
    far:   log2(1 + gamma_far)

Samples are produced in fixed chunks of 2**16, each seeded from
``SeedSequence(master_seed, spawn_key=(chunk,))``; chunk statistics are
merged in chunk order, so results do not depend on the number of workers.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import GammaFit, cascaded_amplitude, gamma_gain_sample, sample_nakagami
from .errors import ConfigError, DomainError
from .scenario import ScenarioKind, SystemConfig, sinr_triplet

CHUNK_SIZE = 2**16
MIN_SAMPLES = 10_000
THREADS_ENV = "STARNOMA_THREADS"


class Model(str, enum.Enum):
    GAMMA_FIT = "GAMMA_FIT"
    PHYSICAL_IID = "PHYSICAL_IID"


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    std_error: float
    n_samples: int
    model: Model
    sic_success_rate: float = 1.0

    @property
    def value(self) -> float:
        return self.mean


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"expected an integer thread count, got {raw!r}", THREADS_ENV) from None
    return min(8, os.cpu_count() or 1)


def chunk_rng(master_seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(chunk,))))


def sample_positions(cfg: SystemConfig, rng: np.random.Generator, size=None):
    """Distances of the near and far users from the cell center (inverse-CDF sampling).

    Near users have density 2x/R1^2 on [0, R1]; far users 2x/(R2^2 - R1^2) on [R1, R2].
    """
    g = cfg.geometry
    u = rng.random((2,) if size is None else (2, size))
    d_near = g.R1 * np.sqrt(u[0])
    d_far = np.sqrt(g.R1**2 + u[1] * (g.R2**2 - g.R1**2))
    return d_near, d_far


def _chunk_samples(cfg, fit, model, rhos, seed, chunk, n):
    """Per-sample (near, far, sic_ok) arrays for one chunk, one row per rho."""
    rng = chunk_rng(seed, chunk)
    g = cfg.geometry
    d_near, d_far = sample_positions(cfg, rng, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, (2, n))
    off_near = g.horizontal_offset(d_near, phi[0])
    off_far = g.horizontal_offset(d_far, phi[1])

    if model is Model.GAMMA_FIT:
        gain_near = gamma_gain_sample(fit, rng, n)
        gain_far = gamma_gain_sample(fit, rng, n)
    else:
        beta_near, beta_far = cfg.user_betas
        # both users see the same BS-to-surface channel
        bs_link = sample_nakagami(cfg.fading, rng, (n, cfg.n_elements))
        gain_near = beta_near * cascaded_amplitude(cfg.n_elements, cfg.fading, rng, n, bs_link) ** 2
        gain_far = beta_far * cascaded_amplitude(cfg.n_elements, cfg.fading, rng, n, bs_link) ** 2

    th = cfg.noma.gamma_th_sic
    out = []
    for snr_db in rhos:
        c = cfg.with_snr_db(snr_db)
        g_sic, g_near, g_far = sinr_triplet(gain_near, gain_far, off_near, off_far, c)
        ok = g_sic >= th
        near = np.where(ok, np.log2(1.0 + g_near), 0.0)
        far = np.log2(1.0 + g_far)
        out.append((_moments(near), _moments(far), int(np.count_nonzero(ok))))
    return out


def _moments(x):
    mean = float(np.mean(x))
    return x.size, mean, float(np.sum((x - mean) ** 2))


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta**2 * na * nb / n


def _to_estimate(moments, model, sic_ok=None):
    n, mean, m2 = moments
    se = math.sqrt(m2 / (n - 1) / n)
    return RateEstimate(max(mean, 0.0), se, n, model, 1.0 if sic_ok is None else sic_ok / n)


def _check_request(cfg, model, n_samples):
    model = Model(model)
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    if model is Model.GAMMA_FIT and cfg.scenario_kind is ScenarioKind.CONVENTIONAL_RIS:
        raise ConfigError("the gamma-fitted model describes the STAR composite gain; "
                          "use PHYSICAL_IID for the conventional surface", "scenario_kind")
    return model


def estimate_sweep(cfg: SystemConfig, fit: GammaFit, model, n_samples: int,
                   master_seed: int, snr_db, workers: int | None = None):
    """Estimate both users' rates at each transmit SNR (dB) from one shared set of drops.

    Returns a list of ``(near, far)`` :class:`RateEstimate` pairs, one per SNR.
    """
    model = _check_request(cfg, model, n_samples)
    snr_db = [float(s) for s in np.atleast_1d(snr_db)]
    chunks = [(i, min(CHUNK_SIZE, n_samples - i * CHUNK_SIZE))
              for i in range(math.ceil(n_samples / CHUNK_SIZE))]
    workers = default_workers() if workers is None else max(1, int(workers))

    def run(item):
        return _chunk_samples(cfg, fit, model, snr_db, master_seed, *item)

    if workers == 1:
        results = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))

    out = []
    for p in range(len(snr_db)):
        near, far, ok = results[0][p]
        for res in results[1:]:
            n2, f2, ok2 = res[p]
            near, far, ok = _merge(near, n2), _merge(far, f2), ok + ok2
        out.append((_to_estimate(near, model, ok), _to_estimate(far, model)))
    return out


def estimate_rates(cfg: SystemConfig, fit: GammaFit, model, n_samples: int,
                   master_seed: int, workers: int | None = None):
    """Estimate (near, far) ergodic rates at the configured transmit power."""
    return estimate_sweep(cfg, fit, model, n_samples, master_seed,
                          [cfg.power.snr_db], workers)[0]


@dataclass(frozen=True)
class ComparisonRow:
    snr_db: float
    user: str
    star: RateEstimate
    ris: RateEstimate

    @property
    def difference(self) -> float:
        return self.star.mean - self.ris.mean

    @property
    def joint_std_error(self) -> float:
        return math.hypot(self.star.std_error, self.ris.std_error)


def compare_star_vs_ris(cfg_star: SystemConfig, cfg_ris: SystemConfig, fit: GammaFit,
                        n_samples: int, seed: int, snr_db, workers: int | None = None):
    """Paired PHYSICAL_IID sweep of a STAR system against a conventional reflect-only surface.

    Both systems reuse the same seed, so drops are paired where their random
    draws line up.
    """
    if cfg_ris.scenario_kind is not ScenarioKind.CONVENTIONAL_RIS:
        raise ConfigError("the baseline must be a CONVENTIONAL_RIS scenario", "scenario_kind")
    star = estimate_sweep(cfg_star, fit, Model.PHYSICAL_IID, n_samples, seed, snr_db, workers)
    ris = estimate_sweep(cfg_ris, fit, Model.PHYSICAL_IID, n_samples, seed, snr_db, workers)
    rows = []
    for s, (sn, sf), (rn, rf) in zip(np.atleast_1d(snr_db), star, ris):
        rows.append(ComparisonRow(float(s), "near", sn, rn))
        rows.append(ComparisonRow(float(s), "far", sf, rf))
    return rows
