"""Nakagami-m fading, the co-phased composite surface channel and its gamma fit."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class FadingParams:
    """Nakagami-m shape ``m`` (>= 0.5) and spread ``omega`` (> 0)."""

    m: float = 2.0
    omega: float = 1.0

    def __post_init__(self):
        if not (self.m >= 0.5):
            raise ConfigError(f"Nakagami shape must be >= 0.5, got {self.m}", "fading.m")
        if not (self.omega > 0):
            raise ConfigError(f"Nakagami spread must be > 0, got {self.omega}", "fading.omega")


@dataclass(frozen=True)
class GammaFit:
    """Gamma(k, theta) law of the composite channel power gain.

    ``k_raw`` is the fitted (possibly fractional) shape; ``k_int`` is the
    nearest integer (at least 1), which the closed forms need.
    """

    k_raw: float
    theta: float

    def __post_init__(self):
        if not (self.k_raw > 0):
            raise ConfigError(f"gamma shape must be > 0, got {self.k_raw}", "gamma_override.k")
        if not (self.theta > 0):
            raise ConfigError(f"gamma scale must be > 0, got {self.theta}", "gamma_override.theta")

    @property
    def k_int(self) -> int:
        return max(1, int(round(self.k_raw)))

    @property
    def mean(self) -> float:
        return self.k_raw * self.theta


# (k, theta) tuples quoted for m = 2, omega = 1 at N = 30, 50, 70 elements
REFERENCE_FITS = {30: GammaFit(3, 14.0), 50: GammaFit(5, 23.4), 70: GammaFit(7, 32.8)}


def nakagami_mean_ratio(m: float) -> float:
    """(Gamma(m + 1/2) / Gamma(m))**2, evaluated in log space."""
    return math.exp(2.0 * (math.lgamma(m + 0.5) - math.lgamma(m)))


def fit_gamma_closed_form(fading: FadingParams, n_elements: int) -> GammaFit:
    """Closed-form gamma fit of the N-element composite gain.

    k     = G^2 / (4 (m Gamma(m)^2 - G^2)) * N,   G = Gamma(m + 1/2)
    theta = 4 omega N - (4 omega / m) (G / Gamma(m))^2 N
    """
    if int(n_elements) != n_elements or n_elements < 1:
        raise DomainError(f"number of elements must be a positive integer, got {n_elements}")
    m, omega = fading.m, fading.omega
    ratio = nakagami_mean_ratio(m)
    # denominator m Gamma(m)^2 - Gamma(m+1/2)^2 == Gamma(m)^2 (m - ratio)
    gap = m - ratio
    if gap <= 0:
        raise DomainError(f"degenerate gamma fit: m*Gamma(m)^2 <= Gamma(m+1/2)^2 at m={m}")
    k_raw = ratio / (4.0 * gap) * n_elements
    theta = 4.0 * omega * n_elements - (4.0 * omega / m) * ratio * n_elements
    return GammaFit(k_raw, theta)


def fit_gamma_moments(samples) -> GammaFit:
    """Method-of-moments gamma fit: k = mean^2 / var, theta = var / mean."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("need at least two samples")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite and nonnegative")
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1))
    if var <= 0 or mean <= 0:
        raise DomainError("samples have zero variance; gamma fit is undefined")
    return GammaFit(mean**2 / var, var / mean)


def sample_nakagami(fading: FadingParams, rng: np.random.Generator, size=None):
    """Nakagami-m amplitudes sqrt(G) with G ~ Gamma(m, omega / m)."""
    return np.sqrt(rng.gamma(fading.m, fading.omega / fading.m, size=size))


def cascaded_amplitude(n_elements: int, fading: FadingParams, rng: np.random.Generator,
                       size=None, bs_link=None):
    """Co-phased amplitude sum_n |a_n| |b_n| of an N-element cascade.

    ``bs_link`` optionally supplies the BS-to-surface amplitudes |b_n| (shape
    ``(*size, N)``) so two users can share them.
    """
    shape = (n_elements,) if size is None else (*np.atleast_1d(size), n_elements)
    if bs_link is None:
        bs_link = sample_nakagami(fading, rng, shape)
    user_link = sample_nakagami(fading, rng, shape)
    return np.sum(user_link * bs_link, axis=-1)


def composite_gain_sample(n_elements: int, beta: float, fading: FadingParams,
                          rng: np.random.Generator, size=None):
    """Composite power gain (sqrt(beta) * sum_n |a_n||b_n|)^2 under equal-phase alignment."""
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"energy-splitting coefficient must lie in [0, 1], got {beta}")
    if int(n_elements) != n_elements or n_elements < 1:
        raise DomainError(f"number of elements must be a positive integer, got {n_elements}")
    amp = cascaded_amplitude(int(n_elements), fading, rng, size)
    return beta * amp**2


def gamma_gain_sample(fit: GammaFit, rng: np.random.Generator, size=None):
    """Draw composite gains from Gamma(k_raw, theta)."""
    return rng.gamma(fit.k_raw, fit.theta, size=size)


def composite_gain_mean(n_elements: int, beta: float, fading: FadingParams) -> float:
    """Exact mean beta * (N E[|a|^2 |b|^2] + N (N-1) (E|a| E|b|)^2) of the composite gain."""
    mu1 = (fading.omega / fading.m) * nakagami_mean_ratio(fading.m)
    mu2 = fading.omega**2
    return beta * (n_elements * mu2 + n_elements * (n_elements - 1) * mu1**2)
