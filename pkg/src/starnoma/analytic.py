"""Closed-form ergodic rates, their high-SNR forms, and integration oracles.

The near user's rate is the Chebyshev-Gauss evaluation of four terms
(fixed-threshold part, exponential-integral part, and the two finite sums
that come from expanding the integer-order incomplete gamma); the far
user's rate is a single quadrature sum of incomplete-gamma differences.

The oracles integrate the raw rate integrals

    R_near = 1/ln2 int_0^R1 int_0^inf Q(k, max(x, Xi) Psi(y)) / (1 + x) dx f_near(y) dy
    R_far  = 1/ln2 int_0^{a_f/a_n} int_R1^R2 Q(k, Phi(x) (y^2 + H^2)^{alpha/2}) / (1 + x) f_far(y) dy dx

with the adaptive Gauss-Kronrod rule, so they share no algebra with the
closed forms.  SIC gating is per realization: the near user's rate counts
only when its own SINR for the far user's message clears the threshold,
which is the same event as gamma_near >= Xi.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import specfun
from .channel import GammaFit
from .errors import DomainError, SICInfeasibleError
from .quadrature import DEFAULT_ORDER, cg_nodes, integrate_adaptive
from .scenario import NomaConfig, SystemConfig

LN2 = math.log(2.0)
# multiples of the gamma shape bracketing where the gamma tail drops from ~1 to ~0
_TRANSITIONS = np.array([1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0])


class Method(str, enum.Enum):
    THEOREM = "THEOREM"
    HIGH_SNR = "HIGH_SNR"
    ORACLE_INTEGRAL = "ORACLE_INTEGRAL"


@dataclass(frozen=True)
class RateResult:
    value: float
    method: Method
    quadrature_order: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ArithmeticError(f"{self.method.value} rate is not finite: {self.value}")
        # high-SNR forms are approximations and may undershoot zero
        if self.method is not Method.HIGH_SNR and self.value < 0:
            raise ArithmeticError(f"{self.method.value} rate is negative: {self.value}")

    def __float__(self):
        return self.value


def xi(noma: NomaConfig) -> float:
    """Near-user SNR threshold equivalent to the SIC condition: a_n g_th / (a_f - g_th a_n)."""
    denom = noma.a_far - noma.gamma_th_sic * noma.a_near
    if denom <= 0:
        raise SICInfeasibleError(
            f"SIC threshold {noma.gamma_th_sic} is at or above the ceiling a_far/a_near = "
            f"{noma.ceiling:.6g}; the near user can never cancel the far user's signal")
    return noma.a_near * noma.gamma_th_sic / denom


def far_rate_ceiling(noma: NomaConfig) -> float:
    """log2(1 + a_far / a_near), the interference-limited far-user rate."""
    return math.log2(1.0 + noma.ceiling)


def psi(y, cfg: SystemConfig, fit: GammaFit):
    """sigma^2 / (a_near Pt (y^2 + H^2)^{-alpha/2} d_BR^{-alpha} theta)."""
    g = cfg.geometry
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("distance must be nonnegative")
    # (y^2 + H^2)^{alpha/2} d_BR^{alpha} keeps the path loss in the numerator
    out = (y**2 + g.H**2) ** (g.alpha / 2.0) * g.d_BR**g.alpha / (cfg.noma.a_near * cfg.rho * fit.theta)
    return float(out) if out.ndim == 0 else out


def phi(x, cfg: SystemConfig, fit: GammaFit):
    """sigma^2 x / (Pt d_BR^{-alpha} theta (a_far - a_near x)), defined on [0, a_far/a_near)."""
    g, noma = cfg.geometry, cfg.noma
    x = np.asarray(x, dtype=float)
    gap = noma.a_far - noma.a_near * x
    if np.any(x < 0) or np.any(gap <= 0):
        raise DomainError(f"x must lie in [0, {noma.ceiling:.6g})")
    out = x * g.d_BR**g.alpha / (cfg.rho * fit.theta * gap)
    return float(out) if out.ndim == 0 else out


def _near_nodes(cfg, M):
    spec = cg_nodes(M)
    y = cfg.geometry.R1 / 2.0 * (spec.nodes + 1.0)
    return y, spec.folded_weights * y


def near_rate_terms(cfg: SystemConfig, fit: GammaFit, M: int = DEFAULT_ORDER):
    """The four quadrature sums (I1, I2, I3, I4) whose total is the near-user rate."""
    k = fit.k_int
    threshold = xi(cfg.noma)
    y, wy = _near_nodes(cfg, M)
    psis = psi(y, cfg, fit)
    log_xi1 = math.log1p(threshold)

    i1 = i2 = i3 = i4 = 0.0
    for weight, p in zip(wy, psis):
        p = float(p)
        x_edge = (threshold + 1.0) * p
        i1 += weight * log_xi1 * specfun.reg_upper_gamma(k, threshold * p)
        # e^Psi E1((Xi+1) Psi) == -e^Psi Ei(-(Xi+1) Psi)
        e_term = specfun.exp_mul_e1(p, x_edge)
        i2 += weight * e_term
        if k == 1:
            continue
        s3 = 0.0
        s4 = 0.0
        for n in range(1, k):
            coeff = p**n / math.factorial(n)
            s3 += coeff * (-1) ** n * e_term
            for j in range(1, n + 1):
                s4 += (math.comb(n, j) * (-1) ** (n - j) * p ** (n - j) / math.factorial(n)
                       * specfun.exp_mul_upper_gamma(p, j, x_edge))
        i3 += weight * s3
        i4 += weight * s4
    scale = 1.0 / (cfg.geometry.R1 * LN2)
    return i1 * scale, i2 * scale, i3 * scale, i4 * scale


def ergodic_rate_near(cfg: SystemConfig, fit: GammaFit, M: int = DEFAULT_ORDER) -> RateResult:
    """Closed-form near-user ergodic rate (BPCU)."""
    total = math.fsum(near_rate_terms(cfg, fit, M))
    return RateResult(max(total, 0.0), Method.THEOREM, M)


def ergodic_rate_far(cfg: SystemConfig, fit: GammaFit, M: int = DEFAULT_ORDER) -> RateResult:
    """Closed-form far-user ergodic rate (BPCU)."""
    g, noma = cfg.geometry, cfg.noma
    k = fit.k_int
    spec = cg_nodes(M)
    ceiling = noma.ceiling
    x = ceiling / 2.0 * (spec.nodes + 1.0)
    phis = phi(x, cfg, fit)
    inner_edge = (g.R1**2 + g.H**2) ** (g.alpha / 2.0)
    outer_edge = (g.R2**2 + g.H**2) ** (g.alpha / 2.0)
    shift = 2.0 / g.alpha

    total = 0.0
    for weight, xi_, ph in zip(spec.folded_weights, x, phis):
        ph = float(ph)
        node = 0.0
        for n in range(k):
            diff = specfun.lower_gamma_diff(n + shift, ph * inner_edge, ph * outer_edge)
            node += diff / math.factorial(n)
        if node:
            total += weight * ph ** (-shift) * node / (1.0 + xi_)
    prefactor = ceiling / ((g.R2**2 - g.R1**2) * g.alpha * LN2)
    return RateResult(prefactor * total, Method.THEOREM, M)


def ergodic_rate_near_high_snr(cfg: SystemConfig, fit: GammaFit,
                               M: int = DEFAULT_ORDER) -> RateResult:
    """High-SNR near-user rate: e^x ~ 1 + x, Ei(-x) ~ ln x + C, gamma(k, x) ~ x^k / k.

    Only meaningful once Psi is small over the whole inner disk.  The value
    is not clipped at zero.
    """
    k = fit.k_int
    threshold = xi(cfg.noma)
    y, wy = _near_nodes(cfg, M)
    psis = psi(y, cfg, fit)
    c = specfun.EULER_GAMMA

    total = 0.0
    for weight, p in zip(wy, psis):
        p = float(p)
        x_edge = (threshold + 1.0) * p
        lin = 1.0 + p
        ei = math.log(x_edge) + c
        node = math.log1p(threshold) * (1.0 - (threshold * p) ** k / math.factorial(k))
        node -= lin * ei
        for n in range(1, k):
            coeff = p**n / math.factorial(n)
            node += coeff * (-1) ** (n + 1) * lin * ei
            for j in range(1, n + 1):
                node += (math.comb(n, j) * (-1) ** (n - j) * p ** (n - j) / math.factorial(n)
                         * lin * specfun.upper_gamma_int(j, x_edge))
        total += weight * node
    return RateResult(total / (cfg.geometry.R1 * LN2), Method.HIGH_SNR, M)


def far_high_snr_delta(cfg: SystemConfig, k: int) -> float:
    """2 ((R2^2+H^2)^{ak/2+1} - (R1^2+H^2)^{ak/2+1}) / (k! (R2^2 - R1^2) (ak + 2))."""
    g = cfg.geometry
    power = g.alpha * k / 2.0 + 1.0
    num = (g.R2**2 + g.H**2) ** power - (g.R1**2 + g.H**2) ** power
    return 2.0 * num / (math.factorial(k) * (g.R2**2 - g.R1**2) * (g.alpha * k + 2.0))


def ergodic_rate_far_high_snr(cfg: SystemConfig, fit: GammaFit,
                              M: int = DEFAULT_ORDER) -> RateResult:
    """High-SNR far-user rate: sum of w (1/(x+1) - delta Phi^k(x)) over the nodes.

    The correction term has a pole of order k at a_far/a_near, so for a fixed
    M it only vanishes once rho is large enough that even the last node's
    Phi is small.
    """
    k = fit.k_int
    spec = cg_nodes(M)
    ceiling = cfg.noma.ceiling
    x = ceiling / 2.0 * (spec.nodes + 1.0)
    delta = far_high_snr_delta(cfg, k)
    terms = 1.0 / (x + 1.0) - delta * phi(x, cfg, fit) ** k
    total = ceiling / (2.0 * LN2) * float(np.dot(spec.folded_weights, terms))
    return RateResult(total, Method.HIGH_SNR, M)


def high_snr_slope(rate_fn, rho1: float, rho2: float) -> float:
    """Finite-difference pre-log: (R(rho2) - R(rho1)) / (log2 rho2 - log2 rho1)."""
    if not rho2 > rho1 > 0:
        raise DomainError(f"need rho2 > rho1 > 0, got rho1={rho1}, rho2={rho2}")
    return (float(rate_fn(rho2)) - float(rate_fn(rho1))) / (math.log2(rho2) - math.log2(rho1))


def oracle_rate_near(cfg: SystemConfig, fit: GammaFit, rel_tol: float = 1e-6) -> RateResult:
    """Near-user rate by nested adaptive integration of the raw rate integral."""
    if not 0 < rel_tol <= 1e-4:
        raise DomainError(f"oracle rel_tol must lie in (0, 1e-4], got {rel_tol}")
    k = float(fit.k_int)
    threshold = xi(cfg.noma)
    R1 = cfg.geometry.R1
    inner_tol = rel_tol / 10.0

    def inner(y):
        p = psi(float(y), cfg, fit)
        below = 0.0
        if threshold > 0:
            q_edge = special.gammaincc(k, threshold * p)
            below = integrate_adaptive(lambda x: q_edge / (1.0 + x), 0.0, threshold,
                                       rel_tol=inner_tol, abs_tol=1e-300)
        # Q(k, x Psi) falls from 1 to 0 around x ~ k / Psi
        marks = [v / p for v in _TRANSITIONS * k]
        above = integrate_adaptive(lambda x: special.gammaincc(k, x * p) / (1.0 + x),
                                   threshold, math.inf, rel_tol=inner_tol, abs_tol=1e-300,
                                   points=marks)
        return below + above

    def outer(ys):
        return np.array([inner(y) for y in ys]) * 2.0 * ys / R1**2

    value = integrate_adaptive(outer, 0.0, R1, rel_tol=rel_tol, abs_tol=1e-14) / LN2
    return RateResult(max(value, 0.0), Method.ORACLE_INTEGRAL)


def oracle_rate_far(cfg: SystemConfig, fit: GammaFit, rel_tol: float = 1e-6) -> RateResult:
    """Far-user rate by nested adaptive integration of the raw rate integral."""
    if not 0 < rel_tol <= 1e-4:
        raise DomainError(f"oracle rel_tol must lie in (0, 1e-4], got {rel_tol}")
    g, noma = cfg.geometry, cfg.noma
    k = float(fit.k_int)
    scale = g.d_BR**g.alpha / (cfg.rho * fit.theta)
    area = g.R2**2 - g.R1**2
    inner_tol = rel_tol / 10.0

    def inner(x):
        gap = noma.a_far - noma.a_near * x
        if gap <= 0:
            return 0.0
        threshold = x * scale / gap

        def f(y):
            return special.gammaincc(k, threshold * (y**2 + g.H**2) ** (g.alpha / 2.0)) * 2.0 * y / area

        return integrate_adaptive(f, g.R1, g.R2, rel_tol=inner_tol, abs_tol=1e-300) / (1.0 + x)

    def outer(xs):
        return np.array([inner(x) for x in xs])

    # abscissae where Phi(x) (y^2 + H^2)^{alpha/2} crosses the transition levels at either ring edge
    marks = []
    for edge in (g.R1, g.R2):
        u = (edge**2 + g.H**2) ** (g.alpha / 2.0)
        for v in _TRANSITIONS * k:
            marks.append(v * noma.a_far / (scale * u + v * noma.a_near))
    value = integrate_adaptive(outer, 0.0, noma.ceiling, rel_tol=rel_tol, abs_tol=1e-14,
                               points=marks) / LN2
    return RateResult(max(value, 0.0), Method.ORACLE_INTEGRAL)
