"""System configuration, geometry, path loss and per-realization SINRs.

All internal quantities are linear; dB conversions live here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import REFERENCE_FITS, FadingParams, GammaFit, fit_gamma_closed_form
from .errors import ConfigError, DomainError


class ScenarioKind(str, enum.Enum):
    STAR = "STAR"
    CONVENTIONAL_RIS = "CONVENTIONAL_RIS"


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def noise_power_dbm(bw_hz: float, nf_db: float) -> float:
    """Thermal noise floor -170 + 10 log10(BW) + NF."""
    if not bw_hz > 0:
        raise DomainError(f"bandwidth must be positive, got {bw_hz}")
    return -170.0 + 10.0 * math.log10(bw_hz) + nf_db


def _finite(value, name):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", name)


@dataclass(frozen=True)
class GeometryConfig:
    """Deployment geometry in meters.

    The surface sits at ``ris_position``; its height above ground is ``H``.
    Near users live in the disk of radius ``R1`` around the origin, far users
    in the annulus ``[R1, R2]``.
    """

    bs_position: tuple = (400.0, 0.0, 0.0)
    ris_position: tuple = (0.0, 0.0, 30.0)
    R1: float = 100.0
    R2: float = 200.0
    alpha: float = 2.6

    def __post_init__(self):
        for name in ("bs_position", "ris_position"):
            vec = tuple(float(v) for v in getattr(self, name))
            if len(vec) != 3:
                raise ConfigError("expected a 3-vector", f"geometry.{name}")
            for v in vec:
                _finite(v, f"geometry.{name}")
            object.__setattr__(self, name, vec)
        for name in ("R1", "R2", "alpha"):
            _finite(getattr(self, name), f"geometry.{name}")
        if not 0 < self.R1 < self.R2:
            raise ConfigError(f"need 0 < R1 < R2, got R1={self.R1}, R2={self.R2}", "geometry.R1")
        if not self.H > 0:
            raise ConfigError(f"surface height must be positive, got {self.H}", "geometry.ris_position")
        if not self.alpha >= 2:
            raise ConfigError(f"path-loss exponent must be >= 2, got {self.alpha}", "geometry.alpha")
        if not self.d_BR > 0:
            raise ConfigError("BS and surface coincide", "geometry.bs_position")

    @property
    def H(self) -> float:
        return self.ris_position[2]

    @property
    def d_BR(self) -> float:
        return math.dist(self.bs_position, self.ris_position)

    def horizontal_offset(self, d, phi):
        """Horizontal distance from a user at polar position (d, phi) to the surface foot point."""
        rx, ry, _ = self.ris_position
        if rx == 0.0 and ry == 0.0:
            return np.asarray(d, dtype=float)
        return np.hypot(d * np.cos(phi) - rx, d * np.sin(phi) - ry)


@dataclass(frozen=True)
class NomaConfig:
    a_near: float = 0.3
    a_far: float = 0.7
    gamma_th_sic: float = 1.0
    beta_rfl: float = 0.5
    beta_rfr: float = 0.5

    def __post_init__(self):
        for name in ("a_near", "a_far", "gamma_th_sic", "beta_rfl", "beta_rfr"):
            _finite(getattr(self, name), f"noma.{name}")
        for name in ("a_near", "a_far"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"must lie in (0, 1), got {getattr(self, name)}", f"noma.{name}")
        if not math.isclose(self.a_near + self.a_far, 1.0, rel_tol=0, abs_tol=1e-9):
            raise ConfigError("a_near + a_far must equal 1", "noma.a_far")
        if not self.a_near < self.a_far:
            raise ConfigError("the far user must receive more power (a_near < a_far)", "noma.a_near")
        for name in ("beta_rfl", "beta_rfr"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"must lie in [0, 1], got {getattr(self, name)}", f"noma.{name}")
        if not math.isclose(self.beta_rfl + self.beta_rfr, 1.0, rel_tol=0, abs_tol=1e-9):
            raise ConfigError("beta_rfl + beta_rfr must equal 1", "noma.beta_rfr")
        if not self.gamma_th_sic >= 0:
            raise ConfigError(f"SIC threshold must be nonnegative, got {self.gamma_th_sic}",
                              "noma.gamma_th_sic")

    @property
    def ceiling(self) -> float:
        """Interference-limited SINR ceiling a_far / a_near."""
        return self.a_far / self.a_near


@dataclass(frozen=True)
class PowerConfig:
    pt_dbm: float = 10.0
    noise_dbm: float = -90.0

    def __post_init__(self):
        _finite(self.pt_dbm, "power.pt_dbm")
        _finite(self.noise_dbm, "power.noise_dbm")

    @property
    def rho(self) -> float:
        """Transmit SNR Pt / sigma^2 (linear)."""
        return db_to_linear(self.snr_db)

    @property
    def snr_db(self) -> float:
        return self.pt_dbm - self.noise_dbm


@dataclass(frozen=True)
class SystemConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    noma: NomaConfig = field(default_factory=NomaConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    fading: FadingParams = field(default_factory=FadingParams)
    n_elements: int = 30
    scenario_kind: ScenarioKind = ScenarioKind.STAR
    gamma_override: GammaFit | None = None

    def __post_init__(self):
        if isinstance(self.n_elements, bool) or not isinstance(self.n_elements, int) \
                or self.n_elements < 1:
            raise ConfigError(f"must be a positive integer, got {self.n_elements!r}", "elements")
        try:
            object.__setattr__(self, "scenario_kind", ScenarioKind(self.scenario_kind))
        except ValueError:
            raise ConfigError(f"unknown scenario kind {self.scenario_kind!r}", "scenario_kind") from None

    @property
    def rho(self) -> float:
        return self.power.rho

    def gamma_fit(self) -> GammaFit:
        """The override when configured, else the closed-form fit for (fading, N)."""
        if self.gamma_override is not None:
            return self.gamma_override
        return fit_gamma_closed_form(self.fading, self.n_elements)

    def with_snr_db(self, snr_db: float) -> "SystemConfig":
        """Same system with Pt set so that Pt / sigma^2 equals ``snr_db``."""
        return replace(self, power=replace(self.power, pt_dbm=self.power.noise_dbm + snr_db))

    @property
    def user_betas(self) -> tuple:
        """Energy-splitting factors applied to the (near, far) user's cascade."""
        if self.scenario_kind is ScenarioKind.CONVENTIONAL_RIS:
            return 1.0, 1.0
        return self.noma.beta_rfl, self.noma.beta_rfr


def default_config(n_elements: int = 30) -> SystemConfig:
    """Baseline STAR deployment; carries the reference (k, theta) when one exists for N."""
    return SystemConfig(
        power=PowerConfig(pt_dbm=10.0, noise_dbm=noise_power_dbm(1e7, 10.0)),
        n_elements=n_elements,
        gamma_override=REFERENCE_FITS.get(n_elements),
    )


def conventional_ris_config(cfg: SystemConfig,
                            ris_position=(-200.0, 0.0, 50.0)) -> SystemConfig:
    """Reflect-only counterpart of ``cfg`` with the surface at the cell edge facing the BS."""
    return replace(cfg, geometry=replace(cfg.geometry, ris_position=tuple(ris_position)),
                   scenario_kind=ScenarioKind.CONVENTIONAL_RIS)


def path_loss(d_horiz, H, d_BR, alpha):
    """(d_horiz^2 + H^2)^(-alpha/2) * d_BR^(-alpha)."""
    if np.any(np.asarray(H) <= 0) or np.any(np.asarray(d_BR) <= 0):
        raise DomainError("H and d_BR must be positive")
    d_horiz = np.asarray(d_horiz, dtype=float)
    out = (d_horiz**2 + H**2) ** (-alpha / 2.0) * float(d_BR) ** (-alpha)
    return float(out) if out.ndim == 0 else out


def sinr_triplet(gain_near, gain_far, d_near, d_far, cfg: SystemConfig):
    """Return (gamma_sic, gamma_near, gamma_far) for the given gains and horizontal offsets."""
    g = cfg.geometry
    a_n, a_f = cfg.noma.a_near, cfg.noma.a_far
    rho = cfg.rho
    z_near = rho * path_loss(d_near, g.H, g.d_BR, g.alpha) * np.asarray(gain_near, dtype=float)
    z_far = rho * path_loss(d_far, g.H, g.d_BR, g.alpha) * np.asarray(gain_far, dtype=float)
    gamma_sic = a_f * z_near / (a_n * z_near + 1.0)
    gamma_near = a_n * z_near
    gamma_far = a_f * z_far / (a_n * z_far + 1.0)
    return gamma_sic, gamma_near, gamma_far
