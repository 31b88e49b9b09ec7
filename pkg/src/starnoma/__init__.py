"""Ergodic rates of a STAR-RIS aided NOMA downlink: closed forms, oracles and simulation."""
from .analytic import (RateResult, ergodic_rate_far, ergodic_rate_far_high_snr, ergodic_rate_near,
                       ergodic_rate_near_high_snr, high_snr_slope, oracle_rate_far, oracle_rate_near)
from .channel import FadingParams, GammaFit, fit_gamma_closed_form, fit_gamma_moments
from .montecarlo import Model, RateEstimate, compare_star_vs_ris, estimate_rates, estimate_sweep
from .scenario import ScenarioKind, SystemConfig, conventional_ris_config, default_config

__version__ = "0.1.0"
