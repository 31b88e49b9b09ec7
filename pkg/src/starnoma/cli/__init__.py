from .main import SweepRequest, main, run_fit, run_slopes, run_sweep, sweep_rows

__all__ = ["SweepRequest", "main", "run_fit", "run_slopes", "run_sweep", "sweep_rows"]
