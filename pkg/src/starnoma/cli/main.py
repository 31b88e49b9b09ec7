"""Command-line experiment runner.

    starnoma sweep    --snr-db 60:160:5 --methods analytic,oracle [--config cfg.json] [-o out.csv]
    starnoma fit      --m 2 --omega 1 --n-elements 30
    starnoma slopes   [--config cfg.json]
    starnoma validate [--config cfg.json]

Exit status: 0 success, 1 invalid configuration or arguments, 2 SIC
infeasible, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .. import analytic
from ..channel import REFERENCE_FITS, FadingParams, GammaFit, fit_gamma_closed_form
from ..errors import ConfigError, DomainError, IntegrationError, SICInfeasibleError
from ..montecarlo import MIN_SAMPLES, Model, default_workers, estimate_sweep
from ..quadrature import DEFAULT_ORDER
from ..scenario import ScenarioKind, SystemConfig, default_config, linear_to_db
from .config import config_to_dict, load_config

EXIT_OK, EXIT_CONFIG, EXIT_SIC, EXIT_NUMERIC = 0, 1, 2, 3

METHODS = ("analytic", "highsnr", "oracle", "mc-gamma", "mc-physical")
MC_METHODS = {"mc-gamma": Model.GAMMA_FIT, "mc-physical": Model.PHYSICAL_IID}
COLUMNS = ("snr_db", "user", "method", "rate_bpcu", "std_err", "n_samples", "k", "theta", "M", "seed")
SLOPE_SNR_DB = (140.0, 150.0)


@dataclass
class SweepRequest:
    config_path: str | None = None
    snr_db_start: float = 60.0
    snr_db_stop: float = 160.0
    snr_db_step: float = 5.0
    methods: tuple = ("analytic",)
    mc_samples: int = 1_000_000
    seed: int = 0
    quadrature_M: int = DEFAULT_ORDER
    output_path: str | None = None
    output_format: str = "csv"
    workers: int | None = field(default=None, compare=False)

    def validate(self):
        if not self.snr_db_start <= self.snr_db_stop:
            raise ConfigError("start must not exceed stop", "snr_db")
        if self.snr_db_start < self.snr_db_stop and not self.snr_db_step > 0:
            raise ConfigError("step must be positive", "snr_db")
        if not self.methods:
            raise ConfigError("at least one method is required", "methods")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown method(s) {sorted(unknown)}; choose from {', '.join(METHODS)}",
                              "methods")
        if set(self.methods) & set(MC_METHODS) and self.mc_samples < MIN_SAMPLES:
            raise ConfigError(f"need at least {MIN_SAMPLES} samples, got {self.mc_samples}", "mc_samples")
        if self.quadrature_M < 1:
            raise ConfigError("must be a positive integer", "quadrature_M")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.output_format!r}", "output_format")

    def snr_grid(self):
        if self.snr_db_start == self.snr_db_stop:
            return [self.snr_db_start]
        count = int(math.floor((self.snr_db_stop - self.snr_db_start) / self.snr_db_step + 1e-9)) + 1
        return [round(self.snr_db_start + i * self.snr_db_step, 10) for i in range(count)]


def parse_snr_range(text: str):
    """``start:stop:step`` (stop inclusive) or a single value."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot parse SNR range {text!r}", "snr_db") from None
    if len(values) == 1:
        return values[0], values[0], 1.0
    if len(values) != 3:
        raise ConfigError(f"expected start:stop:step, got {text!r}", "snr_db")
    if not values[0] < values[1]:
        raise ConfigError("start must be below stop", "snr_db")
    if not values[2] > 0:
        raise ConfigError("step must be positive", "snr_db")
    return tuple(values)


def _resolve_config(path) -> SystemConfig:
    return default_config() if path is None else load_config(path)


def _fmt(value):
    if value is None or value == "":
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _snr_label(snr):
    return f"{snr:g}"


def sweep_rows(req: SweepRequest):
    """Compute the sweep table as a list of dicts keyed by :data:`COLUMNS`."""
    req.validate()
    cfg = _resolve_config(req.config_path)
    analytic.xi(cfg.noma)
    fit = cfg.gamma_fit()
    methods = [m for m in METHODS if m in req.methods]
    needs_star = {"analytic", "highsnr", "oracle", "mc-gamma"} & set(methods)
    if needs_star and cfg.scenario_kind is not ScenarioKind.STAR:
        raise ConfigError(f"method(s) {sorted(needs_star)} assume a STAR deployment", "scenario_kind")

    grid = req.snr_grid()
    M = req.quadrature_M
    mc = {m: estimate_sweep(cfg, fit, MC_METHODS[m], req.mc_samples, req.seed, grid, req.workers)
          for m in methods if m in MC_METHODS}

    closed = {
        "analytic": (analytic.ergodic_rate_near, analytic.ergodic_rate_far),
        "highsnr": (analytic.ergodic_rate_near_high_snr, analytic.ergodic_rate_far_high_snr),
    }
    rows = []
    for p, snr in enumerate(grid):
        c = cfg.with_snr_db(snr)
        for u, user in enumerate(("near", "far")):
            for method in methods:
                row = dict.fromkeys(COLUMNS, "")
                row.update(snr_db=_snr_label(snr), user=user, method=method, theta=fit.theta)
                if method in closed:
                    row.update(rate_bpcu=closed[method][u](c, fit, M).value, k=fit.k_int, M=M)
                elif method == "oracle":
                    fn = analytic.oracle_rate_near if u == 0 else analytic.oracle_rate_far
                    row.update(rate_bpcu=fn(c, fit).value, k=fit.k_int)
                else:
                    est = mc[method][p][u]
                    row.update(rate_bpcu=est.mean, std_err=est.std_error, n_samples=est.n_samples,
                               k=fit.k_raw, seed=req.seed)
                rows.append(row)
    return rows


def render(rows, fmt: str) -> str:
    if fmt == "json":
        table = [{c: row[c] for c in COLUMNS} for row in rows]
        return json.dumps({"columns": list(COLUMNS), "rows": table}, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    return buf.getvalue()


def run_sweep(req: SweepRequest) -> int:
    text = render(sweep_rows(req), req.output_format)
    if req.output_path is None:
        sys.stdout.write(text)
    else:
        with open(req.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def run_fit(m: float, omega: float, n_elements: int, override: GammaFit | None = None,
            out=None) -> int:
    out = out or sys.stdout
    if isinstance(n_elements, bool) or int(n_elements) != n_elements or n_elements < 1:
        raise ConfigError(f"must be a positive integer, got {n_elements}", "n_elements")
    fit = fit_gamma_closed_form(FadingParams(m, omega), int(n_elements))
    print(f"closed-form fit: k_raw={fit.k_raw:.6g} k_int={fit.k_int} theta={fit.theta:.6g}", file=out)
    if override is None and m == 2 and omega == 1:
        override = REFERENCE_FITS.get(int(n_elements))
    if override is None:
        return EXIT_OK
    print(f"override:        k={override.k_raw:.6g} theta={override.theta:.6g}", file=out)
    for name, mine, theirs in (("k", fit.k_raw, override.k_raw), ("theta", fit.theta, override.theta)):
        gap = abs(mine - theirs) / abs(theirs)
        if gap > 0.05:
            print(f"warning: {name} differs from the override by {100 * gap:.1f}% "
                  f"({mine:.6g} vs {theirs:.6g})", file=out)
    return EXIT_OK


def run_slopes(cfg: SystemConfig, M: int = DEFAULT_ORDER, rate_fns=None, out=None) -> int:
    """Print finite-difference high-SNR slopes between 140 and 150 dB.

    ``rate_fns`` replaces the (near, far) rate functions of linear SNR; used for testing.
    """
    out = out or sys.stdout
    fit = cfg.gamma_fit()
    if rate_fns is None:
        def near(rho):
            return analytic.ergodic_rate_near(cfg.with_snr_db(linear_to_db(rho)), fit, M).value

        def far(rho):
            return analytic.ergodic_rate_far(cfg.with_snr_db(linear_to_db(rho)), fit, M).value
        rate_fns = (near, far)
    lo, hi = (10.0 ** (s / 10.0) for s in SLOPE_SNR_DB)
    s_near = analytic.high_snr_slope(rate_fns[0], lo, hi)
    s_far = analytic.high_snr_slope(rate_fns[1], lo, hi)
    print(f"near slope ({SLOPE_SNR_DB[0]:g}-{SLOPE_SNR_DB[1]:g} dB): {s_near:.6f}", file=out)
    print(f"far slope  ({SLOPE_SNR_DB[0]:g}-{SLOPE_SNR_DB[1]:g} dB): {s_far:.6f}  "
          f"(ceiling {analytic.far_rate_ceiling(cfg.noma):.5f} BPCU)", file=out)
    return EXIT_OK


def run_validate(cfg: SystemConfig, out=None) -> int:
    out = out or sys.stdout
    analytic.xi(cfg.noma)
    fit = cfg.gamma_fit()
    doc = config_to_dict(cfg)
    doc["resolved"] = {"rho_db": cfg.power.snr_db, "d_BR": cfg.geometry.d_BR,
                       "k_int": fit.k_int, "k_raw": fit.k_raw, "theta": fit.theta,
                       "xi": analytic.xi(cfg.noma)}
    print(json.dumps(doc, indent=2), file=out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="starnoma", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="sweep transmit SNR and tabulate rates")
    sw.add_argument("--config")
    sw.add_argument("--snr-db", default="60:160:5", help="start:stop:step in dB (stop inclusive)")
    sw.add_argument("--methods", default="analytic",
                    help=f"comma-separated subset of {','.join(METHODS)}")
    sw.add_argument("--mc-samples", type=int, default=1_000_000)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--quadrature-M", type=int, default=DEFAULT_ORDER)
    sw.add_argument("-o", "--output")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int, default=None,
                    help="Monte Carlo threads (default: $STARNOMA_THREADS or CPU count)")

    ft = sub.add_parser("fit", help="closed-form gamma fit of the composite gain")
    ft.add_argument("--m", type=float, default=2.0)
    ft.add_argument("--omega", type=float, default=1.0)
    ft.add_argument("--n-elements", type=int, default=30)
    ft.add_argument("--config", help="take the override tuple from this config")

    sl = sub.add_parser("slopes", help="high-SNR slope estimates")
    sl.add_argument("--config")
    sl.add_argument("--quadrature-M", type=int, default=DEFAULT_ORDER)
    sl.add_argument("--synthetic", action="store_true", help=argparse.SUPPRESS)

    va = sub.add_parser("validate", help="check a config and print it fully resolved")
    va.add_argument("--config")
    return parser


def _dispatch(args) -> int:
    if args.command == "sweep":
        start, stop, step = parse_snr_range(args.snr_db)
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        req = SweepRequest(args.config, start, stop, step, methods, args.mc_samples, args.seed,
                           args.quadrature_M, args.output, args.format,
                           args.workers if args.workers is not None else default_workers())
        return run_sweep(req)
    if args.command == "fit":
        override = None
        if args.config:
            override = load_config(args.config).gamma_override
        return run_fit(args.m, args.omega, args.n_elements, override)
    if args.command == "slopes":
        cfg = _resolve_config(args.config)
        fns = (math.log2, lambda rho: 0.0) if args.synthetic else None
        return run_slopes(cfg, args.quadrature_M, fns)
    return run_validate(_resolve_config(args.config))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except SICInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIC
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
