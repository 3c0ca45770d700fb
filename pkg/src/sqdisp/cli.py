"""Command-line front end.

Subcommands: density, likelihood, compare-srm, asymptotics, two-mode,
validate.  Configuration is a flat key=value text file plus command-line
overrides; unknown keys are rejected.  ``--print-config`` dumps the
effective configuration, so any frozen regression output can be reproduced
exactly.  CSV output carries full double precision (17 significant digits)
and is bit-identical across runs for a fixed configuration.

Exit codes: 0 success, 1 validation-suite failure, 2 configuration error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from . import asymptotics, distribution, two_mode, validate
from .errors import ConfigError, EstimationError
from .grids import (QuadratureGrid, StateVector, default_grid, make_coherent,
                    make_displaced_squeezed, make_sampled, make_vacuum)
from .povm import (KIND_ML, KIND_PARITY, KIND_SRM, build_ml_seed,
                   build_parity_seed, build_srm_seed, optimal_likelihood,
                   srm_likelihood)

STATE_KINDS = ("vacuum", "coherent", "displaced-squeezed", "sampled-file")
SEED_KINDS = (KIND_ML, KIND_SRM, KIND_PARITY)


@dataclass
class RunConfig:
    state: str = "vacuum"
    a: float = 0.0
    z: float = 0.0
    sampled_path: str = ""
    y_max: float = 0.0          # 0 = automatic
    n: int = 0                  # 0 = default (4096)
    x_lo: float = math.nan      # nan = default window for the state
    x_hi: float = math.nan
    r_lo: float = math.nan
    r_hi: float = math.nan
    resolution: int = 128
    seed_kind: str = KIND_ML
    lam: float = 0.95
    n_max: int = 60
    tail_tol: float = 0.0       # 0 = no truncation check; >0 enforces it
    nbar: float = 100.0
    mass_tol: float = 1e-2
    out_csv: str = ""
    out_json: str = ""

    def validate(self):
        if self.state not in STATE_KINDS:
            raise ConfigError(f"unknown state kind {self.state!r}")
        if self.seed_kind not in SEED_KINDS:
            raise ConfigError(f"unknown seed kind {self.seed_kind!r}")
        for name in ("a", "z", "y_max", "lam", "nbar", "mass_tol", "tail_tol"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v}")
        if self.resolution < 16:
            raise ConfigError("resolution must be at least 16")
        if not 0.0 < self.lam < 1.0:
            raise ConfigError("lam must lie strictly between 0 and 1")
        if self.n and (self.n < 2 or self.n % 2):
            raise ConfigError("n must be an even integer >= 2")
        if self.state == "sampled-file" and not self.sampled_path:
            raise ConfigError("sampled-file state requires sampled_path")
        window = (self.x_lo, self.x_hi, self.r_lo, self.r_hi)
        if any(not math.isnan(v) for v in window):
            if any(math.isnan(v) for v in window):
                raise ConfigError("window requires all of x_lo, x_hi, r_lo, r_hi")
            if not (self.x_lo < self.x_hi and self.r_lo < self.r_hi):
                raise ConfigError("window must satisfy x_lo < x_hi and r_lo < r_hi")


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def load_config_file(path: str) -> dict:
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return values


def effective_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in _FIELD_TYPES:
        arg = getattr(args, key, None)
        if arg is not None:
            values[key] = arg
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def print_config(cfg: RunConfig):
    for f in dataclasses.fields(RunConfig):
        print(f"{f.name} = {getattr(cfg, f.name)}")


def _state_label(cfg: RunConfig) -> str:
    if cfg.state == "vacuum":
        return "vacuum"
    if cfg.state == "coherent":
        return f"coherent(a={cfg.a:g})"
    if cfg.state == "displaced-squeezed":
        return f"displaced-squeezed(a={cfg.a:g}, z={cfg.z:g})"
    return f"sampled-file({cfg.sampled_path})"


def load_sampled_state(path: str, normalize: bool = True) -> StateVector:
    """Read a state from CSV with header y,re,im on a midpoint-offset grid."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read sampled state: {exc}") from exc
    if data.shape[1] not in (2, 3):
        raise ConfigError("sampled state file needs columns y,re[,im]")
    y = data[:, 0]
    n = len(y)
    if n < 2 or n % 2:
        raise ConfigError("sampled state needs an even number of rows")
    dy = y[1] - y[0]
    y_max = y[-1] + dy / 2.0
    grid = QuadratureGrid(y_max, n)
    if not np.allclose(grid.nodes, y, rtol=0, atol=1e-9 * max(y_max, 1.0)):
        raise ConfigError("sampled state nodes are not a midpoint-offset grid")
    amps = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return make_sampled(grid, amps, normalize=normalize)


def build_state(cfg: RunConfig) -> StateVector:
    grid = None
    if cfg.y_max > 0 or cfg.n > 0:
        base = default_grid(cfg.a if cfg.state != "vacuum" else 0.0,
                            cfg.z if cfg.state == "displaced-squeezed" else 0.0)
        grid = QuadratureGrid(cfg.y_max or base.y_max, cfg.n or base.n)
    if cfg.state == "vacuum":
        return make_vacuum(grid)
    if cfg.state == "coherent":
        return make_coherent(cfg.a, grid=grid)
    if cfg.state == "displaced-squeezed":
        return make_displaced_squeezed(cfg.a, cfg.z, grid=grid)
    return load_sampled_state(cfg.sampled_path)


def build_seed(cfg: RunConfig, psi: StateVector):
    if cfg.seed_kind == KIND_ML:
        return build_ml_seed(psi)
    if cfg.seed_kind == KIND_SRM:
        return build_srm_seed(psi)
    return build_parity_seed(psi)


def default_window(cfg: RunConfig) -> Tuple[float, float, float, float]:
    if not math.isnan(cfg.x_lo):
        return (cfg.x_lo, cfg.x_hi, cfg.r_lo, cfg.r_hi)
    if cfg.state == "vacuum":
        return (-3.0, 3.0, -3.0, 3.0)
    scale = abs(cfg.a) * math.exp(cfg.z if cfg.state == "displaced-squeezed" else 0.0)
    r_half = 6.0 / max(scale, 1.0)
    x_half = 4.0 * math.exp(cfg.z) if cfg.state == "displaced-squeezed" else 4.0
    return (-max(x_half, 2.0), max(x_half, 2.0), -r_half, r_half)


def write_csv(path: str, dmap: distribution.DensityMap):
    lines = ["x,r,density"]
    for i, x in enumerate(dmap.x_nodes):
        for j, r in enumerate(dmap.r_nodes):
            lines.append(f"{x:.17g},{r:.17g},{dmap.values[i, j]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path: str, payload: dict):
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def run_density(cfg: RunConfig) -> int:
    psi = build_state(cfg)
    seed = build_seed(cfg, psi)
    window = default_window(cfg)
    dmap = distribution.scan(seed, psi, window, cfg.resolution)
    ax, ar, _ = distribution.argmax(dmap)
    # summary statistics are over the scanned window; the library-level
    # moments() additionally enforces the mass > 0.9 contract
    x = dmap.x_nodes
    r = dmap.r_nodes
    wx = distribution._trapezoid_weights(x)
    wr = distribution._trapezoid_weights(r) * np.exp(-r)
    weighted = dmap.values * np.outer(wx, wr)
    total = float(weighted.sum())
    mean_x = float((weighted.sum(axis=1) * x).sum()) / total
    mean_r = float((weighted.sum(axis=0) * r).sum()) / total
    delta_x = math.sqrt(max(float((weighted.sum(axis=1) * (x - mean_x) ** 2).sum()) / total, 0.0))
    delta_r = math.sqrt(max(float((weighted.sum(axis=0) * (r - mean_r) ** 2).sum()) / total, 0.0))
    summary = {
        "likelihood": seed.likelihood,
        "argmax_x": ax,
        "argmax_r": ar,
        "mean_x": mean_x,
        "mean_r": mean_r,
        "delta_x": delta_x,
        "delta_r": delta_r,
        "mass": dmap.mass,
        "seed_kind": seed.kind,
        "state": _state_label(cfg),
    }
    if cfg.out_csv:
        write_csv(cfg.out_csv, dmap)
    write_json(cfg.out_json, summary)
    return 0


def run_likelihood(cfg: RunConfig) -> int:
    psi = build_state(cfg)
    seed = build_seed(cfg, psi)
    write_json(cfg.out_json, {
        "likelihood": seed.likelihood,
        "seed_kind": seed.kind,
        "state": _state_label(cfg),
        "w_plus": seed.w_plus,
        "w_minus": seed.w_minus,
        "certificates": seed.certificates,
    })
    return 0


def run_compare(cfg: RunConfig) -> int:
    psi = build_state(cfg)
    l_opt = optimal_likelihood(psi)
    l_srm = srm_likelihood(psi)
    ratio = l_srm / l_opt
    if ratio > 1.0 + 1e-9:
        raise EstimationError(f"L_srm/L_opt = {ratio} exceeds 1")
    write_json(cfg.out_json, {"l_opt": l_opt, "l_srm": l_srm, "ratio": ratio})
    return 0


def run_asymptotics(cfg: RunConfig) -> int:
    a = cfg.a if cfg.a > 0 else 10.0
    dx, dr = asymptotics.rms_predictions(a, cfg.z)
    ox, orr = asymptotics.separate_optima(a, cfg.z)
    iso = asymptotics.isotropic_params(cfg.nbar)
    write_json(cfg.out_json, {
        "a": a,
        "z": cfg.z,
        "delta_x": dx,
        "delta_r": dr,
        "delta_x_opt": ox,
        "delta_r_opt": orr,
        "product_ratio": (dx * dr) / (ox * orr),
        "isotropic_a": iso.a,
        "isotropic_z": iso.z,
        "fig_split_a": iso.fig_a,
        "fig_split_z": iso.fig_z,
        "nbar": cfg.nbar,
    })
    return 0


def run_two_mode(cfg: RunConfig) -> int:
    window = (cfg.x_lo, cfg.x_hi, cfg.r_lo, cfg.r_hi)
    if math.isnan(cfg.x_lo):
        window = (-1.5, 1.5, -1.5, 1.5)
    tail_tol = cfg.tail_tol if cfg.tail_tol > 0 else None
    resolution = min(cfg.resolution, 96)
    prof = two_mode.concentration_profile(cfg.lam, cfg.n_max, window,
                                          resolution, tail_tol=tail_tol)
    pointer = two_mode.make_pointer(cfg.lam, +1, cfg.n_max, tail_tol=tail_tol)
    C = two_mode.raw_pointer_coefficients(cfg.n_max)
    k = np.arange(cfg.n_max + 1)
    parity_max = float(np.max(np.abs(C[(k[:, None] + k[None, :]) % 2 == 1])))
    minus = two_mode.make_pointer(cfg.lam, -1, cfg.n_max, grid=pointer.grid,
                                  tail_tol=tail_tol)
    cross = abs(two_mode.pointer_overlap(minus, two_mode.GroupElement(0.0, 0.0),
                                         pointer))
    if cfg.out_csv:
        write_csv(cfg.out_csv, prof.map)
    write_json(cfg.out_json, {
        "lam": cfg.lam,
        "n_max": cfg.n_max,
        "width_x": prof.width_x,
        "width_r": prof.width_r,
        "mean_energy": pointer.mean_energy,
        "norm_deviation": abs(float((pointer.coeffs ** 2).sum()) - 1.0),
        "parity_violation": parity_max,
        "cross_overlap": cross,
    })
    return 0


def run_validate(cfg: RunConfig) -> int:
    results = validate.run_checks(cfg.n or None)
    return 0 if all(r.passed for r in results) else 1


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--print-config", action="store_true",
                        help="print the effective configuration and exit")
    parser.add_argument("--state", choices=STATE_KINDS)
    parser.add_argument("--a", type=float)
    parser.add_argument("--z", type=float)
    parser.add_argument("--sampled-path", dest="sampled_path")
    parser.add_argument("--y-max", dest="y_max", type=float)
    parser.add_argument("--n", type=int)
    parser.add_argument("--x-lo", dest="x_lo", type=float)
    parser.add_argument("--x-hi", dest="x_hi", type=float)
    parser.add_argument("--r-lo", dest="r_lo", type=float)
    parser.add_argument("--r-hi", dest="r_hi", type=float)
    parser.add_argument("--resolution", type=int)
    parser.add_argument("--seed-kind", dest="seed_kind", choices=SEED_KINDS)
    parser.add_argument("--lam", type=float)
    parser.add_argument("--n-max", dest="n_max", type=int)
    parser.add_argument("--tail-tol", dest="tail_tol", type=float)
    parser.add_argument("--nbar", type=float)
    parser.add_argument("--out-csv", dest="out_csv")
    parser.add_argument("--out-json", dest="out_json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqdisp",
        description="Joint maximum-likelihood estimation of real squeezing "
                    "and displacement")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("density", "scan the estimation density and write CSV/JSON"),
            ("likelihood", "report the seed likelihood for a state"),
            ("compare-srm", "compare square-root and optimal likelihoods"),
            ("asymptotics", "closed-form error laws and isotropic parameters"),
            ("two-mode", "entangled-pointer concentration study"),
            ("validate", "run the named invariant suite")):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    return parser


_RUNNERS = {
    "density": run_density,
    "likelihood": run_likelihood,
    "compare-srm": run_compare,
    "asymptotics": run_asymptotics,
    "two-mode": run_two_mode,
    "validate": run_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = effective_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.print_config:
        print_config(cfg)
        return 0
    try:
        return _RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
