"""Command-line front end: sweeps, fits, condition checks, diagnostics.

Subcommands
-----------
density     sweep f(x) over a linear grid and write one CSV
figures     the three-panel density story (alpha 0.6, 2/3, 0.8): CSV + SVG each
exponent    fit the small-x power law and compare with the predicted exponent
conditions  admissibility checks of the weight sequence
product     block-product factorization snapshots and increment-tail norms
ode         discrete residual factor vs the continuum flow on an x-ladder

All output is deterministic for a fixed configuration: floats are written
in shortest round-trip form, row order is fixed, and CSV files use LF line
endings regardless of platform.  Options may also come from a key=value
config file (--config); explicit flags win over file entries.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, continuum
from .density import TruncationPolicy, sweep
from .plots import density_plot_spec, render
from .transition import (
    InsufficientDataError,
    classify,
    default_policy,
    default_window,
    fit_exponent,
    predicted_exponent,
)
from .weights import WeightSequence, check_conditions

_DENSITY_COLUMNS = ["x", "delta", "f", "n_used", "spread", "amplitude_delta", "converged"]
_FIT_COLUMNS = ["alpha", "slope", "predicted", "residual_rms", "x_lo", "x_hi", "points_used"]

_FIGURE_ALPHAS = (0.6, 2.0 / 3.0, 0.8)


@dataclass
class RunConfig:
    """Resolved, validated parameters for one command; fully deterministic."""

    alpha: float
    b0: float = 1.0
    kappa: float | None = None
    n_max: int | None = None
    out: str = "."
    strict: bool = False
    extras: dict = field(default_factory=dict)

    def sequence(self) -> WeightSequence:
        return WeightSequence(self.alpha, self.b0)

    def policy(self) -> TruncationPolicy:
        base = default_policy(self.alpha)
        return TruncationPolicy(
            kappa=self.kappa if self.kappa is not None else base.kappa,
            n_max=self.n_max if self.n_max is not None else base.n_max,
            window_fraction=base.window_fraction,
            n_floor=base.n_floor,
        )


def _fmt(value) -> str:
    """Shortest round-trip text for one CSV cell."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, columns: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _density_rows(estimates):
    for e in estimates:
        yield (e.x, e.delta, e.f, e.n_used, e.spread, e.amplitude_delta, e.converged)


# ---- subcommand bodies ----


def cmd_density(config: RunConfig) -> int:
    x_min = config.extras["x_min"]
    x_max = config.extras["x_max"]
    points = config.extras["points"]
    if points < 1:
        raise SystemExit("density: --points must be a positive integer")
    if x_min >= x_max:
        raise SystemExit("density: need --x-min < --x-max")
    grid = np.linspace(x_min, x_max, points)
    if np.any(grid == 0.0):
        raise SystemExit(
            "density: the grid hits x = 0 exactly, where the density is the "
            "contested limit; shift the bounds or change --points"
        )
    seq = config.sequence()
    estimates = sweep(seq, grid, config.policy())
    path = os.path.join(config.out, f"density_alpha_{config.alpha:g}.csv")
    _write_csv(path, _DENSITY_COLUMNS, _density_rows(estimates))
    bad = sum(1 for e in estimates if not e.converged)
    print(f"wrote {path} ({len(estimates)} rows, {bad} unconverged)")
    if bad and config.strict:
        print("strict mode: unconverged points present", file=sys.stderr)
        return 1
    return 0


def _figure_grid() -> np.ndarray:
    lin = np.linspace(-3.0, 3.0, 121)
    lin = lin[lin != 0.0]
    small = np.geomspace(0.01, 0.3, 16)
    anchors = np.array([0.01, 0.5, 1.0])
    return np.unique(np.concatenate([lin, small, -small, anchors, -anchors]))


def _figure_policy(alpha: float) -> TruncationPolicy:
    # the steep high-alpha truncation growth needs head-room traded for kappa
    if alpha > 2.0 / 3.0:
        return TruncationPolicy(kappa=8.0, n_max=2 * 10**9)
    return TruncationPolicy(kappa=50.0, n_max=10**8)


def _value_at(estimates, x: float) -> float:
    for e in estimates:
        if e.x == x and e.converged:
            return e.f
    raise SystemExit(f"figures: no converged estimate at x = {x:g}")


def cmd_figures(config: RunConfig) -> int:
    grid = _figure_grid()
    status = 0
    for alpha in _FIGURE_ALPHAS:
        seq = WeightSequence(alpha, config.b0)
        policy = _figure_policy(alpha) if config.kappa is None and config.n_max is None else (
            RunConfig(alpha=alpha, b0=config.b0, kappa=config.kappa, n_max=config.n_max).policy()
        )
        estimates = sweep(seq, grid, policy)
        base = os.path.join(config.out, f"fig_alpha_{alpha:g}")
        _write_csv(base + ".csv", _DENSITY_COLUMNS, _density_rows(estimates))
        kept = [e for e in estimates if e.converged and math.isfinite(e.f)]
        spec = density_plot_spec([e.x for e in kept], [e.f for e in kept], alpha, base + ".svg")
        render(spec)
        print(f"wrote {base}.csv and {base}.svg (hole radius {spec.hole_radius:g})")
        ratio_x = 1.0 if alpha != 2.0 / 3.0 else 0.5
        ratio = _value_at(estimates, 0.01) / _value_at(estimates, ratio_x)
        print(f"  alpha={alpha:g}: f(0.01)/f({ratio_x:g}) = {ratio:.4f}")
        if config.strict and any(not e.converged for e in estimates):
            status = 1
    return status


def cmd_exponent(config: RunConfig) -> int:
    seq = config.sequence()
    window = config.extras.get("window") or default_window(config.alpha)
    points = config.extras.get("points") or 36
    policy = config.policy() if (config.kappa is not None or config.n_max is not None) else None
    tolerance = config.extras.get("tolerance")
    if tolerance is None:
        tolerance = 0.15 if config.alpha <= 2.0 / 3.0 else 0.2
    try:
        fit = fit_exponent(seq, policy=policy, window=window, points=points)
    except (InsufficientDataError, ValueError) as exc:
        # bad window or budget is a usage problem, not a crash
        print(f"exponent: {exc}", file=sys.stderr)
        return 1
    path = os.path.join(config.out, f"exponent_alpha_{config.alpha:g}.csv")
    _write_csv(
        path,
        _FIT_COLUMNS,
        [
            (
                fit.alpha,
                fit.slope,
                fit.predicted,
                fit.residual_rms,
                fit.x_window[0],
                fit.x_window[1],
                fit.points_used,
            )
        ],
    )
    verdict = classify(config.alpha).value
    ok = abs(fit.slope - fit.predicted) <= tolerance
    print(fit)
    print(f"classification: {verdict}")
    print(f"{'PASS' if ok else 'FAIL'}: |measured - predicted| "
          f"{abs(fit.slope - fit.predicted):.4f} vs tolerance {tolerance:g}")
    print(f"wrote {path}")
    return 0 if ok or not config.strict else 1


def cmd_conditions(config: RunConfig) -> int:
    seq = config.sequence()
    report = check_conditions(seq, max_n=config.extras.get("max_n") or 10**6)
    path = os.path.join(config.out, f"conditions_alpha_{config.alpha:g}.csv")
    stats = {
        "c1": report.c1_last_b,
        "c2": report.c2_ratio_limit,
        "c3": report.c3_tail_exponent,
        "c4": report.c4_tail_exponent,
    }
    _write_csv(
        path,
        ["condition", "verdict", "statistic"],
        [
            (f"condition{key[1]}", report.verdicts[key], stats[key])
            for key in sorted(report.verdicts)
        ],
    )
    print(report)
    print(f"wrote {path}")
    return 0


def cmd_product(config: RunConfig) -> int:
    seq = config.sequence()
    x = config.extras["x"]
    k = config.extras.get("k") or 10**6
    if x == 0.0:
        raise SystemExit("product: --x must be nonzero")
    if k < 8000:
        raise SystemExit("product: --k too small for a doubling ladder")
    # ~25 geometric doubling pairs (k_j, 2 k_j); fitting the pair increments
    # against k_j averages out the residual's slow phase wobble, which a
    # handful of strictly dyadic points does not
    base = np.unique(np.geomspace(1000.0, k / 2.0, 25).astype(np.int64))
    ks = sorted({int(v) for v in base} | {2 * int(v) for v in base})
    snaps = asymptotics.residual_snapshots(seq, x, ks)
    by_k = {snap.k: snap.residual for snap in snaps}
    rows = []
    for snap in snaps:
        g = snap.residual
        det = float(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])
        doubled = by_k.get(2 * snap.k)
        diff = float(np.linalg.norm(doubled - g)) if doubled is not None else math.nan
        rows.append((snap.k, snap.t_k, g[0, 0], g[0, 1], g[1, 0], g[1, 1], det, diff))
    snap_path = os.path.join(config.out, f"product_snapshots_alpha_{config.alpha:g}.csv")
    _write_csv(
        snap_path,
        ["k", "t_k", "g11", "g12", "g21", "g22", "det_g", "diff_to_double"],
        rows,
    )
    diffs = np.array([np.linalg.norm(by_k[2 * int(v)] - by_k[int(v)]) for v in base])
    keep = diffs > 0.0
    if keep.sum() < 3:
        raise SystemExit("product: residual increments vanished, nothing to fit")
    slope = float(
        np.polyfit(np.log(base[keep].astype(float)), np.log(diffs[keep]), 1)[0]
    )
    tail = asymptotics.tail_check(seq, x)
    tail_path = os.path.join(config.out, f"product_tails_alpha_{config.alpha:g}.csv")
    _write_csv(tail_path, ["n", "q_norm"], zip(tail.ns, tail.q_norms))
    print(f"residual increments ||G(2k) - G(k)||: fitted slope {slope:.4f} "
          f"(criterion -(1-alpha) = {-(1 - seq.alpha):.4f})")
    print(f"increment tail norms: fitted slope {tail.slope:.4f}")
    print(f"wrote {snap_path} and {tail_path}")
    return 0


def cmd_ode(config: RunConfig) -> int:
    seq = config.sequence()
    x = config.extras["x"]
    if x <= 0.0:
        raise SystemExit("ode: --x must be positive (negative energies mirror by evenness)")
    k_end = config.extras.get("k_end") or 10**6
    ladder = np.geomspace(0.4 * x, 4.0 * x, 9)
    comp = continuum.scaling_ladder(seq, ladder, k_end)
    rows = [
        (float(xv), comp.k_start, comp.k_end, dv, ov)
        for xv, dv, ov in zip(comp.xs, comp.discrete_norms, comp.ode_norms)
    ]
    path = os.path.join(config.out, f"ode_compare_alpha_{config.alpha:g}.csv")
    _write_csv(
        path,
        ["x", "k_start", "k_end", "discrete_first_col", "ode_first_col"],
        rows,
    )
    target = -seq.alpha / (2.0 * (1.0 - seq.alpha))
    print(f"first-column scaling over x in [{ladder[0]:g}, {ladder[-1]:g}]: "
          f"discrete slope {comp.discrete_slope:.4f}, continuum slope "
          f"{comp.ode_slope:.4f} (predicted {target:.4f})")
    print(f"wrote {path}")
    return 0


# ---- argument plumbing ----


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, file_values: dict[str, str], key: str, cast, default):
    """Explicit flag > config-file entry > built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        try:
            return cast(file_values[key])
        except ValueError as exc:
            raise SystemExit(f"config file: bad value for {key}: {exc}")
    return default


def _bool_from_text(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacspec",
        description="spectral density of k^alpha paired-weight Jacobi operators",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="weight growth exponent in (1/2, 1)")
    common.add_argument("--b0", type=float, help="free first weight (default 1)")
    common.add_argument("--kappa", type=float, help="truncation head-room factor")
    common.add_argument("--n-max", dest="n_max", type=int, help="hard cap on recurrence steps")
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("--strict", action="store_const", const=True,
                        help="nonzero exit if any requested point is unconverged")
    common.add_argument("--config", help="key=value file; explicit flags win")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common], help="density sweep over a linear grid")
    p.add_argument("--x-min", dest="x_min", type=float, help="grid lower edge (default -3)")
    p.add_argument("--x-max", dest="x_max", type=float, help="grid upper edge (default 3)")
    p.add_argument("--points", type=int, help="grid size (default 200)")

    sub.add_parser("figures", parents=[common], help="three-panel density figures")

    p = sub.add_parser("exponent", parents=[common], help="fit the small-x power law")
    p.add_argument("--x-lo", dest="x_lo", type=float, help="fit window lower edge")
    p.add_argument("--x-hi", dest="x_hi", type=float, help="fit window upper edge")
    p.add_argument("--points", type=int, help="grid size (default 36)")
    p.add_argument("--tolerance", type=float, help="pass/fail tolerance on the slope")

    p = sub.add_parser("conditions", parents=[common], help="weight admissibility checks")
    p.add_argument("--max-n", dest="max_n", type=int, help="partial-sum depth (default 1e6)")

    p = sub.add_parser("product", parents=[common], help="block-product convergence report")
    p.add_argument("--x", type=float, help="energy (default 1)")
    p.add_argument("--k", type=int, help="deepest block index (default 1e6)")

    p = sub.add_parser("ode", parents=[common], help="discrete vs continuum comparison")
    p.add_argument("--x", type=float, help="ladder center energy (default 0.05)")
    p.add_argument("--k-end", dest="k_end", type=int, help="comparison depth (default 1e6)")

    return parser


def _build_config(args) -> RunConfig:
    file_values = _load_config_file(args.config) if args.config else {}
    alpha = _resolve(args, file_values, "alpha", float, 0.6)
    if not 0.5 < alpha < 1.0:
        raise SystemExit(f"alpha must lie in the open interval (1/2, 1), got {alpha:g}")
    config = RunConfig(
        alpha=alpha,
        b0=_resolve(args, file_values, "b0", float, 1.0),
        kappa=_resolve(args, file_values, "kappa", float, None),
        n_max=_resolve(args, file_values, "n_max", int, None),
        out=_resolve(args, file_values, "out", str, "."),
        strict=bool(_resolve(args, file_values, "strict", _bool_from_text, False)),
    )
    if config.b0 <= 0.0 or not math.isfinite(config.b0):
        raise SystemExit(f"b0 must be positive and finite, got {config.b0:g}")
    if config.out != "." and not os.path.isdir(config.out):
        os.makedirs(config.out, exist_ok=True)

    if args.command == "density":
        config.extras = {
            "x_min": _resolve(args, file_values, "x_min", float, -3.0),
            "x_max": _resolve(args, file_values, "x_max", float, 3.0),
            "points": _resolve(args, file_values, "points", int, 200),
        }
    elif args.command == "exponent":
        x_lo = _resolve(args, file_values, "x_lo", float, None)
        x_hi = _resolve(args, file_values, "x_hi", float, None)
        if (x_lo is None) != (x_hi is None):
            raise SystemExit("exponent: give both --x-lo and --x-hi or neither")
        config.extras = {
            "window": (x_lo, x_hi) if x_lo is not None else None,
            "points": _resolve(args, file_values, "points", int, None),
            "tolerance": _resolve(args, file_values, "tolerance", float, None),
        }
    elif args.command == "conditions":
        config.extras = {"max_n": _resolve(args, file_values, "max_n", int, None)}
    elif args.command == "product":
        config.extras = {
            "x": _resolve(args, file_values, "x", float, 1.0),
            "k": _resolve(args, file_values, "k", int, None),
        }
    elif args.command == "ode":
        config.extras = {
            "x": _resolve(args, file_values, "x", float, 0.05),
            "k_end": _resolve(args, file_values, "k_end", int, None),
        }
    return config


_COMMANDS = {
    "density": cmd_density,
    "figures": cmd_figures,
    "exponent": cmd_exponent,
    "conditions": cmd_conditions,
    "product": cmd_product,
    "ode": cmd_ode,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _build_config(args)
    return _COMMANDS[args.command](config)


if __name__ == "__main__":
    sys.exit(main())
