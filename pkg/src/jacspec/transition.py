"""Fitting and classifying the small-energy power law of the density.

For weights growing like k**alpha the density follows

    f(x) ~ f0 * |x|**((3 alpha - 2)/(1 - alpha)),  x -> 0,

so its boundary behavior switches at alpha = 2/3: it blows up below,
approaches a finite nonzero value exactly there, and vanishes above.  The
exponent is measured by a weighted least-squares line on (ln x, ln f) over
a log-spaced window; each alpha gets its own default window because the
truncation index needed for convergence scales like |x|**(-1/(1-alpha)),
which makes very small x unaffordable as alpha grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .density import DensityEstimate, TruncationPolicy, sweep
from .weights import WeightSequence


def predicted_exponent(alpha: float) -> float:
    """(3 alpha - 2)/(1 - alpha); monotone on (1/2, 1), zero at 2/3."""
    if not 0.5 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha}")
    return (3.0 * alpha - 2.0) / (1.0 - alpha)


class TransitionClass(Enum):
    DIVERGES = "diverges"
    FINITE_NONZERO = "finite_nonzero"
    VANISHES = "vanishes"


def classify(alpha: float) -> TransitionClass:
    """Predicted boundary behavior of f at x = 0, decided by alpha vs 2/3."""
    if not 0.5 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha}")
    if alpha == 2.0 / 3.0:
        return TransitionClass.FINITE_NONZERO
    return TransitionClass.DIVERGES if alpha < 2.0 / 3.0 else TransitionClass.VANISHES


class InsufficientDataError(RuntimeError):
    """Fewer converged density points than a trustworthy fit needs."""


# Calibrated fit windows and truncation budgets.  The smallest usable |x|
# rises steeply with alpha (the crossover index grows like |x|**(-1/(1-a))),
# so the high-alpha entries trade window width for an uncapped truncation
# within the runtime budget; the kappa head-room factor can shrink with
# alpha because the window-average bias it controls is independent of x and
# drops out of a log-log slope.
_FIT_POINTS = 36
DEFAULT_WINDOWS: dict[float, tuple[float, float]] = {
    0.55: (5e-5, 5e-3),
    0.6: (1e-3, 1e-1),
    2.0 / 3.0: (1e-2, 1e-1),
    0.75: (1e-2, 0.12),
    0.8: (0.012, 0.12),
}
DEFAULT_POLICIES: dict[float, TruncationPolicy] = {
    0.55: TruncationPolicy(kappa=6.0, n_max=2 * 10**9),
    0.6: TruncationPolicy(kappa=50.0, n_max=10**8),
    2.0 / 3.0: TruncationPolicy(kappa=50.0, n_max=10**8),
    0.75: TruncationPolicy(kappa=25.0, n_max=10**8),
    0.8: TruncationPolicy(kappa=8.0, n_max=2 * 10**9),
}


def default_policy(alpha: float) -> TruncationPolicy:
    return DEFAULT_POLICIES.get(alpha, TruncationPolicy(kappa=50.0, n_max=10**8))


def default_window(alpha: float) -> tuple[float, float]:
    """Tabulated window, or one backed off from the truncation budget."""
    try:
        return DEFAULT_WINDOWS[alpha]
    except KeyError:
        pass
    policy = default_policy(alpha)
    # keep the raw truncation index at x_lo a factor 2 under the cap
    x_lo = 0.5 * alpha * (policy.n_max / (2.0 * policy.kappa)) ** -(1.0 - alpha)
    x_lo = max(x_lo, 1e-3)
    return (x_lo, min(0.25, 100.0 * x_lo))


@dataclass(frozen=True)
class ExponentFit:
    alpha: float
    slope: float
    intercept: float  # ln of the law's prefactor
    residual_rms: float
    x_window: tuple[float, float]
    points_used: int
    predicted: float

    def __str__(self) -> str:
        lo, hi = self.x_window
        return (
            f"alpha={self.alpha:g}: slope {self.slope:+.4f} vs predicted "
            f"{self.predicted:+.4f} over x in [{lo:g}, {hi:g}] "
            f"({self.points_used} points, rms {self.residual_rms:.3f})"
        )


def fit_exponent(
    seq: WeightSequence,
    policy: TruncationPolicy | None = None,
    window: tuple[float, float] | None = None,
    points: int = _FIT_POINTS,
) -> ExponentFit:
    """Weighted log-log fit of f(x) over a geometric grid in the window.

    Unconverged or non-finite estimates are dropped; each kept point is
    weighted by its delta-to-spread ratio, the natural inverse noise scale
    of ln f.  Fewer than 10 usable points raises InsufficientDataError.
    """
    alpha = seq.alpha
    if policy is None:
        policy = default_policy(alpha)
    if window is None:
        window = default_window(alpha)
    x_lo, x_hi = float(window[0]), float(window[1])
    if not 0.0 < x_lo < x_hi:
        raise ValueError(f"need 0 < x_lo < x_hi, got ({x_lo}, {x_hi})")
    if points < 10:
        raise ValueError(f"need at least 10 grid points, got {points}")
    _, capped = policy.truncation_index(alpha, x_lo)
    if capped:
        raise ValueError(
            f"window edge x_lo={x_lo:g} needs more than n_max={policy.n_max} "
            "recurrence steps; widen the window or raise n_max"
        )

    grid = np.geomspace(x_lo, x_hi, points)
    estimates = sweep(seq, grid, policy)
    used: list[DensityEstimate] = [
        e for e in estimates if e.converged and math.isfinite(e.f) and e.f > 0.0
    ]
    if len(used) < 10:
        raise InsufficientDataError(
            f"only {len(used)} of {points} density points converged in "
            f"[{x_lo:g}, {x_hi:g}] for alpha={alpha:g}"
        )

    lx = np.log([abs(e.x) for e in used])
    lf = np.log([e.f for e in used])
    # ln f noise scales like spread/delta, so weight by its inverse
    w = np.array([e.delta / max(e.spread, 1e-12 * e.delta) for e in used])
    slope, intercept = np.polyfit(lx, lf, 1, w=w)
    resid = lf - (slope * lx + intercept)
    return ExponentFit(
        alpha=alpha,
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        x_window=(x_lo, x_hi),
        points_used=len(used),
        predicted=predicted_exponent(alpha),
    )
