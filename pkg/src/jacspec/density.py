"""Window-averaged spectral density estimates with adaptive truncation.

Delta_n(x) approaches its limit C(x)^2 only once n clears the crossover
index k*(x) = (alpha/(2|x|))**(1/(1-alpha)) where the energy term starts to
dominate the weight increments.  The truncation policy scales with that
crossover; the residual transient past it is oscillatory, so a window
average over [window_fraction*N, N] cancels it to higher order while the
recorded spread (max - min over the window) tracks the oscillation
envelope honestly.

Two independent estimators of the same limit are kept side by side:

  * the window mean of Delta_n, and
  * the window mean of k**alpha * (P_{2k-1}^2 + P_{2k}^2), which squares
    the envelope of the two-step oscillation directly.

Their agreement is the cheap internal consistency check for a converged
point; collapsing them into one quantity would defeat that purpose.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import window_stats
from .weights import WeightSequence

_SPREAD_LIMIT = 0.2  # capped points with spread/delta beyond this are unconverged


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to run the recurrence before trusting the window average."""

    kappa: float = 50.0  # multiplier on the crossover index
    n_max: int = 10**8  # hard cap on the truncation index
    window_fraction: float = 0.5  # averaging window is [wf*N, N]
    n_floor: int = 1000  # smallest truncation index ever used

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.n_max < self.n_floor:
            raise ValueError(f"n_max must be >= n_floor, got {self.n_max}")
        if not (0.0 < self.window_fraction < 1.0):
            raise ValueError(
                f"window_fraction must lie in (0, 1), got {self.window_fraction}"
            )
        if self.n_floor < 1000:
            raise ValueError(f"n_floor must be >= 1000, got {self.n_floor}")

    def truncation_index(self, alpha: float, x: float) -> tuple[int, bool]:
        """(N(x), capped): N = max(floor, min(n_max, ceil(kappa*k*(x))))."""
        if x == 0.0:
            raise ValueError("truncation index is undefined at x = 0")
        raw = self.kappa * (alpha / (2.0 * abs(x))) ** (1.0 / (1.0 - alpha))
        capped = raw > float(self.n_max)
        n = self.n_max if capped else int(math.ceil(raw))
        return max(self.n_floor, n), capped


@dataclass(frozen=True)
class DensityEstimate:
    x: float
    delta: float  # window-averaged Delta_n
    f: float  # 1 / (pi * delta)
    n_used: int
    spread: float  # max - min of Delta_n over the window
    amplitude_delta: float  # independent envelope estimator of the same limit
    converged: bool


def _window_bounds(policy: TruncationPolicy, alpha: float, x: float):
    n_hi, capped = policy.truncation_index(alpha, x)
    n_lo = max(1, int(math.ceil(policy.window_fraction * n_hi)))
    # a capped window that starts before the crossover averages the wrong
    # regime no matter how quiet it looks, so remember where it starts
    past_crossover = float(n_lo) >= (alpha / (2.0 * abs(x))) ** (1.0 / (1.0 - alpha))
    return n_lo, n_hi, capped, past_crossover


def _estimate_from_stats(x, stats, n_hi, capped, past_crossover) -> DensityEstimate:
    dsum, dmin, dmax, dcount, asum, acount = stats
    delta = dsum / dcount
    spread = dmax - dmin
    amp = asum / acount if acount else math.nan
    converged = (not capped) or (
        past_crossover and spread <= _SPREAD_LIMIT * abs(delta)
    )
    if not math.isfinite(delta) or delta <= 0.0:
        # a non-positive window mean means the asymptotic regime was not
        # reached at all; report it rather than inventing a density
        return DensityEstimate(x, delta, math.nan, n_hi, spread, amp, False)
    return DensityEstimate(x, delta, 1.0 / (math.pi * delta), n_hi, spread, amp, converged)


def estimate_density(
    seq: WeightSequence, x: float, policy: TruncationPolicy = TruncationPolicy()
) -> DensityEstimate:
    """Spectral density estimate f(x) = 1/(pi * Delta(x)) at one point.

    Points whose unclamped truncation index would exceed policy.n_max are
    never silently truncated: they are flagged unconverged whenever the
    capped window still starts before the crossover index or its spread
    exceeds 20% of the window mean.
    """
    if x == 0.0:
        raise ValueError("the spectral origin x = 0 must be excluded")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    n_lo, n_hi, capped, past = _window_bounds(policy, seq.alpha, x)
    stats = window_stats(seq.alpha, seq.b0, x, n_lo, n_hi)
    return _estimate_from_stats(x, stats, n_hi, capped, past)


def amplitude_estimator(seq: WeightSequence, x: float, k_window: tuple[int, int]) -> float:
    """Window mean of k**alpha * (P_{2k-1}(x)^2 + P_{2k}(x)^2).

    Valid at x = 0 as well, where it reproduces the closed-form decay
    b0^2 / k**alpha of the even polynomials.
    """
    k_lo, k_hi = k_window
    if not (1 <= k_lo <= k_hi):
        raise ValueError(f"need 1 <= k_lo <= k_hi, got {k_window}")
    stats = window_stats(seq.alpha, seq.b0, x, 2 * k_lo, 2 * k_hi)
    return stats[4] / stats[5]


def sweep(
    seq: WeightSequence,
    grid,
    policy: TruncationPolicy = TruncationPolicy(),
) -> list[DensityEstimate]:
    """Density estimates over a grid of x values, in grid order.

    Delta is even in x down to the last bit (the recurrence flips signs
    coherently under x -> -x), so each |x| is computed once and shared
    between the signed twins.  Heavy points are dispatched first to a small
    thread pool; the kernels release the GIL.
    """
    xs = [float(x) for x in grid]
    if any(x == 0.0 for x in xs):
        raise ValueError("sweep grid must exclude x = 0")
    jobs: dict[float, tuple[int, int, bool]] = {}
    for x in xs:
        ax = abs(x)
        if ax not in jobs:
            jobs[ax] = _window_bounds(policy, seq.alpha, ax)
    order = sorted(jobs, key=lambda ax: -jobs[ax][1])  # heaviest first

    def run(ax):
        n_lo, n_hi, capped, past = jobs[ax]
        return ax, window_stats(seq.alpha, seq.b0, ax, n_lo, n_hi)

    results: dict[float, tuple] = {}
    workers = min(8, os.cpu_count() or 1, max(1, len(order)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for ax, stats in pool.map(run, order):
                results[ax] = stats
    else:
        for ax in order:
            results[ax] = run(ax)[1]

    out = []
    for x in xs:
        ax = abs(x)
        n_lo, n_hi, capped, past = jobs[ax]
        est = _estimate_from_stats(ax, results[ax], n_hi, capped, past)
        out.append(
            DensityEstimate(
                x, est.delta, est.f, est.n_used, est.spread, est.amplitude_delta, est.converged
            )
        )
    return out
