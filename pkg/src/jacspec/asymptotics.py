"""Asymptotic structure of the two-step transfer blocks.

For the paired weights the block over the k-th pair, A_k = B_{2k+1} B_{2k},
has determinant k**alpha/(k+1)**alpha and, once k clears the crossover
index, a complex-conjugate eigenvalue pair

    lambda_k(+/-) = (omega_k +/- i sqrt(4 det A_k - omega_k^2)) / 2,
    omega_k = x^2/((k+1)k)**alpha - k**alpha/(k+1)**alpha - 1,

of modulus (k/(k+1))**(alpha/2) and phase approaching pi -/+ |x|/k**alpha.
Accumulated over k, those phases produce the rotation part of the product
A_k ... A_1; splitting it off leaves a residual factor whose increments
decay summably.  Concretely

    A_k ... A_1 = ((-1)^k / (k+1)**(alpha/2)) * R(t_k) * G_k,

where R is the plain rotation by the accumulated angle t_k = -x * sum of
n**(-alpha) and G_k is recovered exactly by orthogonality.  The increments
of G_k are governed by the traceless oscillatory matrices

    H_n = (alpha/(2n)) [[cos(2 phi_n), sin(2 phi_n)],
                        [sin(2 phi_n), -cos(2 phi_n)]],

with 2 phi_n = beta n**s + gamma, beta = -2x/(1-alpha), s = 1-alpha and
gamma = 2x times the accumulated-angle constant; their tails sum to
O(n**-(1-alpha)), which is the convergence criterion checked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import block_product_snapshots
from .recurrence import Mat2, mat2
from .weights import WeightSequence

# unit skew generator and axis flip; exp(t * SKEW) is the rotation below
SKEW: Mat2 = mat2(0.0, 1.0, -1.0, 0.0)
FLIP: Mat2 = mat2(1.0, 0.0, 0.0, -1.0)
IDENTITY: Mat2 = mat2(1.0, 0.0, 0.0, 1.0)


def rotation(t: float) -> Mat2:
    """exp(t * SKEW) = [[cos t, sin t], [-sin t, cos t]]."""
    c, s = math.cos(t), math.sin(t)
    return mat2(c, s, -s, c)


class RegimeError(ValueError):
    """Eigenvalues are real at this (k, x); complex regime starts later."""

    def __init__(self, k: int, min_k: int | None):
        self.k = k
        self.min_k = min_k
        if min_k is None:
            msg = f"block {k} has real eigenvalues and no complex regime exists"
        else:
            msg = f"block {k} has real eigenvalues; complex regime starts at k = {min_k}"
        super().__init__(msg)


@dataclass(frozen=True)
class EigenData:
    k: int
    omega: float
    lambda_plus: complex
    lambda_minus: complex
    modulus: float
    phase_plus: float  # in (0, pi)
    phase_minus: float  # in (pi, 2 pi)


def _block_scalars(alpha: float, k: int, x: float):
    a = float(k) ** alpha
    b = float(k + 1) ** alpha
    det = a / b
    omega = x * x / (b * a) - det - 1.0
    return det, omega


def complex_regime_min_k(seq: WeightSequence, x: float) -> int:
    """Smallest k whose block has complex eigenvalues (undefined at x = 0)."""
    if x == 0.0:
        raise ValueError("blocks have real eigenvalues for every k at x = 0")

    def is_complex(k: int) -> bool:
        det, omega = _block_scalars(seq.alpha, k, x)
        return omega * omega < 4.0 * det

    if is_complex(1):
        return 1
    lo, hi = 1, 2
    while not is_complex(hi):
        lo, hi = hi, hi * 2
        if hi > 1 << 60:
            raise RuntimeError("no complex regime found below k = 2**60")
    while hi - lo > 1:  # transition is single-crossing in k
        mid = (lo + hi) // 2
        if is_complex(mid):
            hi = mid
        else:
            lo = mid
    return hi


def eigen_A(seq: WeightSequence, k: int, x: float) -> EigenData:
    """Eigenvalue pair of the two-step block A_k in the complex regime."""
    if k < 1:
        raise ValueError(f"block index must be >= 1, got {k}")
    det, omega = _block_scalars(seq.alpha, k, x)
    disc = omega * omega - 4.0 * det
    if disc >= 0.0:
        min_k = None
        if x != 0.0:
            min_k = complex_regime_min_k(seq, x)
        raise RegimeError(k, min_k)
    im = 0.5 * math.sqrt(-disc)
    re = 0.5 * omega
    lam = complex(re, im)
    phase_plus = math.atan2(im, re)  # im > 0 so this lies in (0, pi)
    return EigenData(
        k=k,
        omega=omega,
        lambda_plus=lam,
        lambda_minus=lam.conjugate(),
        modulus=abs(lam),
        phase_plus=phase_plus,
        phase_minus=2.0 * math.pi - phase_plus,
    )


# ---- accumulated phases ----

_CHUNK = 1 << 20


def phase_sum(seq: WeightSequence, x: float, k: int) -> tuple[float, float]:
    """(sum of upper phases over j in [p, k), fitted constant of its tail).

    p is the first complex-regime index.  The tail expansion of the sum is
    pi*k - |x| k**(1-alpha)/(1-alpha) - c + o(1); the returned constant is
    the residual pi*k - |x| k**(1-alpha)/(1-alpha) - sum averaged near the
    endpoint, where it has settled to O(k**-alpha).
    """
    p = complex_regime_min_k(seq, x)
    if k <= p:
        raise ValueError(f"need k > first complex index {p}, got k = {k}")
    alpha = seq.alpha
    checkpoints = sorted({max(p + 1, int(round(k * f))) for f in (0.92, 0.94, 0.96, 0.98)} | {k})
    total = 0.0
    residuals = []
    done = p  # phases summed so far cover [p, done)
    for stop in checkpoints:
        lo = done
        while lo < stop:
            hi = min(stop, lo + _CHUNK)
            j = np.arange(lo, hi, dtype=np.float64)
            a = j**alpha
            b = (j + 1.0) ** alpha
            det = a / b
            omega = x * x / (b * a) - det - 1.0
            im = 0.5 * np.sqrt(4.0 * det - omega * omega)
            total += float(np.sum(np.arctan2(im, 0.5 * omega)))
            lo = hi
        done = stop
        residuals.append(
            math.pi * stop - abs(x) * stop ** (1.0 - alpha) / (1.0 - alpha) - total
        )
    return total, float(np.mean(residuals))


@lru_cache(maxsize=None)
def weight_sum_constant(alpha: float) -> float:
    """Constant c in sum_{n<=k} n**(-alpha) = k**(1-alpha)/(1-alpha) - c + o(1).

    Estimated from a partial sum with its endpoint corrections removed
    (trapezoidal and first curvature term), which converges like
    K**-(alpha+3); no closed form is assumed.
    """
    K = 200_000
    j = np.arange(1, K + 1, dtype=np.float64)
    s_k = float(np.sum(j ** (-alpha)))
    tail = K ** (1.0 - alpha) / (1.0 - alpha) + 0.5 * K ** (-alpha) \
        - alpha / 12.0 * K ** (-alpha - 1.0)
    return tail - s_k


def rotation_angle(seq: WeightSequence, x: float, k: int) -> float:
    """Accumulated rotation angle t_k = -x * sum_{n<=k} n**(-alpha)."""
    total = 0.0
    lo = 1
    while lo <= k:
        hi = min(k, lo + _CHUNK - 1)
        j = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(np.sum(j ** (-seq.alpha)))
        lo = hi + 1
    return -x * total


# ---- rotation / residual factorization ----


@dataclass(frozen=True)
class ProductFactorization:
    """A_k ... A_1 = (sign / scale) * rotation @ residual with sign = (-1)^k."""

    k: int
    t_k: float
    rotation: Mat2  # R(t_k), orthogonal
    residual: Mat2  # the bounded-variation factor
    product: Mat2  # raw A_k ... A_1 as multiplied out


def _factorization_from_raw(seq, x, k, t_k, raw: Mat2) -> ProductFactorization:
    sign = -1.0 if k & 1 else 1.0
    scale = float(k + 1) ** (0.5 * seq.alpha)
    rot = rotation(t_k)
    residual = rot.T @ (sign * scale * raw)
    if not np.all(np.isfinite(residual)):
        raise FloatingPointError(f"non-finite residual factor at k = {k}")
    return ProductFactorization(k=k, t_k=t_k, rotation=rot, residual=residual, product=raw)


def factorize_product(seq: WeightSequence, x: float, k: int) -> ProductFactorization:
    """Split the exact block product into rotation and residual factors."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    raw = block_product_snapshots(seq.alpha, x, np.asarray([k], dtype=np.int64))[0]
    return _factorization_from_raw(seq, x, k, rotation_angle(seq, x, k), raw)


def residual_snapshots(seq: WeightSequence, x: float, ks) -> list[ProductFactorization]:
    """Factorizations at several ascending indices from one product pass."""
    ks = np.asarray(sorted(int(k) for k in ks), dtype=np.int64)
    if len(ks) == 0 or ks[0] < 1:
        raise ValueError("snapshot indices must be >= 1")
    raws = block_product_snapshots(seq.alpha, x, ks)
    out = []
    total = 0.0
    lo = 1
    for i, k in enumerate(ks):
        while lo <= k:
            hi = min(int(k), lo + _CHUNK - 1)
            j = np.arange(lo, hi + 1, dtype=np.float64)
            total += float(np.sum(j ** (-seq.alpha)))
            lo = hi + 1
        out.append(_factorization_from_raw(seq, x, int(k), -x * total, raws[i]))
    return out


def reconstruct(fact: ProductFactorization, seq: WeightSequence) -> Mat2:
    """(sign/scale) * rotation @ residual; should reproduce the raw product."""
    sign = -1.0 if fact.k & 1 else 1.0
    scale = float(fact.k + 1) ** (0.5 * seq.alpha)
    return (sign / scale) * (fact.rotation @ fact.residual)


# ---- summable-tail criterion for the residual increments ----


@dataclass(frozen=True)
class TailReport:
    ns: np.ndarray
    q_norms: np.ndarray
    slope: float  # fitted decay exponent of ||Q_n||, expected -(1-alpha)
    gamma: float  # phase offset used for the oscillatory increments


def tail_check(
    seq: WeightSequence,
    x: float,
    samples=None,
    tol: float = 1e-10,
) -> TailReport:
    """Norms of the summed increment tails Q_n = sum_{j>=n} H_j.

    Each tail is a direct sum up to m = 4n plus the integral form of the
    remainder (integral of the increment density plus half the first
    summand, the standard endpoint correction); the dropped curvature term
    is O(m**-(1+alpha)), far below the leading O(n**-(1-alpha)).
    """
    if x == 0.0:
        raise ValueError("tail criterion needs x != 0")
    from .oscillatory import cos_over_y, sin_over_y

    alpha = seq.alpha
    s = 1.0 - alpha
    beta = -2.0 * x / s
    gamma = 2.0 * x * weight_sum_constant(alpha)
    if samples is None:
        samples = np.unique(np.geomspace(100, 100_000, 12).astype(np.int64))
    ns = np.asarray(sorted(int(n) for n in samples), dtype=np.int64)
    if ns[0] < 2:
        raise ValueError("tail samples must be >= 2")

    sgn = 1.0 if beta >= 0 else -1.0
    ab = abs(beta)
    q_norms = np.empty(len(ns), dtype=np.float64)
    for i, n in enumerate(ns):
        m = 4 * int(n)
        j = np.arange(n, m + 1, dtype=np.float64)
        theta = beta * j**s + gamma
        coef = 0.5 * alpha / j
        a_sum = float(np.sum(coef * np.cos(theta)))
        b_sum = float(np.sum(coef * np.sin(theta)))
        # remainder past m as an integral in y = |beta| t**s plus endpoint term
        y_lo = ab * float(m + 1) ** s
        a_sum += 0.5 * alpha / s * cos_over_y(y_lo, math.inf, sgn * gamma, tol)
        b_sum += sgn * 0.5 * alpha / s * sin_over_y(y_lo, math.inf, sgn * gamma, tol)
        t1 = beta * float(m + 1) ** s + gamma
        c1 = 0.5 * alpha / float(m + 1)
        a_sum += 0.5 * c1 * math.cos(t1)
        b_sum += 0.5 * c1 * math.sin(t1)
        q_norms[i] = math.sqrt(2.0 * (a_sum * a_sum + b_sum * b_sum))

    slope = float(np.polyfit(np.log(ns.astype(np.float64)), np.log(q_norms), 1)[0])
    return TailReport(ns=ns, q_norms=q_norms, slope=slope, gamma=gamma)
