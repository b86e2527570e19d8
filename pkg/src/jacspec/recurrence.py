"""Three-term recurrence, transfer matrices and the density functional.

Orthonormal polynomials of the first kind for the tridiagonal operator obey

    b_{n-1} P_{n-1}(x) + b_n P_{n+1}(x) = x P_n(x),      n >= 1,
    P_0 = 1,  P_1 = x / b_0,

and the quantity

    Delta_n(x) = b_n P_n(x)^2 - b_{n-1} P_{n-1}(x) P_{n+1}(x)

converges (for the paired power weights) to the square of the amplitude
C(x) of the generalized-eigenvector envelope; the spectral density is then
f(x) = 1 / (pi * Delta(x)).

Everything here is a single forward pass: Delta_n needs one lookahead value
P_{n+1}, so the full sample stream is produced without storing the
polynomial sequence.  No renormalization is applied; for the weights at
hand |P_n| decays like n**(-alpha/2) so there is no overflow to manage.

2x2 matrices are plain float64 numpy arrays throughout (row-major entries).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weights import WeightSequence, weight

Mat2 = np.ndarray  # shape (2, 2), float64


def mat2(a11: float, a12: float, a21: float, a22: float) -> Mat2:
    return np.array([[a11, a12], [a21, a22]], dtype=np.float64)


@dataclass(frozen=True)
class PolyState:
    """Rolling recurrence state: (P_{n-1}, P_n) at position n."""

    n: int
    p_prev: float  # P_{n-1}(x)
    p_curr: float  # P_n(x)
    x: float


@dataclass(frozen=True)
class DeltaSample:
    n: int
    delta: float


def initial_state(seq: WeightSequence, x: float) -> PolyState:
    """State at n = 1, holding (P_0, P_1) = (1, x/b_0)."""
    return PolyState(n=1, p_prev=1.0, p_curr=x / seq.b0, x=x)


def step(state: PolyState, seq: WeightSequence) -> PolyState:
    """Advance one index: P_{n+1} = (x P_n - b_{n-1} P_{n-1}) / b_n."""
    n = state.n
    if n < 1:
        raise ValueError(f"step requires n >= 1, got n={n}")
    b_n = weight(seq, n)
    b_prev = weight(seq, n - 1)
    p_next = (state.x * state.p_curr - b_prev * state.p_prev) / b_n
    if not np.isfinite(p_next):
        raise FloatingPointError(f"recurrence produced a non-finite value at n={n + 1}")
    return PolyState(n=n + 1, p_prev=state.p_curr, p_curr=p_next, x=state.x)


def transfer_B(seq: WeightSequence, n: int, x: float) -> Mat2:
    """One-step transfer matrix mapping (P_{n-1}, P_n) to (P_n, P_{n+1})."""
    if n < 1:
        raise ValueError(f"transfer matrix index must be >= 1, got {n}")
    b_n = weight(seq, n)
    b_prev = weight(seq, n - 1)
    return mat2(0.0, 1.0, -b_prev / b_n, x / b_n)


def block_A(seq: WeightSequence, k: int, x: float) -> Mat2:
    """Two-step block over the k-th weight pair: B_{2k+1} B_{2k}.

    Written out in terms of a = k**alpha and b = (k+1)**alpha:

        [ -1        x / a                 ]
        [ -x / b    (x/b)(x/a) - a / b    ]

    The entries are grouped exactly as the explicit B_{2k+1} @ B_{2k}
    product computes them, so the two routes agree to the last bit apart
    from the additions inside numpy's matmul.
    """
    if k < 1:
        raise ValueError(f"block index must be >= 1, got {k}")
    a = float(k) ** seq.alpha  # b_{2k-1} = b_{2k}
    b = float(k + 1) ** seq.alpha  # b_{2k+1}
    xa = x / a
    xb = x / b
    return mat2(-1.0, xa, -xb, xb * xa - a / b)


def delta_n(seq: WeightSequence, x: float, n: int) -> DeltaSample:
    """Single sample Delta_n(x) via one forward pass to P_{n+1}."""
    if n < 1:
        raise ValueError(f"delta index must be >= 1, got {n}")
    state = initial_state(seq, x)
    while state.n < n:
        state = step(state, seq)
    b_n = weight(seq, n)
    b_prev = weight(seq, n - 1)
    nxt = step(state, seq)
    d = b_n * state.p_curr * state.p_curr - b_prev * state.p_prev * nxt.p_curr
    return DeltaSample(n=n, delta=d)


def delta_stream(seq: WeightSequence, x: float, n_hi: int):
    """Yield Delta_1 .. Delta_{n_hi} in order (pure-python reference path).

    The production path for large n_hi is the fused kernel in density.py;
    this generator exists for clarity and as a cross-check oracle.
    """
    state = initial_state(seq, x)
    b_prev = seq.b0
    for n in range(1, n_hi + 1):
        b_n = weight(seq, n)
        p_next = (x * state.p_curr - b_prev * state.p_prev) / b_n
        yield DeltaSample(n=n, delta=b_n * state.p_curr * state.p_curr
                          - b_prev * state.p_prev * p_next)
        state = PolyState(n=n + 1, p_prev=state.p_curr, p_curr=p_next, x=x)
        b_prev = b_n


def zero_energy_profile(seq: WeightSequence, k_max: int):
    """Exact-route values P_{2k}(0) and Delta_{2k}(0) for k = 1..k_max.

    At x = 0 the recurrence telescopes: odd polynomials vanish and
    P_{2k+2} = -(k**alpha / (k+1)**alpha) P_{2k}, so the even values are a
    plain cumulative product.  Closed forms: P_{2k}(0) = (-1)^k b_0 / k**alpha
    and Delta_{2k}(0) = b_0**2 / k**alpha.
    """
    k = np.arange(1, k_max + 1, dtype=np.float64)
    pk = k**seq.alpha
    ratios = np.empty(k_max, dtype=np.float64)
    ratios[0] = -seq.b0  # P_2 = (0 - b_0 * 1) / b_1 = -b_0 / 1**alpha
    ratios[1:] = -pk[:-1] / pk[1:]
    p_even = np.cumprod(ratios)
    # Delta_{2k}(0) = b_{2k} P_{2k}^2 - 0  (odd polynomials vanish)
    delta_even = pk * p_even * p_even
    return p_even, delta_even
