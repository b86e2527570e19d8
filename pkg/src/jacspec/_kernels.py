"""Jitted hot loops.

The truncation indices grow like |x|**(-1/(1-alpha)) near the spectral
origin, which puts single density evaluations at 1e8..1e9 recurrence steps.
These kernels keep that affordable; everything else in the package is plain
numpy.  No fastmath: the bit-exact evenness guarantees rely on IEEE sign
symmetry of the individual operations.  nogil so a thread pool can overlap
independent x points.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_BIG = 1.0e300


@njit(cache=True, nogil=True)
def window_stats(alpha, b0, x, n_lo, n_hi):
    """Fused forward pass collecting window statistics of Delta_n.

    Returns (delta_sum, delta_min, delta_max, delta_count, amp_sum,
    amp_count) where the delta window is n in [n_lo, n_hi] and the
    amplitude window collects k**alpha * (P_{2k-1}^2 + P_{2k}^2) for the
    pairs 2k inside the same index range.
    """
    p_prev = 1.0  # P_0
    p_curr = x / b0  # P_1
    b_prev = b0
    pow_k = 1.0
    dsum = 0.0
    dmin = _BIG
    dmax = -_BIG
    dcount = 0
    asum = 0.0
    acount = 0
    k_lo = max(1, n_lo // 2)
    k_hi = n_hi // 2
    for n in range(1, n_hi + 1):
        k = (n + 1) // 2
        if n & 1:
            pow_k = float(k) ** alpha  # one pow per pair, reused at even n
        b_n = pow_k
        p_next = (x * p_curr - b_prev * p_prev) / b_n
        if n >= n_lo:
            d = b_n * p_curr * p_curr - b_prev * p_prev * p_next
            dsum += d
            if d < dmin:
                dmin = d
            if d > dmax:
                dmax = d
            dcount += 1
        if (not (n & 1)) and k >= k_lo and k <= k_hi:
            # at even n = 2k: p_prev = P_{2k-1}, p_curr = P_{2k}, b_n = k**alpha
            asum += b_n * (p_prev * p_prev + p_curr * p_curr)
            acount += 1
        p_prev = p_curr
        p_curr = p_next
        b_prev = b_n
    return dsum, dmin, dmax, dcount, asum, acount


@njit(cache=True, nogil=True)
def zero_closed_form_errors(alpha, b0, k_max):
    """Step the true recurrence at x = 0 and compare with the closed forms.

    Returns (max relative error of P_{2k}(0) vs (-1)^k b0 / k**alpha,
    max relative error of Delta_{2k}(0) vs b0^2 / k**alpha) over k <= k_max.
    """
    p_prev = 1.0
    p_curr = 0.0  # P_1(0)
    b_prev = b0
    pow_k = 1.0
    err_p = 0.0
    err_d = 0.0
    sign = 1.0
    for n in range(1, 2 * k_max + 1):
        k = (n + 1) // 2
        if n & 1:
            pow_k = float(k) ** alpha
        b_n = pow_k
        p_next = (0.0 * p_curr - b_prev * p_prev) / b_n
        if not (n & 1):
            # n = 2k just reached: p_curr = P_{2k}, p_next = P_{2k+1}
            sign = -sign
            ref_p = sign * b0 / pow_k
            e = abs(p_curr - ref_p) / abs(ref_p)
            if e > err_p:
                err_p = e
            d = b_n * p_curr * p_curr - b_prev * p_prev * p_next
            ref_d = b0 * b0 / pow_k
            e = abs(d - ref_d) / ref_d
            if e > err_d:
                err_d = e
        p_prev = p_curr
        p_curr = p_next
        b_prev = b_n
    return err_p, err_d


@njit(cache=True, nogil=True)
def block_product_snapshots(alpha, x, ks):
    """Running left product A_k ... A_1 of the two-step blocks.

    ks must be sorted ascending; returns an (len(ks), 2, 2) array with the
    raw (unscaled) product at each snapshot index.
    """
    m11 = 1.0
    m12 = 0.0
    m21 = 0.0
    m22 = 1.0
    out = np.empty((len(ks), 2, 2), dtype=np.float64)
    idx = 0
    pow_k = 1.0  # k**alpha
    for k in range(1, ks[-1] + 1):
        pow_k1 = float(k + 1) ** alpha
        xa = x / pow_k
        xb = x / pow_k1
        a11 = -1.0
        a12 = xa
        a21 = -xb
        a22 = xb * xa - pow_k / pow_k1
        # M <- A_k @ M
        n11 = a11 * m11 + a12 * m21
        n12 = a11 * m12 + a12 * m22
        n21 = a21 * m11 + a22 * m21
        n22 = a21 * m12 + a22 * m22
        m11, m12, m21, m22 = n11, n12, n21, n22
        if k == ks[idx]:
            out[idx, 0, 0] = m11
            out[idx, 0, 1] = m12
            out[idx, 1, 0] = m21
            out[idx, 1, 1] = m22
            idx += 1
            if idx == len(ks):
                break
        pow_k = pow_k1
    return out
