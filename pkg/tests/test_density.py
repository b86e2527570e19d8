import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacspec.density import (
    DensityEstimate,
    TruncationPolicy,
    amplitude_estimator,
    estimate_density,
    sweep,
)
from jacspec.recurrence import delta_stream
from jacspec.weights import WeightSequence


def _stieltjes_density(seq: WeightSequence, x: float, eps: float, depth: int) -> float:
    """Im m(x + i eps)/pi via the backward continued fraction.

    Independent of the polynomial-window estimator: no P_n, no windows,
    just the resolvent recursion m_n = 1/(-z - b_n^2 m_{n+1}) seeded deep
    in the tail, where the seed's influence has contracted away.
    """
    b = seq.array(depth)
    z = complex(x, eps)
    g = 1j
    for bn in b[::-1]:
        g = 1.0 / (-z - bn * bn * g)
    return g.imag / math.pi


def test_against_stieltjes_oracle():
    # eps-smoothing keeps a small positive bias (the embedded mass at the
    # origin contributes ~w0*eps/(pi*x^2)), so the tolerance is loose-ish
    seq = WeightSequence(0.6)
    est = estimate_density(seq, 1.0, TruncationPolicy(n_floor=10**5))
    oracle = _stieltjes_density(seq, 1.0, eps=0.01, depth=5 * 10**5)
    assert est.converged
    assert est.f == pytest.approx(oracle, rel=0.01)


def test_origin_and_nonfinite_rejected():
    seq = WeightSequence(0.6)
    with pytest.raises(ValueError):
        estimate_density(seq, 0.0)
    with pytest.raises(ValueError):
        estimate_density(seq, math.inf)


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(kappa=0.0)
    with pytest.raises(ValueError):
        TruncationPolicy(n_max=10)
    with pytest.raises(ValueError):
        TruncationPolicy(window_fraction=1.0)
    with pytest.raises(ValueError):
        TruncationPolicy(n_floor=10)


def test_truncation_index_values():
    policy = TruncationPolicy(kappa=50.0, n_max=10**8)
    # far from the origin the crossover is tiny and the floor binds
    n, capped = policy.truncation_index(0.6, 2.0)
    assert (n, capped) == (1000, False)
    # small x follows ceil(kappa * (alpha/2|x|)^(1/(1-alpha)))
    n, capped = policy.truncation_index(0.6, 0.01)
    assert not capped
    assert n == math.ceil(50.0 * (0.6 / 0.02) ** 2.5)
    # tiny x overflows the budget and reports the cap
    n, capped = policy.truncation_index(0.6, 1e-6)
    assert capped and n == 10**8
    with pytest.raises(ValueError):
        policy.truncation_index(0.6, 0.0)


@given(
    x_pair=st.tuples(
        st.floats(min_value=1e-3, max_value=3.0),
        st.floats(min_value=1e-3, max_value=3.0),
    )
)
def test_truncation_monotone_in_energy(x_pair):
    policy = TruncationPolicy()
    lo, hi = sorted(x_pair)
    n_lo, _ = policy.truncation_index(0.75, lo)
    n_hi, _ = policy.truncation_index(0.75, hi)
    assert n_lo >= n_hi


def test_amplitude_estimator_zero_energy_closed_form():
    # at x = 0 the envelope mean is exactly b0^2 * mean(k^-alpha)
    seq = WeightSequence(0.7, b0=1.5)
    got = amplitude_estimator(seq, 0.0, (100, 200))
    k = np.arange(100, 201, dtype=np.float64)
    assert got == pytest.approx(1.5**2 * float(np.mean(k**-0.7)), rel=1e-12)


def test_window_mean_matches_reference_stream():
    seq = WeightSequence(0.6, b0=1.2)
    x = 1.5
    est = estimate_density(seq, x)  # floor window [500, 1000]
    deltas = [s.delta for s in delta_stream(seq, x, 1000) if s.n >= 500]
    assert est.n_used == 1000
    assert est.delta == pytest.approx(float(np.mean(deltas)), rel=1e-12)
    assert est.spread == pytest.approx(max(deltas) - min(deltas), rel=1e-12)
    assert est.f == pytest.approx(1.0 / (math.pi * est.delta), rel=1e-15)


def test_spread_shrinks_with_window():
    # the oscillatory transient decays, so widening the window (via the
    # floor) shrinks the recorded spread roughly like N^-(1-alpha)
    seq = WeightSequence(0.6)
    spreads = [
        estimate_density(seq, 0.5, TruncationPolicy(n_floor=floor)).spread
        for floor in (1000, 4000, 16000, 64000)
    ]
    assert all(b < 0.85 * a for a, b in zip(spreads, spreads[1:]))
    assert spreads[-1] < 0.25 * spreads[0]


def test_density_stable_under_deeper_floor():
    seq = WeightSequence(0.6)
    base = estimate_density(seq, 1.0, TruncationPolicy(n_floor=1000))
    deep = estimate_density(seq, 1.0, TruncationPolicy(n_floor=10**5))
    assert base.f == pytest.approx(deep.f, rel=0.005)


def test_estimators_agree_smoke():
    est = estimate_density(WeightSequence(0.6), 1.0, TruncationPolicy(n_floor=10**5))
    assert est.amplitude_delta == pytest.approx(est.delta, rel=0.01)


def test_sweep_matches_pointwise():
    seq = WeightSequence(0.6)
    grid = [0.5, -0.5, 1.1, 2.0, 0.07]
    swept = sweep(seq, grid)
    for x, row in zip(grid, swept):
        single = estimate_density(seq, x)
        assert row.x == x
        assert row.delta == single.delta
        assert row.n_used == single.n_used
        assert (row.f == single.f) or (math.isnan(row.f) and math.isnan(single.f))


def test_sweep_shares_signed_twins():
    swept = sweep(WeightSequence(0.8), [0.3, -0.3])
    assert swept[0].f == swept[1].f
    assert swept[0].delta == swept[1].delta
    assert swept[0].x == -swept[1].x


def test_sweep_rejects_origin():
    with pytest.raises(ValueError):
        sweep(WeightSequence(0.6), [0.5, 0.0])


def test_capped_point_is_flagged():
    seq = WeightSequence(0.6)
    est = estimate_density(seq, 5e-4, TruncationPolicy(kappa=50.0, n_max=10**5))
    assert not est.converged
    assert est.n_used == 10**5


def test_estimators_agree_along_the_spectrum():
    # both estimators chase the same limit; away from the origin they land
    # within a percent of each other at the default policy
    for alpha in (0.6, 0.8):
        seq = WeightSequence(alpha)
        grid = np.concatenate([np.arange(0.5, 2.0001, 0.01), [-1.25, 2.5, 3.0]])
        for e in sweep(seq, grid):
            rel = abs(e.amplitude_delta - e.delta) / e.delta
            assert rel <= 0.01, f"alpha={alpha} x={e.x}: {rel:.4f}"


def test_limit_sequence_is_continuous_in_x():
    # the steepest stretch (x near 1.9) moves about 6% per 0.01 step, and
    # halving the spacing halves the worst jump: a slope, not a break
    for alpha in (0.6, 0.8):
        seq = WeightSequence(alpha)
        worst = {}
        for spacing in (0.01, 0.005):
            grid = np.arange(0.5, 2.0001, spacing)
            deltas = np.array([e.delta for e in sweep(seq, grid)])
            jumps = np.abs(np.diff(deltas)) / deltas[:-1]
            worst[spacing] = jumps.max()
        assert worst[0.01] < 0.08
        assert worst[0.005] < 0.6 * worst[0.01]
