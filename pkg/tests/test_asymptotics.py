import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacspec.asymptotics import (
    FLIP,
    IDENTITY,
    SKEW,
    RegimeError,
    complex_regime_min_k,
    eigen_A,
    factorize_product,
    phase_sum,
    reconstruct,
    residual_snapshots,
    rotation,
    rotation_angle,
    tail_check,
    weight_sum_constant,
)
from jacspec.recurrence import block_A
from jacspec.weights import WeightSequence

ALPHAS = (0.55, 0.6, 2.0 / 3.0, 0.75, 0.8)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_weight_sum_constant_matches_zeta(alpha):
    # independent oracle: the Euler-Maclaurin constant of sum n^-alpha is
    # the analytic continuation -zeta(alpha)
    assert weight_sum_constant(alpha) == pytest.approx(
        -float(mpmath.zeta(alpha)), abs=1e-10
    )


def test_matrix_algebra_bit_exact():
    assert np.array_equal(SKEW @ SKEW, -IDENTITY)
    assert np.array_equal(FLIP @ FLIP, IDENTITY)
    assert np.array_equal(FLIP @ SKEW, -(SKEW @ FLIP))


@given(t=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_rotation_orthogonal(t):
    r = rotation(t)
    assert np.max(np.abs(r.T @ r - IDENTITY)) < 1e-15
    assert float(r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]) == pytest.approx(1.0, abs=1e-15)


@given(
    a=st.floats(min_value=-20.0, max_value=20.0),
    b=st.floats(min_value=-20.0, max_value=20.0),
)
def test_rotation_composes(a, b):
    assert np.allclose(rotation(a) @ rotation(b), rotation(a + b), atol=1e-14)


def test_complex_regime_rejects_zero_energy():
    with pytest.raises(ValueError):
        complex_regime_min_k(WeightSequence(0.6), 0.0)


@pytest.mark.parametrize("x", [2.0, 0.5, 0.01])
def test_complex_regime_boundary_is_sharp(x):
    seq = WeightSequence(0.6)
    k_min = complex_regime_min_k(seq, x)
    data = eigen_A(seq, k_min, x)
    assert 0.0 < data.phase_plus < math.pi
    if k_min > 1:
        with pytest.raises(RegimeError):
            eigen_A(seq, k_min - 1, x)


@pytest.mark.parametrize("alpha", [0.6, 0.8])
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_eigen_identities(alpha, x):
    seq = WeightSequence(alpha)
    k_min = complex_regime_min_k(seq, x)
    for k in (k_min, k_min + 7, k_min + 1000, k_min + 65537):
        data = eigen_A(seq, k, x)
        det = float(k) ** alpha / float(k + 1) ** alpha
        # complex-conjugate pair on the circle of radius sqrt(det A_k)
        assert data.modulus**2 == pytest.approx(det, rel=1e-14)
        assert data.lambda_plus + data.lambda_minus == pytest.approx(
            data.omega, rel=1e-13
        )
        assert data.lambda_plus * data.lambda_minus == pytest.approx(det, rel=1e-13)
        # the conjugate phase is reported in (pi, 2 pi), i.e. -phase mod 2 pi
        assert data.phase_minus == 2.0 * math.pi - data.phase_plus


@pytest.mark.parametrize("alpha", [0.6, 0.8])
@pytest.mark.parametrize("x", [0.5, 2.0])
def test_eigenvector_identity(alpha, x):
    # (1, k^alpha (lambda + 1)/x) is an eigenvector of the two-step block
    seq = WeightSequence(alpha)
    k_min = complex_regime_min_k(seq, x)
    for k in (k_min, k_min + 311):
        data = eigen_A(seq, k, x)
        block = block_A(seq, k, x).astype(complex)
        for lam in (data.lambda_plus, data.lambda_minus):
            vec = np.array([1.0, float(k) ** alpha * (lam + 1.0) / x])
            residual = block @ vec - lam * vec
            assert np.max(np.abs(residual)) < 1e-12 * max(1.0, np.max(np.abs(vec)))


def test_phase_sum_residual_settles():
    seq = WeightSequence(0.6)
    _, c1 = phase_sum(seq, 1.0, 10**6)
    _, c2 = phase_sum(seq, 1.0, 2 * 10**6)
    assert abs(c2 - c1) < 1e-3


def test_phase_sum_needs_room():
    seq = WeightSequence(0.6)
    k_min = complex_regime_min_k(seq, 0.01)
    with pytest.raises(ValueError):
        phase_sum(seq, 0.01, k_min)


def test_rotation_angle_matches_direct_sum():
    seq = WeightSequence(0.75)
    k = 10**5
    direct = -0.8 * float(np.sum(np.arange(1, k + 1, dtype=np.float64) ** -0.75))
    assert rotation_angle(seq, 0.8, k) == pytest.approx(direct, rel=1e-12)


def test_factorization_reconstructs_product():
    seq = WeightSequence(0.6)
    fact = factorize_product(seq, 0.5, 10**4)
    rebuilt = reconstruct(fact, seq)
    scale = np.max(np.abs(fact.product))
    assert np.max(np.abs(rebuilt - fact.product)) < 1e-10 * scale
    det = float(
        fact.residual[0, 0] * fact.residual[1, 1]
        - fact.residual[0, 1] * fact.residual[1, 0]
    )
    assert det == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(fact.rotation.T @ fact.rotation - IDENTITY)) < 1e-12


def test_snapshots_match_single_factorizations():
    seq = WeightSequence(0.8)
    ks = [64, 512, 4096]
    snaps = residual_snapshots(seq, 1.3, ks)
    for snap in snaps:
        single = factorize_product(seq, 1.3, snap.k)
        assert snap.t_k == pytest.approx(single.t_k, rel=1e-12)
        assert np.allclose(snap.residual, single.residual, rtol=1e-10, atol=1e-12)


def test_snapshots_validate_indices():
    seq = WeightSequence(0.6)
    with pytest.raises(ValueError):
        residual_snapshots(seq, 1.0, [])
    with pytest.raises(ValueError):
        residual_snapshots(seq, 1.0, [0, 5])


def test_tail_norms_decay_at_expected_rate():
    seq = WeightSequence(0.6)
    report = tail_check(seq, 0.5)
    assert report.slope == pytest.approx(-0.4, abs=0.05)
    assert report.gamma == pytest.approx(2.0 * 0.5 * weight_sum_constant(0.6), rel=1e-12)
    assert np.all(np.diff(report.q_norms) < 0.0)
