"""Continuous analogue of the residual-factor recursion.

Replacing the residual increments G_{k+1} - G_k by a derivative turns the
discrete product into the matrix ODE

    dG/dn = (alpha/(2n)) [[cos th, sin th], [sin th, -cos th]] G,
    th(n) = beta n**s + gamma,

whose coefficients oscillate with the slowly spreading phase th.  Two
scalar integrals control everything:

    integral_c(n) = (alpha/2) * int_1^n cos(th(t))/t dt,
    integral_s(n) = (alpha/2) * int_1^n sin(th(t))/t dt,

both convergent as n -> infinity (Dirichlet).  Freezing the hyperbolic
direction matrix built from integral_c at its limit makes the equation
exactly solvable by the matrix exponential of that direction, which gives
the closed-form limit used for the small-x scaling law; the governing
scalar equation near n = infinity has Frobenius exponents p1 >= 0 > p2
depending only on alpha and gamma.

Note on symbols: gamma's additive constant (phase_c below) is the constant
term of the weight partial sums from asymptotics.weight_sum_constant; it is
distinct from integral_c above, and the two are never interchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import weight_sum_constant
from .oscillatory import DivergentIntegralError, cos_over_y, sin_over_y
from .recurrence import Mat2, mat2
from .weights import WeightSequence

_IDENT = np.eye(2)


@dataclass(frozen=True)
class OscillatoryParams:
    """Phase data th(n) = beta * n**s + gamma of the oscillating coefficients."""

    alpha: float
    x: float
    beta: float  # -2x/(1-alpha)
    s: float  # 1-alpha, in (0, 1/2)
    gamma: float  # 2x * phase_c

    def __post_init__(self):
        if not (0.0 < self.s < 0.5):
            raise ValueError(f"phase growth exponent must lie in (0, 1/2), got {self.s}")
        if (self.beta == 0.0) != (self.x == 0.0):
            raise ValueError("beta must vanish exactly when x does")

    @classmethod
    def for_weights(
        cls, seq: WeightSequence, x: float, phase_c: float | None = None
    ) -> "OscillatoryParams":
        """Parameters at energy x; phase_c defaults to the partial-sum constant."""
        s = 1.0 - seq.alpha
        if phase_c is None:
            phase_c = weight_sum_constant(seq.alpha)
        return cls(alpha=seq.alpha, x=x, beta=-2.0 * x / s, s=s, gamma=2.0 * x * phase_c)

    def theta(self, n):
        return self.beta * np.asarray(n, dtype=np.float64) ** self.s + self.gamma


# ---- the two scalar oscillatory integrals ----


def oscillatory_integral(
    kind: str,
    params: OscillatoryParams,
    lower: float,
    upper: float,
    tol: float = 1e-10,
) -> float:
    """(alpha/2) * integral of trig(beta t**s + gamma)/t over [lower, upper].

    upper may be math.inf when beta != 0 (Dirichlet-convergent after the
    y = |beta| t**s substitution); with beta = 0 the integrand is a constant
    over t and the infinite integral diverges.
    """
    if kind not in ("cos", "sin"):
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")
    if lower < 1.0:
        raise ValueError(f"lower limit must be >= 1, got {lower}")
    if upper < lower:
        raise ValueError("upper limit must be >= lower limit")
    if upper == lower:
        return 0.0
    alpha, beta, s, gamma = params.alpha, params.beta, params.s, params.gamma

    if beta == 0.0:
        if math.isinf(upper):
            raise DivergentIntegralError(
                "constant-phase integrand trig(gamma)/t has a divergent infinite integral"
            )
        trig = math.cos(gamma) if kind == "cos" else math.sin(gamma)
        return 0.5 * alpha * trig * math.log(upper / lower)

    # y = |beta| t**s maps the integral to trig(y + sgn*gamma)/y over y-space
    sgn = 1.0 if beta > 0 else -1.0
    y_lo = abs(beta) * lower**s
    y_hi = math.inf if math.isinf(upper) else abs(beta) * upper**s
    coef = 0.5 * alpha / s
    if kind == "cos":
        return coef * cos_over_y(y_lo, y_hi, sgn * gamma, tol)
    return sgn * coef * sin_over_y(y_lo, y_hi, sgn * gamma, tol)


def w_matrix(integral_c: float) -> Mat2:
    """Hyperbolic direction [[0, e^(-2c)], [e^(2c), 0]]; squares to identity."""
    return mat2(0.0, math.exp(-2.0 * integral_c), math.exp(2.0 * integral_c), 0.0)


# ---- adaptive Dormand-Prince 5(4) integrator ----


class IntegrationError(RuntimeError):
    """Step size underflowed; last_n is the last position reached."""

    def __init__(self, last_n: float, detail: str):
        self.last_n = last_n
        super().__init__(f"{detail} (integration stalled at n = {last_n:.6g})")


_DP_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
# 5th-order minus embedded 4th-order weights, applied to the 7 stages
_DP_ERR = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_STEP_FLOOR = 1e-12  # times n, per the 1/n coefficient decay
_MAX_STEPS = 20_000_000


def _dp45(f, n0: float, n1: float, y0: np.ndarray, tol: float) -> np.ndarray:
    """Adaptive 5(4) pair with FSAL, local error controlled at tol."""
    y = np.asarray(y0, dtype=np.float64).copy()
    n = n0
    k1 = f(n, y)
    h = min(n1 - n0, 0.05 * (1.0 + n0))
    stages = [k1] + [None] * 6
    for _ in range(_MAX_STEPS):
        if n >= n1:
            return y
        h = min(h, n1 - n)
        if h < _STEP_FLOOR * max(n, 1.0):
            raise IntegrationError(n, f"step {h:.3e} under the floor")
        for i in range(6):
            yi = y.copy()
            for j, a in enumerate(_DP_A[i]):
                if a != 0.0:
                    yi += (h * a) * stages[j]
            stages[i + 1] = f(n + _DP_C[i] * h, yi)
        y_new = y + h * (
            _DP_A[5][0] * stages[0]
            + _DP_A[5][2] * stages[2]
            + _DP_A[5][3] * stages[3]
            + _DP_A[5][4] * stages[4]
            + _DP_A[5][5] * stages[5]
        )
        err_vec = h * sum(e * k for e, k in zip(_DP_ERR, stages) if e != 0.0)
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            n += h
            y = y_new
            stages[0] = stages[6]  # FSAL: last stage is f at the accepted point
        # on rejection stages[0] is still f at (n, y); only retry with smaller h
        factor = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
    raise IntegrationError(n, f"exceeded {_MAX_STEPS} steps")


def integrate_matrix_ode(
    which: str,
    params: OscillatoryParams,
    n_start: float,
    n_end: float,
    init: Mat2,
    tol: float = 1e-9,
) -> Mat2:
    """Integrate one of the three coefficient flows from n_start to n_end.

    G_equation: the full oscillating-coefficient equation for the residual
    factor.  V_equation: the same flow after splitting off the hyperbolic
    direction built from the running cos-integral (the direction matrix
    moves with n; the running integral is carried as an extra state
    component).  V_const_W: the direction frozen at its n = infinity limit,
    which admits the exponential closed form e^{(s(end)-s(start)) W} init.
    """
    if n_start < 1.0:
        raise ValueError(f"n_start must be >= 1, got {n_start}")
    if n_end < n_start:
        raise ValueError("n_end must be >= n_start")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (2, 2):
        raise ValueError("init must be a 2x2 matrix")
    if n_end == n_start:
        return init.copy()
    alpha = params.alpha

    if which == "G_equation":

        def rhs(n, y):
            th = params.theta(n)
            c, s = math.cos(th), math.sin(th)
            g = y.reshape(2, 2)
            return (0.5 * alpha / n) * (mat2(c, s, s, -c) @ g).reshape(4)

        return _dp45(rhs, n_start, n_end, init.reshape(4), tol).reshape(2, 2)

    if which == "V_equation":
        # state = (V flattened, running cos-integral); the direction matrix
        # is rebuilt from the running integral at every evaluation
        c0 = oscillatory_integral("cos", params, 1.0, n_start, tol=min(tol, 1e-10))

        def rhs(n, y):
            th = params.theta(n)
            v = y[:4].reshape(2, 2)
            coef = 0.5 * alpha / n
            dv = (coef * math.sin(th)) * (w_matrix(y[4]) @ v)
            out = np.empty(5)
            out[:4] = dv.reshape(4)
            out[4] = coef * math.cos(th)
            return out

        y0 = np.empty(5)
        y0[:4] = init.reshape(4)
        y0[4] = c0
        return _dp45(rhs, n_start, n_end, y0, tol)[:4].reshape(2, 2)

    if which == "V_const_W":
        w_lim = w_matrix(oscillatory_integral("cos", params, 1.0, math.inf, tol=min(tol, 1e-10)))

        def rhs(n, y):
            th = params.theta(n)
            v = y.reshape(2, 2)
            return (0.5 * alpha / n * math.sin(th)) * (w_lim @ v).reshape(4)

        return _dp45(rhs, n_start, n_end, init.reshape(4), tol).reshape(2, 2)

    raise ValueError(f"unknown equation {which!r}")


# ---- closed-form limit and governing exponents ----


@dataclass(frozen=True)
class ClosedFormLimit:
    c_inf: float  # limit of the cos-integral
    s_inf: float  # limit of the sin-integral
    W: Mat2  # hyperbolic direction at c_inf; W @ W = identity
    Z: Mat2  # diag(e^c, e^-c)
    G_limit: Mat2  # Z (cosh s_inf E + sinh s_inf W) V1


def closed_form_limit(
    params: OscillatoryParams, V1: Mat2 | None = None, tol: float = 1e-10
) -> ClosedFormLimit:
    """Exact limit of the frozen-direction flow started from V1."""
    if params.x == 0.0:
        raise ValueError("the closed-form limit needs x != 0")
    if V1 is None:
        V1 = _IDENT
    V1 = np.asarray(V1, dtype=np.float64)
    c_inf = oscillatory_integral("cos", params, 1.0, math.inf, tol)
    s_inf = oscillatory_integral("sin", params, 1.0, math.inf, tol)
    w = w_matrix(c_inf)
    z = mat2(math.exp(c_inf), 0.0, 0.0, math.exp(-c_inf))
    exp_sw = math.cosh(s_inf) * _IDENT + math.sinh(s_inf) * w
    return ClosedFormLimit(c_inf=c_inf, s_inf=s_inf, W=w, Z=z, G_limit=z @ exp_sw @ V1)


@dataclass(frozen=True)
class FrobeniusExponents:
    p1: float  # alpha (1 - cos gamma)/(2s) >= 0
    p2: float  # -alpha (1 + cos gamma)/(2s) < 0

    def quadratic(self, p: float, alpha: float, s: float, gamma: float) -> float:
        """Governing quadratic p^2 + (alpha cos gamma / s) p - (alpha sin gamma / 2s)^2."""
        cg = math.cos(gamma)
        sg = math.sin(gamma)
        return p * p + (alpha * cg / s) * p - (alpha * sg / (2.0 * s)) ** 2


def frobenius_exponents(params: OscillatoryParams) -> FrobeniusExponents:
    """Indicial exponents of the governing scalar equation at n = infinity."""
    cg = math.cos(params.gamma)
    half = 0.5 * params.alpha / params.s
    return FrobeniusExponents(p1=half * (1.0 - cg), p2=-half * (1.0 + cg))


# ---- discrete product vs continuum flow ----


@dataclass(frozen=True)
class ComparisonRecord:
    x: float
    k_start: int
    k_end: int
    g_discrete: Mat2  # exact residual factor at k_end
    g_ode: Mat2  # flow solution at k_end started from the exact k_start state
    discrete_growth: float  # first-column norm ratio k_end vs k_start
    ode_growth: float
    first_col_signs_match: bool


def _first_col_norm(m: Mat2) -> float:
    return math.hypot(float(m[0, 0]), float(m[1, 0]))


def discrete_vs_continuum(
    seq: WeightSequence,
    x: float,
    k_end: int,
    k_start: int = 1000,
    tol: float = 1e-9,
    phase_c: float | None = None,
) -> ComparisonRecord:
    """Exact residual factor against the ODE run from the same early state."""
    from .asymptotics import residual_snapshots

    if x == 0.0:
        raise ValueError("comparison needs x != 0")
    if not 1 <= k_start < k_end:
        raise ValueError(f"need 1 <= k_start < k_end, got {k_start}, {k_end}")
    early, late = residual_snapshots(seq, x, [k_start, k_end])
    params = OscillatoryParams.for_weights(seq, x, phase_c)
    g_ode = integrate_matrix_ode(
        "G_equation", params, float(k_start), float(k_end), early.residual, tol
    )
    g_disc = late.residual
    base = _first_col_norm(early.residual)
    signs = bool(
        np.all(np.sign(g_disc[:, 0]) == np.sign(g_ode[:, 0]))
        | np.all(np.sign(g_disc[:, 0]) == -np.sign(g_ode[:, 0]))
    )
    return ComparisonRecord(
        x=x,
        k_start=k_start,
        k_end=int(k_end),
        g_discrete=g_disc,
        g_ode=g_ode,
        discrete_growth=_first_col_norm(g_disc) / base,
        ode_growth=_first_col_norm(g_ode) / base,
        first_col_signs_match=signs,
    )


@dataclass(frozen=True)
class ScalingComparison:
    xs: np.ndarray
    discrete_norms: np.ndarray  # first-column norms of the exact factor at k_end
    ode_norms: np.ndarray
    discrete_slope: float  # d log norm / d log x, expected -alpha/(2(1-alpha))
    ode_slope: float
    k_start: int
    k_end: int


def scaling_ladder(
    seq: WeightSequence,
    xs,
    k_end: int,
    k_start: int = 1000,
    tol: float = 1e-9,
) -> ScalingComparison:
    """Small-x growth exponents of the discrete and continuum factors."""
    xs = np.asarray(sorted(float(v) for v in xs), dtype=np.float64)
    if len(xs) < 3 or xs[0] <= 0.0:
        raise ValueError("need at least 3 positive ladder points")
    dn = np.empty(len(xs))
    on = np.empty(len(xs))
    for i, x in enumerate(xs):
        rec = discrete_vs_continuum(seq, float(x), k_end, k_start, tol)
        dn[i] = _first_col_norm(rec.g_discrete)
        on[i] = _first_col_norm(rec.g_ode)
    lx = np.log(xs)
    return ScalingComparison(
        xs=xs,
        discrete_norms=dn,
        ode_norms=on,
        discrete_slope=float(np.polyfit(lx, np.log(dn), 1)[0]),
        ode_slope=float(np.polyfit(lx, np.log(on), 1)[0]),
        k_start=k_start,
        k_end=int(k_end),
    )
