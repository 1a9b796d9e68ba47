"""Scalar inequalities behind the eigenvalue bounds, with random batteries.

Every check_* function evaluates both sides of one pointwise inequality
and reports whether it holds up to a floating-point slack of 1e-12
relative to max(|lhs|, |rhs|, 1); check_max_at_one widens the scale to
its addend magnitudes because its two sides cancel exactly at the
maximizer.  The scalar arguments may be numpy arrays (broadcast
together); the exponent p is always a scalar.  These
functions are exact statements about real numbers, so the batteries in
run_battery must report zero violations; any violation is a bug either
here or in the caller's sampling constraints.

Powers with exponent zero follow the numpy convention 0**0 = 1, which is
the continuous extension used throughout (for example a**(beta-1) with
beta = 1 counts as 1 also at a = 0).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    NegativeInput,
    NegativeWeight,
    NotOnCircle,
    SameSign,
)

SLACK = 1e-12

# deterministic corner battery crossed into every random sweep
CORNERS = (0.0, 1.0, -1.0, 1e-8, -1e-8, 1e8, -1e8)
CORNER_P = (1.2, 2.0, 3.7)


def j_p(t, p: float):
    """Odd power map |t|^(p-2) t, extended by 0 at t = 0 for every p > 1."""
    if not p > 1.0:
        raise ValueError(f"j_p requires p > 1, got p={p}")
    t = np.asarray(t, dtype=float)
    out = np.sign(t) * np.abs(t) ** (p - 1.0)
    return float(out) if out.ndim == 0 else out


def _scale(lhs, rhs):
    return np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1.0)


def _ge(lhs, rhs):
    """lhs >= rhs up to relative slack."""
    return lhs >= rhs - SLACK * _scale(lhs, rhs)


def _le(lhs, rhs):
    return rhs >= lhs - SLACK * _scale(lhs, rhs)


def _finalize(lhs, rhs, holds):
    if np.ndim(lhs) == 0 and np.ndim(rhs) == 0:
        return float(lhs), float(rhs), bool(np.all(holds))
    return lhs, rhs, holds


def _safe_pow(base, expo: float):
    """base**expo with base >= 0, returning 0 where base == 0.

    Used for the singular exponents of the p < 2 regime, where the
    factor multiplying the power vanishes whenever the base does.
    """
    base = np.asarray(base, dtype=float)
    safe = np.where(base > 0.0, base, 1.0)
    return np.where(base > 0.0, safe**expo, 0.0)


@dataclass(frozen=True)
class ConvexTestFunction:
    """A C^1 convex function together with its derivative.

    Convexity is verified at construction by checking that the
    derivative is nondecreasing on a 1001-point grid.  `diff`, when
    present, evaluates value(a) - value(b) in a cancellation-free form;
    the naive difference loses every significant digit once a and b sit
    within an ulp of each other on a flat stretch of the function.
    """

    tag: str
    value: Callable = field(repr=False)
    deriv: Callable = field(repr=False)
    diff: Callable | None = field(repr=False, default=None)

    def __post_init__(self):
        grid = np.linspace(-100.0, 100.0, 1001)
        d = self.deriv(grid)
        if not np.all(np.diff(d) >= -1e-12 * np.maximum(1.0, np.abs(d[:-1]))):
            raise ValueError(f"{self.tag}: derivative is not nondecreasing")

    def value_diff(self, a, b):
        if self.diff is not None:
            return self.diff(a, b)
        return self.value(a) - self.value(b)


def smooth_abs(eps: float) -> ConvexTestFunction:
    """Smoothed absolute value (eps^2 + t^2)^(1/2)."""
    if not eps > 0:
        raise ValueError("smooth_abs needs eps > 0")

    def value(t):
        return np.sqrt(eps**2 + np.asarray(t, dtype=float) ** 2)

    def diff(a, b):
        # sqrt(eps^2+a^2) - sqrt(eps^2+b^2) via the conjugate quotient
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return (a - b) * (a + b) / (value(a) + value(b))

    return ConvexTestFunction(
        tag=f"smooth_abs({eps})",
        value=value,
        deriv=lambda t: np.asarray(t, dtype=float)
        / np.sqrt(eps**2 + np.asarray(t, dtype=float) ** 2),
        diff=diff,
    )


def square() -> ConvexTestFunction:
    return ConvexTestFunction(
        tag="square",
        value=lambda t: np.asarray(t, dtype=float) ** 2,
        deriv=lambda t: 2.0 * np.asarray(t, dtype=float),
        diff=lambda a, b: (
            np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        )
        * (np.asarray(a, dtype=float) + np.asarray(b, dtype=float)),
    )


def exp_growth() -> ConvexTestFunction:
    return ConvexTestFunction(
        tag="exp",
        value=np.exp,
        deriv=np.exp,
        diff=lambda a, b: np.exp(np.asarray(b, dtype=float))
        * np.expm1(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)),
    )


def _j_p_tau(t, tau, p: float):
    """(tau + t^2)^((p-2)/2) t, the tau-regularized odd power map."""
    t = np.asarray(t, dtype=float)
    base = tau + t * t
    return _safe_pow(base, (p - 2.0) / 2.0) * t


def check_convex_split(a, b, A, B, tau, f: ConvexTestFunction, p: float):
    """Splitting bound for convex compositions with nonnegative weights.

    j_p(a-b) [A J_{p,tau}(f'(a)) - B J_{p,tau}(f'(b))]
        >= (tau (a-b)^2 + (f(a)-f(b))^2)^((p-2)/2) (f(a)-f(b)) (A-B)

    for convex C^1 f, weights A, B >= 0 and tau >= 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(A < 0) or np.any(B < 0):
        raise NegativeWeight("weights A, B must be nonnegative")
    if np.any(tau < 0):
        raise NegativeWeight("regularization tau must be nonnegative")
    lhs = j_p(a - b, p) * (A * _j_p_tau(f.deriv(a), tau, p) - B * _j_p_tau(f.deriv(b), tau, p))
    # the fractional power amplifies roundoff in the difference, so it
    # must come from the stable path when the function provides one
    df = f.value_diff(a, b)
    base = tau * (a - b) ** 2 + df**2
    rhs = _safe_pow(base, (p - 2.0) / 2.0) * df * (A - B)
    return _finalize(lhs, rhs, _ge(lhs, rhs))


def _chain_primitive(t, beta: float, delta, cap, p: float):
    """Closed form of G(t) = int_0^t (g')^(1/p) for g = (min(t,cap)+delta)^beta."""
    tm = np.minimum(t, cap) + delta
    # beta + (p-1) and not (beta+p)-1: the latter cancels catastrophically
    # for small beta and p near 1
    q = (beta + (p - 1.0)) / p
    return beta ** (1.0 / p) / q * (tm**q - np.asarray(delta, dtype=float) ** q)


def check_power_chain(a, b, beta: float, delta, p: float, cap=np.inf, decreasing=False):
    """Chain-rule lower bound for truncated power maps.

    With g(t) = (min(t,cap)+delta)^beta increasing and G = int (g')^(1/p):

        j_p(a-b) (g(a)-g(b)) >= |G(a)-G(b)|^p,   a, b >= 0.

    With decreasing=True the mirrored variant is certified for the
    decreasing archetype g(t) = (min(t,cap)+delta)^(-beta), using
    H = int (-g')^(1/p):

        j_p(a-b) (g(b)-g(a)) >= |H(a)-H(b)|^p.

    The decreasing branch is a derived variant (stated without proof in
    the source material for this family) and requires delta > 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise NegativeInput("arguments a, b must be nonnegative")
    if not beta > 0:
        raise NegativeInput(f"exponent beta={beta} must be positive")
    if np.any(delta < 0):
        raise NegativeInput("shift delta must be nonnegative")
    am = np.minimum(a, cap) + delta
    bm = np.minimum(b, cap) + delta
    if not decreasing:
        lhs = j_p(a - b, p) * (am**beta - bm**beta)
        rhs = np.abs(_chain_primitive(a, beta, delta, cap, p) - _chain_primitive(b, beta, delta, cap, p)) ** p
        return _finalize(lhs, rhs, _ge(lhs, rhs))
    if np.any(delta <= 0):
        raise NegativeInput("decreasing variant needs delta > 0")
    lhs = j_p(a - b, p) * (bm**-beta - am**-beta)
    # H(t) = int_0^t (beta (tau+delta)^(-beta-1))^(1/p) dtau, capped at t = cap
    q = (p - beta - 1.0) / p
    tma = np.minimum(a, cap) + delta
    tmb = np.minimum(b, cap) + delta
    if abs(q) < 1e-14:
        ha = beta ** (1.0 / p) * np.log(tma / delta)
        hb = beta ** (1.0 / p) * np.log(tmb / delta)
    else:
        ha = beta ** (1.0 / p) / q * (tma**q - delta**q)
        hb = beta ** (1.0 / p) / q * (tmb**q - delta**q)
    rhs = np.abs(ha - hb) ** p
    return _finalize(lhs, rhs, _ge(lhs, rhs))


def check_power_product(a, b, beta: float, p: float):
    """Product-form power bound for nonnegative arguments and beta >= 1.

    |a-b|^p (a^(beta-1) + b^(beta-1))
        <= max(1, 3-beta) |a-b|^(p-2) (a-b) (a^beta - b^beta).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise NegativeInput("arguments a, b must be nonnegative")
    if not beta >= 1:
        raise NegativeInput(f"exponent beta={beta} must be at least 1")
    lhs = np.abs(a - b) ** p * (a ** (beta - 1.0) + b ** (beta - 1.0))
    rhs = max(1.0, 3.0 - beta) * _safe_pow(np.abs(a - b), p - 2.0) * (a - b) * (
        a**beta - b**beta
    )
    return _finalize(lhs, rhs, _le(lhs, rhs))


def check_chain_constant(beta: float, p: float):
    """The chain-rule constant (1/beta)^(1/p) (beta+p-1)/p is at least 1."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise NegativeInput(f"beta={beta} must be positive")
    if not p >= 1:
        raise ValueError(f"p={p} must be at least 1")
    value = (1.0 / beta) ** (1.0 / p) * (beta + (p - 1.0)) / p
    holds = value >= 1.0 - SLACK
    if value.ndim == 0:
        return float(value), bool(holds)
    return value, holds


def _max_at_one_parts(U, V, t, p: float):
    jw = j_p(U - V, p)
    first = np.abs(U - t * V) ** p
    second = jw * V * np.abs(t) ** p
    g_t = first + second
    g_1 = jw * U
    # the two addends of g(t) cancel exactly at the maximizer t = 1, so
    # the computable resolution of g(t) is set by the addend magnitudes
    scale = np.maximum(
        np.maximum(np.abs(first), np.abs(second)),
        np.maximum(np.abs(g_1), 1.0),
    )
    return g_t, g_1, scale


def check_max_at_one(U, V, t, p: float):
    """The family |U-tV|^p + j_p(U-V) V |t|^p peaks at t = 1 when UV <= 0.

    Returns (g(t), g(1), holds) with g(1) = j_p(U-V) U.  Unlike the
    other checks, the slack is relative to the addends of g(t) rather
    than to the two sides: the addends cancel exactly at t = 1, and
    their rounding residue is the finest resolution at which g(t) - g(1)
    exists in floating point at all.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(U * V > 0):
        raise SameSign("requires U * V <= 0")
    g_t, g_1, scale = _max_at_one_parts(U, V, t, p)
    return _finalize(g_t, g_1, g_t <= g_1 + SLACK * scale)


def check_opposite_sign_bound(a, b, p: float):
    """Two-branch lower bound for j_p(a-b) a when a b <= 0.

    For 1 < p <= 2 the bound is |a|^p - (p-1) |a-b|^(p-2) a b, and for
    p > 2 it is |a|^p - (p-1) |a|^(p-2) a b.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a * b > 0):
        raise SameSign("requires a * b <= 0")
    lhs = j_p(a - b, p) * a
    if p <= 2.0:
        corr = (p - 1.0) * _safe_pow(np.abs(a - b), p - 2.0) * a * b
    else:
        corr = (p - 1.0) * np.abs(a) ** (p - 2.0) * a * b
    rhs = np.abs(a) ** p - corr
    return _finalize(lhs, rhs, _ge(lhs, rhs))


def check_power_triangle(a, b, p: float, c_p: float):
    """|a-b|^p <= |a|^p + |b|^p + c_p (a^2+b^2)^((p-2)/2) |ab|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lhs = np.abs(a - b) ** p
    cross = _safe_pow(a * a + b * b, (p - 2.0) / 2.0) * np.abs(a * b)
    rhs = np.abs(a) ** p + np.abs(b) ** p + c_p * cross
    return _finalize(lhs, rhs, _le(lhs, rhs))


def _triangle_ratio(m, p: float):
    m = np.asarray(m, dtype=float)
    return ((1.0 + m) ** p - 1.0 - m**p) / (m * (1.0 + m * m) ** ((p - 2.0) / 2.0))


def estimate_triangle_constant(p: float) -> float:
    """Numerical constant c_p for check_power_triangle.

    Maximizes the extremal ratio ((1+m)^p - 1 - m^p) / (m (1+m^2)^((p-2)/2))
    over a 10^4-point logarithmic grid on [1e-6, 1e6], refines around the
    argmax with a bounded scalar search, and pads the maximum by 0.1%.
    Both endpoint limits of the ratio equal p; for p < 2 the supremum is
    reached only in those limits, so the constant is floored at p before
    padding.
    """
    if not p > 1:
        raise ValueError(f"p={p} must exceed 1")
    grid = np.logspace(-6.0, 6.0, 10000)
    vals = _triangle_ratio(grid, p)
    i = int(np.argmax(vals))
    lo = np.log(grid[max(i - 1, 0)])
    hi = np.log(grid[min(i + 1, grid.size - 1)])
    best = float(vals[i])
    res = minimize_scalar(
        lambda x: -_triangle_ratio(np.exp(x), p),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best = max(best, float(-res.fun), p)
    return 1.001 * best


def check_monotonicity_gap(a, b, p: float):
    """Quantified monotonicity of j_p.

    For 1 < p <= 2:  (a^2+b^2)^((2-p)/2) (j_p(b)-j_p(a)) (b-a)
                         >= (p-1) (b-a)^2.
    For p > 2:       (j_p(b)-j_p(a)) (b-a) >= 2^(2-p) |b-a|^p.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    prod = (j_p(b, p) - j_p(a, p)) * (b - a)
    if p <= 2.0:
        lhs = (a * a + b * b) ** ((2.0 - p) / 2.0) * prod
        rhs = (p - 1.0) * (b - a) ** 2
    else:
        lhs = prod
        rhs = 2.0 ** (2.0 - p) * np.abs(b - a) ** p
    return _finalize(lhs, rhs, _ge(lhs, rhs))


def check_circle_bound(U, V, omega, p: float):
    """Direction-split lower bound behind the odd-loop eigenvalue bound.

    For U V <= 0 and (w1, w2) on the unit circle:

        j_p(w1 U - w1 V) w1 U - j_p(w2 U - w2 V) w2 V >= |w1 U - w2 V|^p.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    w1 = np.asarray(omega[0], dtype=float)
    w2 = np.asarray(omega[1], dtype=float)
    if np.any(np.abs(w1 * w1 + w2 * w2 - 1.0) > 1e-9):
        raise NotOnCircle("omega must lie on the unit circle")
    if np.any(U * V > 0):
        raise SameSign("requires U * V <= 0")
    lhs = j_p(w1 * (U - V), p) * w1 * U - j_p(w2 * (U - V), p) * w2 * V
    rhs = np.abs(w1 * U - w2 * V) ** p
    return _finalize(lhs, rhs, _ge(lhs, rhs))


def check_jp_monotone(a, b, p: float):
    """(j_p(a) - j_p(b)) (a - b) >= 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lhs = (j_p(a, p) - j_p(b, p)) * (a - b)
    rhs = np.zeros_like(lhs)
    return _finalize(lhs, rhs, _ge(lhs, rhs))


# ---------------------------------------------------------------------------
# randomized batteries


@dataclass
class CheckSummary:
    check: str
    samples: int
    violations: int
    worst_slack: float


def _magnitudes(rng, size):
    """Heavy-tailed positive magnitudes, log-uniform over [1e-8, 1e8]."""
    return 10.0 ** rng.uniform(-8.0, 8.0, size=size)


def _signed(rng, size):
    return _magnitudes(rng, size) * rng.choice([-1.0, 1.0], size=size)


def _opposite_pairs(rng, size):
    """(U, V) with U * V <= 0, zeros included."""
    mag_u = _magnitudes(rng, size)
    mag_v = _magnitudes(rng, size)
    sign = rng.choice([-1.0, 1.0], size=size)
    u = sign * mag_u
    v = -sign * mag_v
    zero = rng.random(size)
    u[zero < 0.05] = 0.0
    v[zero > 0.95] = 0.0
    return u, v


def _p_values(rng, size):
    return rng.uniform(1.05, 5.0, size=size)


def _corner_pairs():
    c = np.array(CORNERS)
    a, b = np.meshgrid(c, c, indexing="ij")
    return a.ravel(), b.ravel()


def _signed_slack(lhs, rhs, direction):
    """Positive values approach violation; > SLACK is a violation."""
    lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    if direction == "ge":
        return (rhs - lhs) / _scale(lhs, rhs)
    return (lhs - rhs) / _scale(lhs, rhs)


def _ge_slack(result):
    lhs, rhs, _ = result
    return _signed_slack(lhs, rhs, "ge")


def _le_slack(result):
    lhs, rhs, _ = result
    return _signed_slack(lhs, rhs, "le")


class _Battery:
    """One named sweep: a sampler plus a corner enumeration.

    Both callables return signed slack arrays normalized the same way
    the check's holds flag is; a value above SLACK is a violation.
    """

    def __init__(self, name, sample_fn, corner_fn):
        self.name = name
        self.sample_fn = sample_fn
        self.corner_fn = corner_fn

    # modest chunk so the per-chunk exponent draw covers many p values
    def run(self, samples: int, seed: int, chunk: int = 25_000) -> CheckSummary:
        rng = np.random.default_rng([seed, zlib.crc32(self.name.encode())])
        done = 0
        total = 0
        violations = 0
        worst = -np.inf
        while done < samples:
            m = min(chunk, samples - done)
            slack = np.atleast_1d(self.sample_fn(rng, m))
            violations += int(np.count_nonzero(slack > SLACK))
            worst = max(worst, float(slack.max()))
            total += slack.size
            done += m
        for slack in self.corner_fn():
            slack = np.atleast_1d(slack)
            violations += int(np.count_nonzero(slack > SLACK))
            worst = max(worst, float(slack.max()))
            total += slack.size
        return CheckSummary(
            check=self.name, samples=total, violations=violations, worst_slack=worst
        )


def _battery_jp_monotone(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    return _ge_slack(check_jp_monotone(_signed(rng, m), _signed(rng, m), p))


def _corners_jp_monotone():
    a, b = _corner_pairs()
    return [_ge_slack(check_jp_monotone(a, b, p)) for p in CORNER_P]


def _battery_convex_split(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    f = smooth_abs(0.1)
    A = _magnitudes(rng, m)
    B = _magnitudes(rng, m)
    tau = _magnitudes(rng, m)
    tau[rng.random(m) < 0.1] = 0.0
    return _ge_slack(
        check_convex_split(_signed(rng, m), _signed(rng, m), A, B, tau, f, p)
    )


def _corners_convex_split():
    f = smooth_abs(0.1)
    a, b = _corner_pairs()
    nonneg = np.array([0.0, 1.0, 1e-8, 1e8])
    out = []
    for p in CORNER_P:
        for A in nonneg:
            for B in nonneg:
                for tau in nonneg:
                    out.append(_ge_slack(check_convex_split(a, b, A, B, tau, f, p)))
    return out


def _battery_power_chain(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    beta = float(rng.uniform(1.0, 5.0))
    delta = float(rng.uniform(0.0, 1.0))
    cap = float(_magnitudes(rng, 1)[0]) if rng.random() < 0.5 else np.inf
    return _ge_slack(
        check_power_chain(_magnitudes(rng, m), _magnitudes(rng, m), beta, delta, p, cap=cap)
    )


def _corners_power_chain():
    nonneg = np.array([0.0, 1.0, 1e-8, 1e8])
    a, b = np.meshgrid(nonneg, nonneg, indexing="ij")
    a, b = a.ravel(), b.ravel()
    out = []
    for p in CORNER_P:
        for beta in (1.0, 2.0, 5.0):
            for delta in (0.0, 0.5, 1.0):
                for cap in (np.inf, 1.0):
                    out.append(
                        _ge_slack(check_power_chain(a, b, beta, delta, p, cap=cap))
                    )
    return out


def _battery_power_product(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    beta = float(rng.uniform(1.0, 6.0))
    return _le_slack(
        check_power_product(_magnitudes(rng, m), _magnitudes(rng, m), beta, p)
    )


def _corners_power_product():
    nonneg = np.array([0.0, 1.0, 1e-8, 1e8])
    a, b = np.meshgrid(nonneg, nonneg, indexing="ij")
    a, b = a.ravel(), b.ravel()
    return [
        _le_slack(check_power_product(a, b, beta, p))
        for p in CORNER_P
        for beta in (1.0, 2.0, 6.0)
    ]


def _battery_chain_constant(rng, m):
    p = float(rng.uniform(1.0, 5.0))
    beta = _magnitudes(rng, m)
    value, _ = check_chain_constant(beta, p)
    return _signed_slack(value, np.ones_like(value), "ge")


def _corners_chain_constant():
    out = []
    for p in (1.0,) + CORNER_P:
        for beta in (1e-8, 1.0, 1e8):
            value, _ = check_chain_constant(beta, p)
            out.append(_signed_slack(value, 1.0, "ge"))
    return out


def _max_at_one_slack(U, V, t, p):
    g_t, g_1, scale = _max_at_one_parts(
        np.asarray(U, dtype=float),
        np.asarray(V, dtype=float),
        np.asarray(t, dtype=float),
        p,
    )
    return np.atleast_1d((g_t - g_1) / scale)


def _battery_max_at_one(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    u, v = _opposite_pairs(rng, m)
    t = rng.uniform(-10.0, 10.0, size=m)
    return _max_at_one_slack(u, v, t, p)


def _corners_max_at_one():
    a, b = _corner_pairs()
    keep = a * b <= 0
    a, b = a[keep], b[keep]
    return [
        _max_at_one_slack(a, b, t, p)
        for p in CORNER_P
        for t in (-10.0, -1.0, 0.0, 1e-8, 1.0, 10.0)
    ]


def _battery_opposite_sign(rng, m):
    p = float(rng.choice([1.2, 2.0, 3.7]))
    a, b = _opposite_pairs(rng, m)
    return _ge_slack(check_opposite_sign_bound(a, b, p))


def _corners_opposite_sign():
    a, b = _corner_pairs()
    keep = a * b <= 0
    a, b = a[keep], b[keep]
    return [_ge_slack(check_opposite_sign_bound(a, b, p)) for p in CORNER_P]


_TRIANGLE_P = (1.1, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
_triangle_constants: dict = {}


def _battery_power_triangle(rng, m):
    p = float(rng.choice(_TRIANGLE_P))
    if p not in _triangle_constants:
        _triangle_constants[p] = estimate_triangle_constant(p)
    return _le_slack(
        check_power_triangle(_signed(rng, m), _signed(rng, m), p, _triangle_constants[p])
    )


def _corners_power_triangle():
    a, b = _corner_pairs()
    out = []
    for p in CORNER_P:
        if p not in _triangle_constants:
            _triangle_constants[p] = estimate_triangle_constant(p)
        out.append(_le_slack(check_power_triangle(a, b, p, _triangle_constants[p])))
    return out


def _battery_monotonicity_gap(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    return _ge_slack(check_monotonicity_gap(_signed(rng, m), _signed(rng, m), p))


def _corners_monotonicity_gap():
    a, b = _corner_pairs()
    return [_ge_slack(check_monotonicity_gap(a, b, p)) for p in CORNER_P]


def _battery_circle_bound(rng, m):
    p = float(rng.uniform(1.05, 5.0))
    u, v = _opposite_pairs(rng, m)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=m)
    return _ge_slack(check_circle_bound(u, v, (np.cos(theta), np.sin(theta)), p))


def _corners_circle_bound():
    a, b = _corner_pairs()
    keep = a * b <= 0
    a, b = a[keep], b[keep]
    angles = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75]) * np.pi
    angles = np.append(angles, 0.3)
    return [
        _ge_slack(check_circle_bound(a, b, (np.cos(t), np.sin(t)), p))
        for p in CORNER_P
        for t in angles
    ]


BATTERIES = (
    _Battery("jp_monotone", _battery_jp_monotone, _corners_jp_monotone),
    _Battery("convex_split", _battery_convex_split, _corners_convex_split),
    _Battery("power_chain", _battery_power_chain, _corners_power_chain),
    _Battery("power_product", _battery_power_product, _corners_power_product),
    _Battery("chain_constant", _battery_chain_constant, _corners_chain_constant),
    _Battery("max_at_one", _battery_max_at_one, _corners_max_at_one),
    _Battery("opposite_sign_bound", _battery_opposite_sign, _corners_opposite_sign),
    _Battery("power_triangle", _battery_power_triangle, _corners_power_triangle),
    _Battery("monotonicity_gap", _battery_monotonicity_gap, _corners_monotonicity_gap),
    _Battery("circle_bound", _battery_circle_bound, _corners_circle_bound),
)


def run_battery(samples: int = 1_000_000, seed: int = 0):
    """Run every battery and return one CheckSummary per check."""
    return [b.run(samples, seed) for b in BATTERIES]
