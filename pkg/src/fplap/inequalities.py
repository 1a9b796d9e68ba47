"""Spectral and functional inequality checks on computed eigenpairs.

Shape comparisons (first eigenvalue against the equal-measure interval,
second eigenvalue against the half-measure interval, and the two-ball
separation sweep) solve every reference problem numerically at the same
lattice spacing, so the leading discretization error cancels between the
two sides.  The localized Poincare and Sobolev checks evaluate both
sides of their inequality by direct lattice sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import LatticeDomain, Params, build_lattice, interval, intervals
from .energy import UNIT_BALL_VOLUME, assemble_kernel, lp_norm
from .eigensolver import EigenResult, SolverOptions, solve_lambda1, solve_lambda2_path
from .errors import (
    DimensionMismatch,
    EmptyZeroSet,
    ExponentOutOfRange,
    OverlappingBalls,
)

_CHUNK = 128


@dataclass(frozen=True)
class FKReport:
    """First eigenvalue against the equal-measure interval."""

    lambda1: float
    ball_bound: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.lambda1 - self.ball_bound


@dataclass(frozen=True)
class HKSReport:
    """Second eigenvalue against the scaled half-measure interval bound."""

    lambda2: float
    scaled_bound: float
    strict: bool
    margin: float


@dataclass(frozen=True)
class SweepRow:
    distance: float
    lambda2_union: float
    lambda1_ball: float
    scaled_bound: float
    gap: float


@dataclass(frozen=True)
class PoincareReport:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class SobolevReport:
    norm_term: float
    seminorm: float
    ratio: float


@dataclass(frozen=True)
class LinfReport:
    lhs: float
    rhs: float
    holds: bool


def faber_krahn_check(
    dom: LatticeDomain,
    params: Params,
    opts: SolverOptions,
    trunc_factor: float = 4.0,
    tol: float = 0.02,
) -> FKReport:
    """Check that the interval of equal measure minimizes lambda1.

    Solves the first eigenvalue on ``dom`` and on the single interval
    (0, measure(dom)) at the same spacing; the interval realizes exactly
    the same node count, so both solves carry the same leading
    quadrature error.  holds is the bound up to the discretization
    slack ``tol``; a single-interval input reproduces the equality case
    with margin O(tol).

    Parameters
    ----------
    dom : LatticeDomain
        One-dimensional lattice domain.
    params, opts : Params, SolverOptions
    trunc_factor : float
        Exterior truncation passed to kernel assembly for both solves.
    tol : float
        Relative slack on the bound.

    Raises
    ------
    DimensionMismatch
        If params.dim != 1; the reference shape is an interval.
    """
    if params.dim != 1:
        raise DimensionMismatch(
            f"equal-measure comparison needs dim = 1, got {params.dim}"
        )
    K = assemble_kernel(dom, params, trunc_factor)
    lam = solve_lambda1(K, opts).lam
    ball_dom = build_lattice(interval(0.0, dom.h * dom.n), dom.h, params)
    lam_ball = solve_lambda1(assemble_kernel(ball_dom, params, trunc_factor), opts).lam
    return FKReport(
        lambda1=lam,
        ball_bound=lam_ball,
        holds=lam >= lam_ball * (1.0 - tol),
    )


def hks_check(
    dom: LatticeDomain,
    params: Params,
    opts: SolverOptions,
    trunc_factor: float = 4.0,
) -> HKSReport:
    """Second eigenvalue against its half-measure interval lower bound.

    Computes lambda2 on ``dom`` and lambda1 on the interval of measure
    measure(dom)/2 at the same spacing, scaled by
    (2|B|/|Omega|)^(sp/N) with both measures taken as realized on the
    lattice (so an even node count makes the factor exactly one).
    margin is the raw difference lambda2 - scaled_bound and strict is
    its positivity; callers comparing against the bound at acceptance
    resolutions apply their own discretization slack.
    """
    if params.dim != 1:
        raise DimensionMismatch(
            f"half-measure comparison needs dim = 1, got {params.dim}"
        )
    K = assemble_kernel(dom, params, trunc_factor)
    r1 = solve_lambda1(K, opts)
    lam2 = solve_lambda2_path(K, r1.u, opts).lam
    half_dom = build_lattice(interval(0.0, dom.h * (dom.n // 2)), dom.h, params)
    lam1_half = solve_lambda1(
        assemble_kernel(half_dom, params, trunc_factor), opts
    ).lam
    sp = params.s * params.p
    factor = (2.0 * half_dom.n / dom.n) ** (sp / params.dim)
    bound = factor * lam1_half
    margin = lam2 - bound
    return HKSReport(
        lambda2=lam2, scaled_bound=bound, strict=margin > 0.0, margin=margin
    )


def hks_sweep(
    R: float,
    distances: Sequence[float],
    params: Params,
    opts: SolverOptions,
    h: float,
    trunc_factor: float = 4.0,
) -> list[SweepRow]:
    """Separation sweep for the two-ball sharpness construction.

    For each center distance d builds the union of two radius-R
    intervals (0, 2R) and (d, d + 2R), computes its second eigenvalue,
    and pairs it with the first eigenvalue of the single interval,
    solved once.  The gap column decays toward zero as the pieces
    separate; it stays strictly positive at every finite distance.

    Parameters
    ----------
    R : float
        Ball radius; each piece is an interval of length 2R.
    distances : sequence of float
        Center distances, strictly increasing, each > 2R.
    params, opts, h, trunc_factor
        Forwarded to lattice construction and kernel assembly.

    Raises
    ------
    OverlappingBalls
        If some distance is at most 2R.
    """
    if params.dim != 1:
        raise DimensionMismatch(f"sweep needs dim = 1, got {params.dim}")
    if not R > 0:
        raise ValueError(f"ball radius R={R} must be positive")
    ds = [float(d) for d in distances]
    for d in ds:
        if d <= 2.0 * R:
            raise OverlappingBalls(
                f"center distance {d} does not separate balls of radius {R}"
            )
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("distances must be strictly increasing")
    ball_dom = build_lattice(interval(0.0, 2.0 * R), h, params)
    lam1_ball = solve_lambda1(assemble_kernel(ball_dom, params, trunc_factor), opts).lam
    sp = params.s * params.p
    rows = []
    for d in ds:
        u_dom = build_lattice(intervals((0.0, 2.0 * R), (d, d + 2.0 * R)), h, params)
        Ku = assemble_kernel(u_dom, params, trunc_factor)
        r1 = solve_lambda1(Ku, opts)
        lam2 = solve_lambda2_path(Ku, r1.u, opts).lam
        factor = (2.0 * ball_dom.n / u_dom.n) ** (sp / params.dim)
        rows.append(
            SweepRow(
                distance=d,
                lambda2_union=lam2,
                lambda1_ball=lam1_ball,
                scaled_bound=factor * lam1_ball,
                gap=lam2 - lam1_ball,
            )
        )
    return rows


def _localized_seminorm(dom: LatticeDomain, u: np.ndarray, params: Params) -> float:
    """Ordered-pair Gagliardo sum over the domain, no exterior part."""
    p = params.p
    expo = dom.dim + params.s * params.p
    h2n = dom.h ** (2 * dom.dim)
    total = 0.0
    # fixed chunk order keeps the reduction deterministic
    for start in range(0, dom.n, _CHUNK):
        blk = slice(start, min(start + _CHUNK, dom.n))
        diff = dom.coords[blk, None, :] - dom.coords[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=2))
        du = np.abs(u[blk, None] - u[None, :]) ** p
        with np.errstate(divide="ignore"):
            w = np.where(dist > 0.0, h2n / dist**expo, 0.0)
        total += float(np.sum(w * du))
    return total


def _support_in_inner_ball(
    dom: LatticeDomain, u: np.ndarray, r: float
) -> None:
    dist_c = np.sqrt(np.sum((dom.coords - dom.centroid) ** 2, axis=1))
    outside = dist_c >= r
    if np.any(u[outside] != 0.0):
        raise ValueError(
            f"function must vanish outside the concentric ball of radius {r}"
        )


def poincare_localized_check(
    dom: LatticeDomain,
    u: np.ndarray,
    ball_radius: float,
    params: Params,
    inner_radius: float | None = None,
    tol: float = 0.02,
) -> PoincareReport:
    """Both sides of the localized Poincare inequality on a lattice ball.

    Base form: the measure of the exact zero set of u, divided by
    2^(N+p) R^N and scaled by R^(-sp), multiplies the L^p mass; that is
    bounded by the Gagliardo seminorm restricted to the ball.  The
    discrete version inherits the continuum proof verbatim (every node
    pair is closer than 2R), so it needs no quadrature slack.

    With ``inner_radius`` given, u must vanish outside the concentric
    ball of that radius and the zero-measure factor is replaced by its
    geometric lower bound N omega_N (r/R)^N ((R-r)/r) / 2^(N+p); that
    bound is a continuum volume estimate, so holds carries the
    discretization slack ``tol``.

    Raises
    ------
    EmptyZeroSet
        Base form only: u has no exact zero on the lattice.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (dom.n,):
        raise ValueError(f"grid function has shape {u.shape}, expected ({dom.n},)")
    R = float(ball_radius)
    if not R > 0:
        raise ValueError(f"ball radius {ball_radius} must be positive")
    N, p, sp = dom.dim, params.p, params.s * params.p
    hN = dom.h**N
    mass = hN * float(np.sum(np.abs(u) ** p))
    if inner_radius is None:
        zeros = int(np.count_nonzero(u == 0.0))
        if zeros == 0:
            raise EmptyZeroSet("the zero set of u is empty on this lattice")
        lhs = (hN * zeros) / (2 ** (N + p) * R**N) * R ** (-sp) * mass
    else:
        r = float(inner_radius)
        if not 0.0 < r < R:
            raise ValueError(f"inner radius {r} must lie in (0, {R})")
        _support_in_inner_ball(dom, u, r)
        const = (
            N
            * UNIT_BALL_VOLUME[N]
            / 2 ** (N + p)
            * (r / R) ** N
            * ((R - r) / r)
            * R ** (-sp)
        )
        lhs = const * mass
    rhs = _localized_seminorm(dom, u, params)
    return PoincareReport(
        lhs=lhs, rhs=rhs, holds=lhs <= rhs * (1.0 + tol) + 1e-12
    )


def sobolev_localized_check(
    dom: LatticeDomain,
    u: np.ndarray,
    r: float,
    R: float,
    params: Params,
) -> SobolevReport:
    """Realized constant of the localized Sobolev inequality.

    For u supported in the concentric ball of radius r inside the
    lattice ball of radius R, computes the critical-norm term
    (integral of |u|^(p*))^(p/p*) and the Gagliardo seminorm over the
    R-ball, and reports their ratio seminorm/norm_term: the constant
    the inequality realizes on this function.  No pass/fail flag; the
    sharp constant has no closed form, but the ratio must stay bounded
    away from zero for fixed R/r and degenerate only as R/r tends to
    one.  ratio is NaN when u vanishes identically.

    Raises
    ------
    ExponentOutOfRange
        If s*p >= dim, where the critical exponent does not exist.
    """
    sp = params.s * params.p
    if sp >= params.dim:
        raise ExponentOutOfRange(
            f"critical exponent needs s*p < dim, got s*p = {sp}, dim = {params.dim}"
        )
    u = np.asarray(u, dtype=float)
    if u.shape != (dom.n,):
        raise ValueError(f"grid function has shape {u.shape}, expected ({dom.n},)")
    if not 0.0 < r < R:
        raise ValueError(f"radii must satisfy 0 < r < R, got r={r}, R={R}")
    _support_in_inner_ball(dom, u, r)
    pstar = params.dim * params.p / (params.dim - sp)
    hN = dom.h**dom.dim
    norm_term = (hN * float(np.sum(np.abs(u) ** pstar))) ** (params.p / pstar)
    semi = _localized_seminorm(dom, u, params)
    ratio = semi / norm_term if norm_term > 0.0 else float("nan")
    return SobolevReport(norm_term=norm_term, seminorm=semi, ratio=ratio)


def linf_bound_check(
    result: EigenResult,
    T_upper: float,
    params: Params,
    dom: LatticeDomain | None = None,
) -> LinfReport:
    """Sup-norm bound on an eigenfunction from its eigenvalue.

    Evaluates max|u| against [C lambda]^(N/(s p^2)) times the L^p norm,
    where C = T_upper (p*/p)^(((N-sp)/s)((p-1)/p)) and T_upper is a
    caller-supplied upper bound for the sharp Sobolev constant (no
    closed form exists).  When ``dom`` is omitted the eigenfunction is
    assumed L^p-normalized, as the solvers return it.  Diagnostic: with
    an unverified T_upper the flag certifies nothing.

    Raises
    ------
    ExponentOutOfRange
        If s*p >= dim.
    """
    sp = params.s * params.p
    if sp >= params.dim:
        raise ExponentOutOfRange(
            f"sup-norm bound needs s*p < dim, got s*p = {sp}, dim = {params.dim}"
        )
    if not T_upper > 0:
        raise ValueError(f"T_upper={T_upper} must be positive")
    pstar = params.dim * params.p / (params.dim - sp)
    c_tilde = T_upper * (pstar / params.p) ** (
        ((params.dim - sp) / params.s) * ((params.p - 1.0) / params.p)
    )
    norm = (
        1.0 if dom is None else lp_norm(result.u, params.p, dom.h, dom.dim)
    )
    rhs = (c_tilde * result.lam) ** (params.dim / (params.s * params.p**2)) * norm
    lhs = float(np.max(np.abs(result.u)))
    return LinfReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs)
