"""Discrete Gagliardo energy on a lattice domain with Dirichlet exterior.

A grid function is a 1-D float array with one value per interior node,
implicitly extended by zero outside the domain.  The energy of u is the
double Riemann sum of |u(x)-u(y)|^p / |x-y|^(N+sp) over ordered pairs of
lattice cells, split into an interior part (both cells inside) and an
exterior part (one cell outside, where u vanishes).  The exterior factor
per node is a lattice sum out to a truncation radius R_t plus the exact
integral of the kernel over the complement of the R_t ball, so the only
truncation effect is replacing a far-field Riemann sum by its integral.

All reductions are plain numpy sums in a fixed chunked order, so results
do not depend on thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import LatticeDomain, Params
from .errors import NotPositive, TruncationTooSmall, ZeroFunction
from .pointwise import j_p

# volume of the unit ball per supported dimension
UNIT_BALL_VOLUME = {1: 2.0, 2: np.pi}

# interior nodes per chunk when accumulating exterior weights; fixed so
# the summation tree never depends on runtime configuration
_CHUNK = 128


@dataclass(frozen=True)
class KernelOperator:
    """Precomputed interaction weights for one (domain, params) pair.

    pair_weight[i, j] = h^(2N) / |x_i - x_j|^(N+sp) for i != j, zero on
    the diagonal.  ext_weight[i] collects the Dirichlet interaction of
    node i with the exterior of the domain.
    """

    domain: LatticeDomain
    params: Params
    pair_weight: np.ndarray
    ext_weight: np.ndarray
    trunc_radius: float
    trunc_factor: float

    @property
    def n(self) -> int:
        return self.domain.n


@dataclass(frozen=True)
class EnergyBreakdown:
    interior: float
    exterior: float

    @property
    def total(self) -> float:
        return self.interior + self.exterior


def _check_function(dom: LatticeDomain, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (dom.n,):
        raise ValueError(f"grid function has shape {u.shape}, expected ({dom.n},)")
    if not np.all(np.isfinite(u)):
        raise ValueError("grid function contains non-finite values")
    return u


def analytic_tail(params: Params, radius: float) -> float:
    """Integral of |z|^(-N-sp) over the complement of the radius ball."""
    n_dim = params.dim
    omega = UNIT_BALL_VOLUME[n_dim]
    return n_dim * omega / (params.sp * radius**params.sp)


def assemble_kernel(
    dom: LatticeDomain, params: Params, trunc_factor: float = 4.0
) -> KernelOperator:
    """Build pairwise and exterior kernel weights for a lattice domain.

    Parameters
    ----------
    dom : LatticeDomain
    params : Params
    trunc_factor : float
        The exterior lattice sum runs to R_t = trunc_factor * (2 *
        bounding_radius); beyond R_t the kernel integral is added in
        closed form.  Must be at least 2 so every node's R_t ball
        contains the whole domain.

    Raises
    ------
    TruncationTooSmall
        If trunc_factor < 2, or the domain degenerates to a single point
        so that no positive truncation radius exists.
    """
    if trunc_factor < 2.0:
        raise TruncationTooSmall(
            f"trunc_factor={trunc_factor} too small: need trunc_factor >= 2 "
            "so the truncation ball contains the domain"
        )
    r_t = trunc_factor * 2.0 * dom.bounding_radius
    if not r_t > 0.0:
        raise TruncationTooSmall(
            "domain bounding radius is zero; no positive truncation radius exists"
        )
    # defensive check of the covering property behind the tail formula
    dist_to_centroid = np.sqrt(np.sum((dom.coords - dom.centroid) ** 2, axis=1))
    if np.any(dist_to_centroid + dom.bounding_radius > r_t):
        raise TruncationTooSmall(
            f"truncation radius {r_t} does not cover the domain from every node"
        )

    h, ndim, sp = dom.h, dom.dim, params.sp
    expo = ndim + sp

    diff = dom.coords[:, None, :] - dom.coords[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, 1.0)
    pair = h ** (2 * ndim) * dist**-expo
    np.fill_diagonal(pair, 0.0)

    # exterior lattice: all cells of the ambient grid within R_t of some
    # node, minus the domain itself
    lo = dom.coords.min(axis=0) - r_t
    hi = dom.coords.max(axis=0) + r_t
    kmin = np.floor(lo / h - 0.5).astype(int) - 1
    kmax = np.ceil(hi / h - 0.5).astype(int) + 1
    axes = [np.arange(kmin[d], kmax[d] + 1) for d in range(ndim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([m.ravel() for m in mesh], axis=1)
    own = set(map(tuple, dom.index))
    outside = np.fromiter(
        (tuple(row) not in own for row in cand), count=cand.shape[0], dtype=bool
    )
    ext_pts = dom.origin + (cand[outside] + 0.5) * h

    # per-node complement integral, then one more cell measure so the
    # weight sits in the energy sum at the same units as pair_weight
    tail_const = analytic_tail(params, r_t)
    ext = np.empty(dom.n)
    for start in range(0, dom.n, _CHUNK):
        block = dom.coords[start : start + _CHUNK]
        d = np.sqrt(
            np.sum((block[:, None, :] - ext_pts[None, :, :]) ** 2, axis=2)
        )
        contrib = np.where(d <= r_t, d**-expo, 0.0)
        ext[start : start + _CHUNK] = h**ndim * (
            h**ndim * contrib.sum(axis=1) + tail_const
        )
    return KernelOperator(
        domain=dom,
        params=params,
        pair_weight=pair,
        ext_weight=ext,
        trunc_radius=float(r_t),
        trunc_factor=float(trunc_factor),
    )


def gagliardo_energy(K: KernelOperator, u: np.ndarray) -> EnergyBreakdown:
    """Energy of u split into interior and exterior (Dirichlet) parts.

    interior sums pair_weight * |u(x)-u(y)|^p over ordered pairs, i.e.
    twice the unordered-pair sum; exterior is 2 * sum of ext_weight *
    |u|^p, the two orderings of each inside-outside pair.
    """
    u = _check_function(K.domain, u)
    p = K.params.p
    du = u[:, None] - u[None, :]
    interior = float(np.sum(K.pair_weight * np.abs(du) ** p))
    exterior = 2.0 * float(np.dot(K.ext_weight, np.abs(u) ** p))
    return EnergyBreakdown(interior=interior, exterior=exterior)


def energy_gradient(K: KernelOperator, u: np.ndarray) -> np.ndarray:
    """Exact gradient of the total energy with respect to the node values.

    Component at x: 2p * sum_y pair_weight(x,y) J_p(u(x)-u(y))
    + 2p * ext_weight(x) J_p(u(x)).
    """
    u = _check_function(K.domain, u)
    p = K.params.p
    du = u[:, None] - u[None, :]
    pair_part = np.sum(K.pair_weight * j_p(du, p), axis=1)
    return 2.0 * p * (pair_part + K.ext_weight * j_p(u, p))


def lp_norm(u: np.ndarray, p: float, h: float, dim: int) -> float:
    """Lattice L^p norm (h^N sum |u|^p)^(1/p)."""
    u = np.asarray(u, dtype=float)
    return float((h**dim * np.sum(np.abs(u) ** p)) ** (1.0 / p))


def normalize(u: np.ndarray, p: float, h: float, dim: int) -> np.ndarray:
    """Scale u to unit L^p norm."""
    u = np.asarray(u, dtype=float)
    nrm = lp_norm(u, p, h, dim)
    if nrm == 0.0:
        raise ZeroFunction("cannot normalize the zero function")
    return u / nrm


def rayleigh_quotient(K: KernelOperator, u: np.ndarray) -> float:
    """Total energy over the p-th power of the L^p norm; 0-homogeneous."""
    u = _check_function(K.domain, u)
    nrm = lp_norm(u, K.params.p, K.domain.h, K.domain.dim)
    if nrm == 0.0:
        raise ZeroFunction("Rayleigh quotient of the zero function")
    return gagliardo_energy(K, u).total / nrm**K.params.p


def tail(u: np.ndarray, x0, R: float, K: KernelOperator) -> float:
    """Scaling-invariant far-field seminorm of u around x0 at scale R.

    (R^sp h^N sum_{|x-x0|>R} |u|^(p-1) |x-x0|^(-N-sp))^(1/(p-1)) over
    the interior nodes outside the R ball.
    """
    if not R > 0:
        raise ValueError(f"tail radius R={R} must be positive")
    u = _check_function(K.domain, u)
    dom, params = K.domain, K.params
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dist = np.sqrt(np.sum((dom.coords - x0) ** 2, axis=1))
    far = dist > R
    if not far.any():
        return 0.0
    p, sp = params.p, params.sp
    s = np.sum(np.abs(u[far]) ** (p - 1.0) * dist[far] ** -(dom.dim + sp))
    return float((R**sp * dom.h**dom.dim * s) ** (1.0 / (p - 1.0)))


def hidden_convexity_gap(
    K: KernelOperator, u: np.ndarray, v: np.ndarray, t: float
) -> float:
    """Convexity defect of the energy along the geodesic of p-th powers.

    The curve sigma_t = ((1-t) u^p + t v^p)^(1/p) joins two strictly
    positive functions; the returned value (1-t) E(u) + t E(v) -
    E(sigma_t) is nonnegative up to rounding.
    """
    u = _check_function(K.domain, u)
    v = _check_function(K.domain, v)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"curve parameter t={t} outside [0, 1]")
    if np.any(u <= 0.0) or np.any(v <= 0.0):
        raise NotPositive("hidden convexity requires strictly positive functions")
    p = K.params.p
    sigma = ((1.0 - t) * u**p + t * v**p) ** (1.0 / p)
    e_u = gagliardo_energy(K, u).total
    e_v = gagliardo_energy(K, v).total
    e_s = gagliardo_energy(K, sigma).total
    return (1.0 - t) * e_u + t * e_v - e_s
