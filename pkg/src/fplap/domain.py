"""Lattice discretization of bounded open sets in dimension 1 and 2.

A domain is described constructively as a finite union of primitives
(intervals, balls, boxes) and discretized on the uniform grid of cell
centers: the node with integer index k sits at origin + (k + 1/2) * h
componentwise, and it belongs to the lattice domain when its coordinate
lies strictly inside the union.  Anchoring every lattice to the same
global origin makes translation by a lattice-multiple vector act exactly
on index sets.

Connectivity is face adjacency on the index lattice (2*dim neighbors),
which recovers the connectivity of the supported primitives as h -> 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyDomain


@dataclass(frozen=True)
class Params:
    """Differentiability order s, integrability exponent p, dimension."""

    s: float
    p: float
    dim: int

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise ValueError(f"s={self.s} invalid: the order must satisfy 0<s<1")
        if not (1.0 < self.p < np.inf):
            raise ValueError(f"p={self.p} invalid: the exponent must satisfy 1<p<inf")
        if self.dim not in (1, 2):
            raise ValueError(f"dim={self.dim} invalid: only dimensions 1 and 2 are supported")

    @property
    def sp(self) -> float:
        return self.s * self.p


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) on the line."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"interval ({self.lo}, {self.hi}) has no interior")

    @property
    def dimension(self) -> int:
        return 1

    def bounds(self):
        return np.array([self.lo]), np.array([self.hi])

    def contains(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        return (x > self.lo) & (x < self.hi)


@dataclass(frozen=True)
class Ball:
    """Open ball of given center and radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius {self.radius} must be positive")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def bounds(self):
        c = np.asarray(self.center, dtype=float)
        return c - self.radius, c + self.radius

    def contains(self, pts: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        return np.sum((pts - c) ** 2, axis=1) < self.radius**2


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box with corners lo and hi."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError("box corners must have matching dimension")
        if not np.all(hi > lo):
            raise ValueError(f"box {self.lo}..{self.hi} has no interior")

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def bounds(self):
        return np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        return np.all((pts > lo) & (pts < hi), axis=1)


@dataclass(frozen=True)
class ShapeSpec:
    """Finite union of positive-measure primitives."""

    primitives: tuple

    def __post_init__(self):
        if len(self.primitives) == 0:
            raise ValueError("shape must contain at least one primitive")

    @property
    def dimension(self) -> int:
        return self.primitives[0].dimension


def interval(lo: float, hi: float) -> ShapeSpec:
    return ShapeSpec((Interval(lo, hi),))


def intervals(*pairs) -> ShapeSpec:
    return ShapeSpec(tuple(Interval(lo, hi) for lo, hi in pairs))


def ball(center, radius: float) -> ShapeSpec:
    return ShapeSpec((Ball(tuple(center), radius),))


def union(*specs: ShapeSpec) -> ShapeSpec:
    prims = tuple(p for s in specs for p in s.primitives)
    return ShapeSpec(prims)


@dataclass(frozen=True)
class LatticeDomain:
    """Set of lattice nodes approximating a bounded open set.

    Attributes
    ----------
    h : float
        Lattice spacing.
    origin : ndarray, shape (dim,)
        Global anchor; node k sits at origin + (k + 1/2) * h.
    index : ndarray, shape (n, dim), int
        Integer indices of the interior nodes, lexicographically sorted.
    coords : ndarray, shape (n, dim)
        Node coordinates.
    component_id : ndarray, shape (n,), int
        Face-adjacency component label per node, contiguous from 0.
    centroid : ndarray, shape (dim,)
        Mean of the node coordinates.
    bounding_radius : float
        Radius of the smallest centroid-centered ball containing all nodes.
    """

    h: float
    origin: np.ndarray
    index: np.ndarray
    coords: np.ndarray
    component_id: np.ndarray
    centroid: np.ndarray
    bounding_radius: float

    @property
    def n(self) -> int:
        return self.index.shape[0]

    @property
    def dim(self) -> int:
        return self.index.shape[1]

    def measure(self) -> float:
        return self.h**self.dim * self.n


def _lex_order(index: np.ndarray) -> np.ndarray:
    # lexicographic by coordinate tuple; keys reversed because lexsort
    # sorts by the last key first
    return np.lexsort(tuple(index[:, d] for d in reversed(range(index.shape[1]))))


def _label_components(index: np.ndarray) -> np.ndarray:
    """Label face-adjacent clusters of integer lattice points by flood fill."""
    n, dim = index.shape
    lookup = {tuple(row): i for i, row in enumerate(index)}
    labels = np.full(n, -1, dtype=int)
    current = 0
    offsets = []
    for d in range(dim):
        for step in (-1, 1):
            off = [0] * dim
            off[d] = step
            offsets.append(tuple(off))
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = current
        queue = deque([start])
        while queue:
            i = queue.popleft()
            base = index[i]
            for off in offsets:
                j = lookup.get(tuple(base + np.array(off)))
                if j is not None and labels[j] < 0:
                    labels[j] = current
                    queue.append(j)
        current += 1
    return labels


def build_lattice(spec: ShapeSpec, h: float, params: Params) -> LatticeDomain:
    """Collect the cell centers strictly inside the union of primitives.

    Parameters
    ----------
    spec : ShapeSpec
        Constructive description of the open set.
    h : float
        Lattice spacing, must be positive.
    params : Params
        Supplies the spatial dimension to validate the primitives against.

    Returns
    -------
    LatticeDomain

    Raises
    ------
    DimensionMismatch
        If some primitive dimension differs from params.dim.
    EmptyDomain
        If no cell center lies inside the union.
    """
    if not h > 0:
        raise ValueError(f"lattice spacing h={h} must be positive")
    dim = params.dim
    for prim in spec.primitives:
        if prim.dimension != dim:
            raise DimensionMismatch(
                f"primitive {prim!r} has dimension {prim.dimension}, expected {dim}"
            )

    origin = np.zeros(dim)
    lo = np.full(dim, np.inf)
    hi = np.full(dim, -np.inf)
    for prim in spec.primitives:
        plo, phi = prim.bounds()
        lo = np.minimum(lo, plo)
        hi = np.maximum(hi, phi)

    # candidate index box: (k + 1/2) h in [lo, hi] with one cell of slack
    kmin = np.floor(lo / h - 0.5).astype(int) - 1
    kmax = np.ceil(hi / h - 0.5).astype(int) + 1
    axes = [np.arange(kmin[d], kmax[d] + 1) for d in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([m.ravel() for m in mesh], axis=1)
    pts = origin + (cand + 0.5) * h

    inside = np.zeros(cand.shape[0], dtype=bool)
    for prim in spec.primitives:
        inside |= prim.contains(pts)
    if not inside.any():
        raise EmptyDomain(f"no cell center of spacing h={h} falls inside the shape")

    index = cand[inside]
    index = index[_lex_order(index)]
    coords = origin + (index + 0.5) * h
    labels = _label_components(index)
    centroid = coords.mean(axis=0)
    bounding_radius = float(np.sqrt(np.max(np.sum((coords - centroid) ** 2, axis=1))))
    return LatticeDomain(
        h=float(h),
        origin=origin,
        index=index,
        coords=coords,
        component_id=labels,
        centroid=centroid,
        bounding_radius=bounding_radius,
    )


def sublattice(dom: LatticeDomain, keep: np.ndarray) -> LatticeDomain:
    """Restrict a lattice domain to the nodes selected by a boolean mask.

    Components, centroid and bounding radius are recomputed; spacing and
    origin are inherited.
    """
    keep = np.asarray(keep, dtype=bool)
    if keep.shape != (dom.n,):
        raise ValueError("mask length must equal the node count")
    if not keep.any():
        raise EmptyDomain("node mask selects no nodes")
    index = dom.index[keep]
    order = _lex_order(index)
    index = index[order]
    coords = dom.origin + (index + 0.5) * dom.h
    labels = _label_components(index)
    centroid = coords.mean(axis=0)
    bounding_radius = float(np.sqrt(np.max(np.sum((coords - centroid) ** 2, axis=1))))
    return LatticeDomain(
        h=dom.h,
        origin=dom.origin,
        index=index,
        coords=coords,
        component_id=labels,
        centroid=centroid,
        bounding_radius=bounding_radius,
    )


def connected_components(dom: LatticeDomain) -> int:
    """Number of distinct face-adjacency components."""
    return int(dom.component_id.max()) + 1 if dom.n else 0
