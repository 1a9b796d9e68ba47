"""Lattice construction, measures and connectivity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplap.domain import (
    Params,
    ball,
    build_lattice,
    connected_components,
    interval,
    intervals,
    sublattice,
    union,
)
from fplap.errors import DimensionMismatch, EmptyDomain

P1 = Params(s=0.5, p=2.0, dim=1)
P2 = Params(s=0.5, p=2.0, dim=2)


class TestParams:
    def test_rejects_s_outside_unit_interval(self):
        with pytest.raises(ValueError, match="0<s<1"):
            Params(s=1.5, p=2.0, dim=1)
        with pytest.raises(ValueError, match="0<s<1"):
            Params(s=0.0, p=2.0, dim=1)

    def test_rejects_p_at_or_below_one(self):
        with pytest.raises(ValueError, match="1<p<inf"):
            Params(s=0.5, p=1.0, dim=1)

    def test_rejects_unsupported_dimension(self):
        with pytest.raises(ValueError, match="dimensions 1 and 2"):
            Params(s=0.5, p=2.0, dim=3)

    def test_sp_product(self):
        assert Params(s=0.25, p=3.0, dim=1).sp == 0.75


class TestBuildLattice:
    def test_unit_interval_cell_centers(self):
        dom = build_lattice(interval(0.0, 1.0), 0.25, P1)
        assert dom.n == 4
        np.testing.assert_array_equal(
            dom.coords[:, 0], [0.125, 0.375, 0.625, 0.875]
        )
        assert connected_components(dom) == 1

    def test_two_intervals_give_two_components(self):
        dom = build_lattice(intervals((0.0, 1.0), (2.0, 3.0)), 0.25, P1)
        assert dom.n == 8
        assert connected_components(dom) == 2
        np.testing.assert_array_equal(np.bincount(dom.component_id), [4, 4])

    def test_touching_intervals_merge(self):
        # boundary point belongs to neither open interval, but the nodes
        # on either side of it are face-adjacent
        dom = build_lattice(intervals((0.0, 1.0), (1.0, 2.0)), 0.25, P1)
        assert dom.n == 8
        assert connected_components(dom) == 1

    def test_too_small_ball_is_empty(self):
        with pytest.raises(EmptyDomain):
            build_lattice(ball((0.0, 0.0), 0.1), 1.0, P2)

    def test_interval_without_cell_center_is_empty(self):
        with pytest.raises(EmptyDomain):
            build_lattice(interval(0.0, 0.1), 1.0, P1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_lattice(ball((0.0, 0.0), 1.0), 0.5, P1)

    def test_nonpositive_spacing_rejected(self):
        with pytest.raises(ValueError):
            build_lattice(interval(0.0, 1.0), 0.0, P1)

    def test_index_is_lexicographically_sorted(self):
        dom = build_lattice(ball((0.0, 0.0), 1.0), 0.3, P2)
        as_tuples = [tuple(row) for row in dom.index]
        assert as_tuples == sorted(as_tuples)

    def test_primitive_order_does_not_matter(self):
        h = 0.2
        a = build_lattice(union(interval(0.0, 1.0), interval(3.0, 4.0)), h, P1)
        b = build_lattice(union(interval(3.0, 4.0), interval(0.0, 1.0)), h, P1)
        np.testing.assert_array_equal(a.index, b.index)
        assert connected_components(a) == connected_components(b) == 2

    def test_bounding_radius_of_interval(self):
        dom = build_lattice(interval(0.0, 1.0), 0.25, P1)
        assert dom.bounding_radius == 0.375


@settings(max_examples=30, deadline=None)
@given(shift=st.integers(min_value=-40, max_value=40))
def test_translation_by_lattice_multiples_is_exact(shift):
    h = 0.25
    base = build_lattice(interval(0.0, 1.0), h, P1)
    moved = build_lattice(interval(shift * h, shift * h + 1.0), h, P1)
    np.testing.assert_array_equal(moved.index, base.index + np.array([shift]))
    np.testing.assert_array_equal(moved.coords, base.coords + shift * h)


class TestMeasure:
    def test_unit_interval(self):
        assert build_lattice(interval(0.0, 1.0), 0.25, P1).measure() == 1.0

    def test_two_unit_intervals(self):
        dom = build_lattice(intervals((0.0, 1.0), (2.0, 3.0)), 0.25, P1)
        assert dom.measure() == 2.0

    def test_disk_area(self):
        dom = build_lattice(ball((0.0, 0.0), 1.0), 0.05, P2)
        assert abs(dom.measure() - np.pi) < 0.02 * np.pi

    def test_additive_on_separated_shapes(self):
        h = 0.125
        a = build_lattice(interval(0.0, 1.0), h, P1)
        b = build_lattice(interval(2.0, 3.5), h, P1)
        both = build_lattice(
            union(interval(0.0, 1.0), interval(2.0, 3.5)), h, P1
        )
        assert both.measure() == a.measure() + b.measure()


class TestSublattice:
    def test_keeps_selected_nodes(self):
        dom = build_lattice(interval(0.0, 1.0), 0.125, P1)
        keep = dom.coords[:, 0] < 0.5
        sub = sublattice(dom, keep)
        assert sub.n == int(keep.sum())
        np.testing.assert_array_equal(sub.coords, dom.coords[keep])
        assert sub.h == dom.h
        assert connected_components(sub) == 1

    def test_relabels_components_after_a_hole(self):
        dom = build_lattice(interval(0.0, 1.0), 0.125, P1)
        keep = np.ones(dom.n, dtype=bool)
        keep[3] = False
        assert connected_components(sublattice(dom, keep)) == 2

    def test_empty_mask_rejected(self):
        dom = build_lattice(interval(0.0, 1.0), 0.125, P1)
        with pytest.raises(EmptyDomain):
            sublattice(dom, np.zeros(dom.n, dtype=bool))

    def test_wrong_mask_length_rejected(self):
        dom = build_lattice(interval(0.0, 1.0), 0.125, P1)
        with pytest.raises(ValueError):
            sublattice(dom, np.ones(dom.n + 1, dtype=bool))
