"""Kernel assembly and the discrete Gagliardo energy."""

import numpy as np
import pytest

from fplap.domain import Params, build_lattice, interval
from fplap.energy import (
    KernelOperator,
    analytic_tail,
    assemble_kernel,
    energy_gradient,
    gagliardo_energy,
    hidden_convexity_gap,
    lp_norm,
    normalize,
    rayleigh_quotient,
    tail,
)
from fplap.errors import NotPositive, TruncationTooSmall, ZeroFunction


def _two_node_kernel(pair=1.0, ext=(0.0, 0.0), h=1.0):
    """Hand-built operator on the two-node lattice of (0, 2) at h=1."""
    params = Params(s=0.25, p=2.0, dim=1)
    dom = build_lattice(interval(0.0, 2.0), h, params)
    assert dom.n == 2
    w = np.array([[0.0, pair], [pair, 0.0]])
    return KernelOperator(
        domain=dom,
        params=params,
        pair_weight=w,
        ext_weight=np.asarray(ext, dtype=float),
        trunc_radius=8.0,
        trunc_factor=4.0,
    )


class TestAssembly:
    def test_analytic_tail_closed_form(self):
        # N omega_N / (s p R^(sp)) with N=1, omega_1=2, s=0.5, p=2, R=2
        assert analytic_tail(Params(s=0.5, p=2.0, dim=1), 2.0) == 1.0

    def test_pair_weight_at_unit_distance(self):
        params = Params(s=0.25, p=2.0, dim=1)
        dom = build_lattice(interval(0.0, 2.0), 1.0, params)
        K = assemble_kernel(dom, params)
        assert K.pair_weight[0, 1] == 1.0

    def test_pair_weight_symmetric_zero_diagonal(self):
        params = Params(s=0.5, p=2.5, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0 / 16.0, params)
        K = assemble_kernel(dom, params)
        np.testing.assert_array_equal(K.pair_weight, K.pair_weight.T)
        assert np.all(np.diag(K.pair_weight) == 0.0)
        off = K.pair_weight[~np.eye(dom.n, dtype=bool)]
        assert np.all(off > 0.0)

    def test_ext_weight_change_under_truncation_refinement(self):
        # pushing the truncation radius out exchanges analytic tail for
        # lattice sum; the swing is below the tail being replaced
        params = Params(s=0.5, p=2.0, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0 / 16.0, params)
        K4 = assemble_kernel(dom, params, trunc_factor=4.0)
        K8 = assemble_kernel(dom, params, trunc_factor=8.0)
        cap = dom.h * analytic_tail(params, K4.trunc_radius)
        assert np.all(np.abs(K8.ext_weight - K4.ext_weight) < cap)
        assert np.all(K4.ext_weight > 0.0)

    def test_trunc_factor_below_two_rejected(self):
        params = Params(s=0.5, p=2.0, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 0.25, params)
        with pytest.raises(TruncationTooSmall):
            assemble_kernel(dom, params, trunc_factor=1.5)

    def test_single_node_domain_rejected(self):
        params = Params(s=0.5, p=2.0, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0, params)
        assert dom.n == 1
        with pytest.raises(TruncationTooSmall):
            assemble_kernel(dom, params)


class TestEnergy:
    def test_zero_function(self, p2_interval):
        e = gagliardo_energy(p2_interval, np.zeros(p2_interval.n))
        assert e.interior == 0.0
        assert e.exterior == 0.0
        assert e.total == 0.0

    def test_two_node_interior_by_hand(self):
        K = _two_node_kernel()
        e = gagliardo_energy(K, np.array([1.0, 0.0]))
        assert e.interior == 2.0
        assert e.exterior == 0.0

    def test_exterior_term_by_hand(self):
        K = _two_node_kernel(ext=(0.25, 0.5))
        e = gagliardo_energy(K, np.array([1.0, 1.0]))
        assert e.interior == 0.0
        assert e.exterior == 2.0 * 0.75

    def test_p_homogeneity(self, rng):
        params = Params(s=0.5, p=2.5, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0 / 12.0, params)
        K = assemble_kernel(dom, params)
        u = rng.standard_normal(dom.n)
        c = -1.7
        scaled = gagliardo_energy(K, c * u).total
        expected = abs(c) ** params.p * gagliardo_energy(K, u).total
        assert abs(scaled - expected) < 1e-12 * expected

    def test_energy_even_and_absolute_value_contracts(self, p2_interval, rng):
        u = rng.standard_normal(p2_interval.n)
        e = gagliardo_energy(p2_interval, u).total
        assert gagliardo_energy(p2_interval, -u).total == e
        assert gagliardo_energy(p2_interval, np.abs(u)).total <= e


class TestGradient:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_zero_at_zero_function(self, p):
        params = Params(s=0.5, p=p, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 0.125, params)
        K = assemble_kernel(dom, params)
        np.testing.assert_array_equal(energy_gradient(K, np.zeros(dom.n)), 0.0)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_matches_central_differences(self, p):
        params = Params(s=0.5, p=p, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 0.1, params)
        assert dom.n == 10
        K = assemble_kernel(dom, params)
        u = np.random.default_rng(7).standard_normal(dom.n)
        g = energy_gradient(K, u)
        step = 1e-6
        fd = np.empty_like(g)
        for i in range(dom.n):
            up, un = u.copy(), u.copy()
            up[i] += step
            un[i] -= step
            fd[i] = (
                gagliardo_energy(K, up).total - gagliardo_energy(K, un).total
            ) / (2.0 * step)
        scale = np.max(np.abs(g))
        assert np.max(np.abs(g - fd)) < 1e-5 * scale

    def test_p2_gradient_is_linear_matrix_action(self, p2_interval, rng):
        K = p2_interval
        u = rng.standard_normal(K.n)
        A = 2.0 * (
            np.diag(K.pair_weight.sum(axis=1) + K.ext_weight) - K.pair_weight
        )
        g = energy_gradient(K, u)
        assert np.max(np.abs(g - 2.0 * A @ u)) < 1e-12 * np.max(np.abs(g))


class TestNorms:
    def test_lp_norm_of_ones(self):
        assert lp_norm(np.ones(4), 2.0, 0.25, 1) == 1.0

    def test_lp_norm_of_zero(self):
        assert lp_norm(np.zeros(5), 2.0, 0.25, 1) == 0.0

    def test_lp_norm_scaling(self, rng):
        u = rng.standard_normal(17)
        a = lp_norm(3.0 * u, 2.7, 0.1, 1)
        b = 3.0 * lp_norm(u, 2.7, 0.1, 1)
        assert abs(a - b) < 1e-14 * b

    def test_normalize_constant_on_unit_measure(self):
        out = normalize(2.0 * np.ones(4), 2.0, 0.25, 1)
        np.testing.assert_allclose(out, np.ones(4), rtol=0.0, atol=1e-15)

    def test_normalize_idempotent(self, rng):
        u = rng.standard_normal(9)
        once = normalize(u, 1.5, 0.2, 1)
        twice = normalize(once, 1.5, 0.2, 1)
        assert np.max(np.abs(twice - once)) < 1e-14

    def test_normalize_odd(self, rng):
        u = rng.standard_normal(9)
        np.testing.assert_array_equal(
            normalize(-u, 2.0, 0.2, 1), -normalize(u, 2.0, 0.2, 1)
        )

    def test_normalize_zero_raises(self):
        with pytest.raises(ZeroFunction):
            normalize(np.zeros(3), 2.0, 0.1, 1)


class TestRayleigh:
    def test_scale_invariance(self, p2_interval, rng):
        u = rng.standard_normal(p2_interval.n)
        a = rayleigh_quotient(p2_interval, u)
        b = rayleigh_quotient(p2_interval, -5.0 * u)
        assert abs(a - b) < 1e-12 * a

    def test_matches_matrix_quotient_at_p2(self, p2_interval, rng):
        K = p2_interval
        u = rng.standard_normal(K.n)
        A = 2.0 * (
            np.diag(K.pair_weight.sum(axis=1) + K.ext_weight) - K.pair_weight
        )
        h = K.domain.h
        expected = float(u @ A @ u) / (h * float(u @ u))
        assert abs(rayleigh_quotient(K, u) - expected) < 1e-10 * expected

    def test_never_below_first_eigenvalue(self, p2_interval, p2_interval_pair):
        r1, _ = p2_interval_pair
        gen = np.random.default_rng(11)
        for _ in range(100):
            u = gen.standard_normal(p2_interval.n)
            assert rayleigh_quotient(p2_interval, u) >= r1.lam - 1e-8

    def test_zero_function_raises(self, p2_interval):
        with pytest.raises(ZeroFunction):
            rayleigh_quotient(p2_interval, np.zeros(p2_interval.n))


class TestTail:
    def test_zero_function(self, p2_interval):
        assert tail(np.zeros(p2_interval.n), 0.5, 0.25, p2_interval) == 0.0

    def test_support_inside_ball(self, p2_interval):
        dom = p2_interval.domain
        u = np.where(np.abs(dom.coords[:, 0] - 0.5) < 0.2, 1.0, 0.0)
        assert tail(u, 0.5, 0.25, p2_interval) == 0.0

    def test_dilation_invariance(self):
        p = 2.5
        params = Params(s=0.5, p=p, dim=1)
        dom1 = build_lattice(interval(0.0, 1.0), 1.0 / 16.0, params)
        dom2 = build_lattice(interval(0.0, 2.0), 1.0 / 8.0, params)
        K1 = assemble_kernel(dom1, params)
        K2 = assemble_kernel(dom2, params)
        u1 = np.sin(np.pi * dom1.coords[:, 0]) + 1.5
        u2 = np.sin(np.pi * dom2.coords[:, 0] / 2.0) + 1.5
        t1 = tail(u1, 0.25, 0.2, K1)
        t2 = tail(u2, 0.5, 0.4, K2)
        assert abs(t1 - t2) < 1e-12 * t1


class TestHiddenConvexity:
    def _positive_pair(self, n, seed):
        gen = np.random.default_rng(seed)
        return 0.1 + gen.random(n), 0.1 + gen.random(n)

    def test_endpoint(self, p2_interval):
        u, v = self._positive_pair(p2_interval.n, 0)
        assert abs(hidden_convexity_gap(p2_interval, u, v, 0.0)) < 1e-10

    def test_constant_curve(self, p2_interval):
        u, _ = self._positive_pair(p2_interval.n, 1)
        for t in np.linspace(0.0, 1.0, 11):
            assert abs(hidden_convexity_gap(p2_interval, u, u, t)) < 1e-10

    def test_nonnegative_on_random_positive_pairs(self):
        params = Params(s=0.5, p=2.5, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0 / 15.0, params)
        K = assemble_kernel(dom, params)
        gen = np.random.default_rng(3)
        for _ in range(25):
            u = 0.05 + gen.random(dom.n)
            v = 0.05 + gen.random(dom.n)
            for t in np.linspace(0.0, 1.0, 11):
                assert hidden_convexity_gap(K, u, v, t) >= -1e-10

    def test_rejects_nonpositive_input(self, p2_interval):
        u = np.ones(p2_interval.n)
        v = np.ones(p2_interval.n)
        v[0] = 0.0
        with pytest.raises(NotPositive):
            hidden_convexity_gap(p2_interval, u, v, 0.5)

    def test_rejects_t_outside_unit_interval(self, p2_interval):
        u = np.ones(p2_interval.n)
        with pytest.raises(ValueError):
            hidden_convexity_gap(p2_interval, u, u, 1.2)
