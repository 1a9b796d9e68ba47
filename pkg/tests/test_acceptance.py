"""Acceptance gate: the battery of end-to-end checks the build must pass.

Each test prints one [PASS]/[FAIL] line on the live terminal (bypassing
capture) so a full run reads as a checklist.  The solver matrix fixture
solves both eigenvalues once per (domain, exponent) pair and is shared
by every test that needs converged eigenpairs.
"""

import time

import numpy as np
import pytest

from fplap.domain import Params, build_lattice, interval, intervals
from fplap.eigensolver import (
    SolverOptions,
    is_sign_changing,
    loop_upper_bound,
    matrix_oracle_p2,
    nodal_lemma_check,
    solve_lambda1,
    solve_lambda2_path,
)
from fplap.energy import (
    assemble_kernel,
    energy_gradient,
    gagliardo_energy,
    hidden_convexity_gap,
    lp_norm,
)
from fplap.pointwise import run_battery

H = 1.0 / 64.0
S = 0.5
P_VALUES = (1.5, 2.0, 3.0)
SHAPES = {
    "interval": interval(0.0, 1.0),
    "two_equal": intervals((0.0, 1.0), (2.0, 3.0)),
    "two_unequal": intervals((0.0, 0.6), (1.2, 2.2)),
}


def _opts(p):
    # p < 2 keeps a looser residual target: the stationarity defect has
    # infinite slope at coincident node values there, so the attainable
    # floor is set by symmetry roundoff, not by the iteration
    return SolverOptions(grad_tol=1e-6 if p < 2.0 else 1e-8)


def _aux_opts(p):
    # auxiliary solves (restarts, reference intervals, nodal
    # restrictions) start further from the minimizer and floor higher;
    # eigenvalues are still resolved to ~1e-10 at this residual
    return SolverOptions(grad_tol=3e-5 if p < 2.0 else 1e-8)


@pytest.fixture(scope="module")
def solves():
    out = {}
    for p in P_VALUES:
        params = Params(s=S, p=p, dim=1)
        opts = _opts(p)
        for name, shape in SHAPES.items():
            dom = build_lattice(shape, H, params)
            K = assemble_kernel(dom, params)
            r1 = solve_lambda1(K, opts)
            r2 = solve_lambda2_path(K, r1.u, opts)
            out[name, p] = (K, r1, r2, opts)
    return out


def _verdict(capsys, num, desc, ok):
    with capsys.disabled():
        print(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {desc}")
    assert ok, f"acceptance check {num} failed: {desc}"


def test_01_p2_solves_match_dense_spectrum(capsys):
    ok = True
    opts = SolverOptions(grad_tol=1e-8)
    for s in (0.3, 0.5, 0.8):
        params = Params(s=s, p=2.0, dim=1)
        K = assemble_kernel(build_lattice(interval(0.0, 1.0), H, params), params)
        t0 = time.perf_counter()
        r1 = solve_lambda1(K, opts)
        r2 = solve_lambda2_path(K, r1.u, opts)
        elapsed = time.perf_counter() - t0
        spectrum = matrix_oracle_p2(K)
        ok &= abs(r1.lam - spectrum[0]) <= 1e-6 * spectrum[0]
        ok &= abs(r2.lam - spectrum[1]) <= 1e-3 * spectrum[1]
        ok &= elapsed < 60.0
    _verdict(capsys, 1, "p=2 eigenvalues match the dense matrix at three orders", ok)


def test_02_strict_ordering_and_sign_change(capsys, solves):
    ok = True
    for (_, _), (K, r1, r2, _) in solves.items():
        ok &= r2.lam - r1.lam > 1e-3 * r1.lam
        ok &= is_sign_changing(r2.u)
    _verdict(capsys, 2, "second level strictly above first, sign-changing", ok)


def test_03_minimum_principle_on_disconnected_domains(capsys, solves):
    ok = True
    for p in P_VALUES:
        for name in SHAPES:
            _, r1, _, _ = solves[name, p]
            ok &= bool(np.all(r1.u > 0.0))
    _verdict(capsys, 3, "first eigenfunction strictly positive at every node", ok)


def test_04_first_eigenfunction_is_simple(capsys, solves):
    ok = True
    rng = np.random.default_rng(2024)
    for p in P_VALUES:
        K, ref, _, _ = solves["interval", p]
        dom = K.domain
        for _ in range(20):
            u0 = rng.uniform(0.1, 1.0, size=K.n)
            res = solve_lambda1(K, _aux_opts(p), u0=u0)
            dist = min(
                lp_norm(res.u - ref.u, p, dom.h, dom.dim),
                lp_norm(res.u + ref.u, p, dom.h, dom.dim),
            )
            ok &= dist < 1e-6
    _verdict(capsys, 4, "20 random restarts agree up to sign within 1e-6", ok)


def test_05_nodal_restrictions_lie_strictly_below(capsys, solves):
    ok = True
    for name in ("interval", "two_equal"):
        for p in P_VALUES:
            K, _, r2, _ = solves[name, p]
            report = nodal_lemma_check(K, r2, _aux_opts(p))
            ok &= report.holds
            ok &= report.margin > 1e-3 * r2.lam
    _verdict(capsys, 5, "second eigenvalue dominates both nodal restrictions", ok)


def test_06_interval_minimizes_among_splits(capsys):
    from fplap.inequalities import faber_krahn_check

    params = Params(s=S, p=2.0, dim=1)
    opts = SolverOptions(grad_tol=1e-8)
    ok = True
    for ratio in (0.5, 0.625, 0.75, 0.8125, 0.875):
        dom = build_lattice(
            intervals((0.0, ratio), (ratio + 0.25, 1.25)), H, params
        )
        report = faber_krahn_check(dom, params, opts, tol=0.02)
        ok &= report.holds
    single = build_lattice(interval(0.0, 1.0), H, params)
    eq = faber_krahn_check(single, params, opts, tol=0.02)
    ok &= eq.holds and abs(eq.margin) <= 0.02 * eq.ball_bound
    _verdict(capsys, 6, "five split ratios beat the interval bound; equality case tight", ok)


def test_07_half_measure_interval_bound(capsys, solves):
    ok = True
    half_cache = {}
    for (name, p), (K, _, r2, _) in solves.items():
        dom = K.domain
        params = K.params
        half_n = dom.n // 2
        key = (half_n, p)
        if key not in half_cache:
            half_dom = build_lattice(interval(0.0, H * half_n), H, params)
            half_K = assemble_kernel(half_dom, params)
            half_cache[key] = solve_lambda1(half_K, _aux_opts(p)).lam
        factor = (2.0 * half_n / dom.n) ** (params.s * params.p / params.dim)
        bound = factor * half_cache[key]
        ok &= r2.lam > 0.98 * bound
        if name == "two_equal":
            ok &= r2.lam - bound > 0.0
    _verdict(capsys, 7, "second eigenvalue beats the scaled half-measure bound", ok)


def test_08_two_ball_separation_sweep(capsys):
    from fplap.inequalities import hks_sweep

    params = Params(s=S, p=2.0, dim=1)
    opts = SolverOptions(grad_tol=1e-8)
    t0 = time.perf_counter()
    rows = hks_sweep(0.5, (2.0, 4.0, 8.0, 16.0), params, opts, h=H)
    elapsed = time.perf_counter() - t0
    gaps = [row.gap for row in rows]
    ok = all(g > 0.0 for g in gaps)
    ok &= all(a > b for a, b in zip(gaps, gaps[1:]))
    ok &= gaps[3] < 0.25 * gaps[0]
    ok &= elapsed < 600.0
    _verdict(capsys, 8, "separation sweep gap positive, decreasing, 4x decay", ok)


def test_09_pointwise_batteries_clean_at_scale(capsys):
    t0 = time.perf_counter()
    summaries = run_battery(samples=1_000_000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = len(summaries) == 10
    ok &= all(s.violations == 0 for s in summaries)
    ok &= elapsed < 120.0
    _verdict(capsys, 9, "ten pointwise batteries clean at one million samples", ok)


def test_10_gradient_and_convexity_hygiene(capsys):
    ok = True
    rng = np.random.default_rng(7)
    for p in P_VALUES:
        params = Params(s=S, p=p, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 0.1, params)
        K = assemble_kernel(dom, params)
        u = rng.standard_normal(dom.n)
        grad = energy_gradient(K, u)
        step = 1e-6
        fd = np.empty_like(grad)
        for i in range(dom.n):
            e = np.zeros(dom.n)
            e[i] = step
            fd[i] = (
                gagliardo_energy(K, u + e).total - gagliardo_energy(K, u - e).total
            ) / (2.0 * step)
        scale = max(float(np.max(np.abs(grad))), 1.0)
        ok &= float(np.max(np.abs(fd - grad))) <= 1e-5 * scale
    for p in P_VALUES:
        params = Params(s=S, p=p, dim=1)
        dom = build_lattice(interval(0.0, 1.0), 1.0 / 15.0, params)
        K = assemble_kernel(dom, params)
        worst = np.inf
        for _ in range(1000):
            u = rng.uniform(0.1, 2.0, size=dom.n)
            v = rng.uniform(0.1, 2.0, size=dom.n)
            for t in np.linspace(0.0, 1.0, 11):
                worst = min(worst, hidden_convexity_gap(K, u, v, t))
        ok &= worst >= -1e-10
    _verdict(capsys, 10, "gradient matches finite differences; convexity gap >= -1e-10", ok)


def test_11_loop_bound_consistency(capsys, solves):
    ok = True
    rng = np.random.default_rng(11)
    for (_, _), (K, _, r2, _) in solves.items():
        for _ in range(10):
            trial = rng.standard_normal(K.n)
            ok &= r2.lam <= loop_upper_bound(K, trial) + 1e-8
        ok &= loop_upper_bound(K, r2.u) <= r2.lam * (1.0 + 1e-4)
    _verdict(capsys, 11, "loop bound dominates the second level and is tight at it", ok)
