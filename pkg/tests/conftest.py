"""Shared lattice and solver fixtures.

Session scope: kernel assembly and the second-eigenvalue solves are the
slow pieces, and several test modules want the same objects.
"""

import numpy as np
import pytest

from fplap.domain import Params, build_lattice, interval, intervals
from fplap.eigensolver import SolverOptions, solve_lambda1, solve_lambda2_path
from fplap.energy import assemble_kernel

H_COARSE = 1.0 / 32.0


@pytest.fixture(scope="session")
def p2_interval():
    """Kernel on the unit interval, h=1/32, s=0.5, p=2."""
    params = Params(s=0.5, p=2.0, dim=1)
    dom = build_lattice(interval(0.0, 1.0), H_COARSE, params)
    return assemble_kernel(dom, params)


@pytest.fixture(scope="session")
def p2_two_intervals():
    """Kernel on two far unit intervals, h=1/32, s=0.5, p=2."""
    params = Params(s=0.5, p=2.0, dim=1)
    dom = build_lattice(intervals((0.0, 1.0), (2.0, 3.0)), H_COARSE, params)
    return assemble_kernel(dom, params)


@pytest.fixture(scope="session")
def p2_interval_pair(p2_interval):
    """Converged (lambda1, lambda2) results on the unit interval."""
    opts = SolverOptions()
    r1 = solve_lambda1(p2_interval, opts)
    r2 = solve_lambda2_path(p2_interval, r1.u, opts)
    return r1, r2


@pytest.fixture(scope="session")
def p2_two_intervals_pair(p2_two_intervals):
    opts = SolverOptions()
    r1 = solve_lambda1(p2_two_intervals, opts)
    r2 = solve_lambda2_path(p2_two_intervals, r1.u, opts)
    return r1, r2


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
