"""Fractional p-Laplacian eigenvalues and inequalities on lattice domains.

The package discretizes the Gagliardo energy of a bounded open set on a
uniform lattice with exterior Dirichlet weights, computes the first and
second eigenvalues by constrained descent and a mountain-pass path
method, and checks the spectral and pointwise inequalities the two
levels satisfy.
"""

import importlib

__version__ = "0.1.0"

# Re-exports resolve lazily so that importing the bare package stays
# free of numpy; the CLI must pin thread-pool sizes before numpy first
# loads in the process.
_EXPORTS = {
    "Params": "domain",
    "ShapeSpec": "domain",
    "LatticeDomain": "domain",
    "build_lattice": "domain",
    "sublattice": "domain",
    "connected_components": "domain",
    "interval": "domain",
    "intervals": "domain",
    "ball": "domain",
    "union": "domain",
    "KernelOperator": "energy",
    "EnergyBreakdown": "energy",
    "assemble_kernel": "energy",
    "gagliardo_energy": "energy",
    "energy_gradient": "energy",
    "lp_norm": "energy",
    "normalize": "energy",
    "rayleigh_quotient": "energy",
    "tail": "energy",
    "analytic_tail": "energy",
    "hidden_convexity_gap": "energy",
    "SolverOptions": "eigensolver",
    "EigenResult": "eigensolver",
    "SpherePath": "eigensolver",
    "solve_lambda1": "eigensolver",
    "solve_lambda2_path": "eigensolver",
    "matrix_oracle_p2": "eigensolver",
    "loop_upper_bound": "eigensolver",
    "cosine_curve": "eigensolver",
    "cosine_curve_descent_lhs": "eigensolver",
    "eigen_residual": "eigensolver",
    "is_sign_changing": "eigensolver",
    "nodal_domains": "eigensolver",
    "NodalLemmaReport": "eigensolver",
    "nodal_lemma_check": "eigensolver",
    "FKReport": "inequalities",
    "HKSReport": "inequalities",
    "SweepRow": "inequalities",
    "PoincareReport": "inequalities",
    "SobolevReport": "inequalities",
    "LinfReport": "inequalities",
    "faber_krahn_check": "inequalities",
    "hks_check": "inequalities",
    "hks_sweep": "inequalities",
    "poincare_localized_check": "inequalities",
    "sobolev_localized_check": "inequalities",
    "linf_bound_check": "inequalities",
}

__all__ = sorted(_EXPORTS) + ["errors", "pointwise"]


def __getattr__(name):
    target = _EXPORTS.get(name)
    if target is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    value = getattr(importlib.import_module(f".{target}", __name__), name)
    globals()[name] = value
    return value


def __dir__():
    return sorted(set(globals()) | set(__all__))
