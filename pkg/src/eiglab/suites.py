"""Seeded randomized batches shared by the CLI, the scripts and the tests."""

import numpy as np

from .deflation import (
    DeflationState,
    deflated_search,
    deflation_doubling_check,
    deflation_gradient,
    double_well_kkt,
    preconditioned_spectrum_check,
    random_saddle_jacobian,
    schur_preconditioner,
)
from .eigen import eigenvalues
from .jordan import build_matrix, random_spec, suite_spec
from .krylov import gmres, theorem2_check
from .perturbation import run_trial, tightness_construction
from .structure import analyze, cluster_eigenvalues, default_cluster_tolerance, structure_summary


def bound_suite(trials=500, seed=0, cond_cap=100.0):
    """Perturbation trials over random specs: n in 4..10, |Lambda| in 1..4,
    d in 0..2, r in 0..3, with B scales cycling through 1e-3, 1, 1e3."""
    rng = np.random.default_rng([seed, 2**31])
    reports = []
    for t in range(trials):
        spec = suite_spec(rng)
        r = int(rng.integers(0, 4))
        reports.append(run_trial(spec, r, t, seed, cond_cap))
    return reports


def roundtrip_suite(count=200, seed=0, cond_cap=100.0):
    """``(spec, recovered_summary, recovered_mpd)`` for random specs."""
    rng = np.random.default_rng([seed, 1])
    out = []
    for t in range(count):
        spec = suite_spec(rng)
        a, _ = build_matrix(spec, cond_cap, seed=[seed, 1, t])
        structure = analyze(a, defective=spec.defect > 0)
        out.append((spec, structure_summary(structure), structure.mpd))
    return out


def tightness_counts(k, seeds=100, seed=0):
    counts = []
    for s in range(seeds):
        a, b, _ = tightness_construction(k, [seed, k, s])
        c = a + b
        counts.append(len(cluster_eigenvalues(eigenvalues(c), default_cluster_tolerance(c))))
    return counts


def diagonalizable_spec(rng, n_range=(4, 10), max_distinct=4):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(1, min(max_distinct, n) + 1))
    return random_spec(rng, n, k, 0, avoid_zero=True)


def termination_suite(count=100, seed=0, tol=1e-10, cond_cap=100.0):
    """``(|Lambda(A)|, convergedAt)`` for GMRES with generic ``b``."""
    rng = np.random.default_rng([seed, 5])
    out = []
    for _ in range(count):
        spec = diagonalizable_spec(rng)
        a, _ = build_matrix(spec, cond_cap, seed=rng)
        _, trace = gmres(a, rng.standard_normal(spec.n), tol=tol)
        out.append((spec.distinct, trace.converged_at))
    return out


def doubling_suite(count=200, seed=0, tol=1e-10, cond_cap=100.0):
    rng = np.random.default_rng([seed, 6])
    return [
        theorem2_check(diagonalizable_spec(rng), [seed, 6, t, 1], [seed, 6, t, 2], tol=tol, cond_cap=cond_cap)
        for t in range(count)
    ]


def saddle_spectrum_suite(count=50, seed=0, n1=6, n2=2):
    counts = []
    for t in range(count):
        jac = random_saddle_jacobian(n1, n2, seed=[seed, 7, t])
        counts.append(preconditioned_spectrum_check(jac, schur_preconditioner(jac, (n1, n2))))
    return counts


def default_deflation_run(max_roots=10):
    """Deflated search on the default toy KKT problem from ``u0 = 0.1 * ones``."""
    problem = double_well_kkt()
    u0 = np.full(problem.n, 0.1)
    return problem, u0, deflated_search(problem, u0, max_roots)


def deflation_doubling_suite(problem, state, count=50, seed=0, tol=1e-10):
    rng = np.random.default_rng([seed, 8])
    return [
        deflation_doubling_check(problem, state, rng.standard_normal(problem.n), rng.standard_normal(problem.n), tol)
        for _ in range(count)
    ]


def central_difference_gradient(state, u, step=1e-6):
    from .deflation import deflation_value

    u = np.asarray(u, dtype=float)
    grad = np.empty_like(u)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = step
        grad[i] = (deflation_value(state, u + e) - deflation_value(state, u - e)) / (2 * step)
    return grad


def gradient_suite(points=100, roots=1, seed=0, n=8, power=2.0):
    """Relative error of the closed-form gradient against central differences."""
    rng = np.random.default_rng([seed, 9, roots])
    errors = []
    for _ in range(points):
        state = DeflationState([rng.standard_normal(n) for _ in range(roots)], power)
        u = rng.standard_normal(n)
        exact = deflation_gradient(state, u)
        fd = central_difference_gradient(state, u)
        errors.append(float(np.linalg.norm(exact - fd) / np.linalg.norm(exact)))
    return errors
