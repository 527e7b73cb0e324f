"""Full (unrestarted) GMRES, Krylov grade, and the rank-one doubling checks."""

from dataclasses import dataclass, field

import numpy as np

from .errors import Breakdown, EiglabError, NoConvergence
from .jordan import build_matrix
from .matrix import as_matrix, as_vector, random_rank_r, singular_values
from .structure import analyze

DEFAULT_TOL = 1e-10
SENSITIVITY_TOLS = (1e-8, 1e-10, 1e-12)


@dataclass
class KrylovTrace:
    """Residual history of one GMRES run.

    ``residual_norms[0]`` is ``||b||`` (``x0 = 0``); ``residual_norms[j]`` is
    the minimal residual over the ``j``-dimensional Krylov space.
    """

    residual_norms: list
    converged_at: int
    tolerance: float
    operator_size: int

    @property
    def relative(self):
        r = np.asarray(self.residual_norms)
        return r / r[0]

    def to_csv(self):
        lines = ["iteration,residual"]
        lines += [f"{i},{r:.17g}" for i, r in enumerate(self.residual_norms)]
        return "\n".join(lines) + "\n"


def _givens(a, b):
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    norm = np.hypot(abs(a), abs(b))
    return abs(a) / norm, (a / abs(a)) * np.conj(b) / norm


def gmres(a, b, tol=DEFAULT_TOL, maxit=None):
    """Solve ``A x = b`` by full GMRES from ``x0 = 0``.

    Arnoldi uses modified Gram-Schmidt with one reorthogonalization pass; the
    Hessenberg least-squares problem is updated with Givens rotations.
    Convergence is the first ``j`` with ``||r_j|| <= tol * ||b||``.

    Returns ``(x, trace)``. Raises :class:`NoConvergence` (with
    ``partial=(x, trace)``) when ``maxit`` iterations do not suffice.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    b = as_vector(b, n)
    if maxit is None:
        maxit = n
    beta = np.linalg.norm(b)
    if beta == 0:
        raise ValueError("right-hand side must be nonzero")
    q = np.zeros((n, maxit + 1), dtype=complex)
    h = np.zeros((maxit + 1, maxit), dtype=complex)
    rots = []
    g = np.zeros(maxit + 1, dtype=complex)
    g[0] = beta
    q[:, 0] = b / beta
    residuals = [float(beta)]
    converged = None
    j = 0
    for j in range(maxit):
        w = a @ q[:, j]
        for _ in range(2):
            for i in range(j + 1):
                coeff = np.vdot(q[:, i], w)
                h[i, j] += coeff
                w = w - coeff * q[:, i]
        h[j + 1, j] = np.linalg.norm(w)
        for i, (c, s) in enumerate(rots):
            top = c * h[i, j] + s * h[i + 1, j]
            h[i + 1, j] = -np.conj(s) * h[i, j] + c * h[i + 1, j]
            h[i, j] = top
        c, s = _givens(h[j, j], h[j + 1, j])
        rots.append((c, s))
        h[j, j] = c * h[j, j] + s * h[j + 1, j]
        h[j + 1, j] = 0.0
        if h[j, j] == 0:
            # w = 0 and a zero pivot: A q_j lies in span(q_0..q_{j-1}), singular projection
            raise Breakdown(f"Arnoldi breakdown with singular projected matrix at step {j + 1}")
        g[j + 1] = -np.conj(s) * g[j]
        g[j] = c * g[j]
        residuals.append(float(abs(g[j + 1])))
        if residuals[-1] <= tol * beta:
            converged = j + 1
            break
        wnorm = np.linalg.norm(w)
        if wnorm == 0.0:
            break
        q[:, j + 1] = w / wnorm
    k = len(residuals) - 1
    y = np.linalg.solve(np.triu(h[:k, :k]), g[:k]) if k else np.zeros(0)
    x = q[:, :k] @ y
    trace = KrylovTrace(residuals, converged, tol, n)
    if converged is None:
        raise NoConvergence(
            f"GMRES reached relative residual {residuals[-1] / beta:.3e} > {tol:g} "
            f"after {k} iterations",
            partial=(x, trace),
        )
    return x, trace


def krylov_grade(a, b, rtol=1e-10):
    """Dimension of the Krylov space generated by ``b``.

    Smallest ``k`` such that ``[b, Ab, ..., A^k b]`` has numerical rank ``k``.
    Columns are normalized before the rank test (rank is scale-invariant);
    the singular value cutoff is ``rtol * sigma_1``.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    v = as_vector(b, n)
    if not np.any(v):
        raise ValueError("b must be nonzero")
    cols = [v / np.linalg.norm(v)]
    for k in range(1, n + 1):
        w = a @ cols[-1]
        norm = np.linalg.norm(w)
        if norm == 0:
            return k
        cols.append(w / norm)
        if singular_values(np.column_stack(cols), rtol=rtol).numerical_rank == k:
            return k
    return n


def generic_rhs(n, rng):
    return rng.standard_normal(n) + 0j


def deficient_rhs(v, columns):
    """Sum of selected columns of the similarity ``V`` (eigenvectors when the
    spec is diagonal). Its Krylov grade is at most ``len(columns)``."""
    return np.asarray(v)[:, list(columns)].sum(axis=1)


def _iterations(a, rhs, tol):
    try:
        _, trace = gmres(a, rhs, tol=tol)
        return trace.converged_at, ""
    except NoConvergence as exc:
        return None, f"stagnation: {exc}"


@dataclass
class DoublingReport:
    iters_a: int
    iters_c: int
    distinct_a: int
    tolerance: float
    by_tolerance: dict = field(default_factory=dict)
    max_block_c: int = -1
    failure: str = ""

    @property
    def ratio(self):
        if not self.iters_a or self.iters_c is None:
            return float("nan")
        return self.iters_c / self.iters_a

    @property
    def passed(self):
        return (
            not self.failure
            and self.iters_a is not None
            and self.iters_c is not None
            and self.iters_c <= 2 * self.iters_a
        )

    @property
    def block_ok(self):
        return 0 < self.max_block_c <= self.distinct_a

    def to_row(self):
        return {
            "itersA": self.iters_a,
            "itersC": self.iters_c,
            "ratio": self.ratio,
            "pass": self.passed,
            "distinctA": self.distinct_a,
            "maxBlockC": self.max_block_c,
            "blockOk": self.block_ok,
            "tolerance": self.tolerance,
            "tolerancesUsed": {f"{t:g}": v for t, v in self.by_tolerance.items()},
            "failure": self.failure,
        }


def doubling_report(a, c, rhs_a, rhs_c, distinct_a, tol=DEFAULT_TOL, check_blocks=True, cluster_tol=None):
    """Compare GMRES iteration counts on ``A x = b`` and ``C y = d``.

    A failure is labelled ``stagnation`` when GMRES does not reach the
    tolerance at all and ``count`` when it converges but ``itersC > 2 itersA``.
    """
    iters_a, fail_a = _iterations(a, rhs_a, tol)
    iters_c, fail_c = _iterations(c, rhs_c, tol)
    report = DoublingReport(iters_a, iters_c, distinct_a, tol)
    for t in SENSITIVITY_TOLS:
        report.by_tolerance[t] = (_iterations(a, rhs_a, t)[0], _iterations(c, rhs_c, t)[0])
    if fail_a or fail_c:
        report.failure = fail_a or fail_c
    elif iters_c > 2 * iters_a:
        report.failure = f"count: itersC={iters_c} > 2*itersA={2 * iters_a}"
    if check_blocks:
        try:
            report.max_block_c = analyze(c, tol=cluster_tol).max_block
        except EiglabError as exc:
            report.failure = report.failure or f"analysis: {exc}"
    return report


def theorem2_check(
    spec, seed_b, seed_rhs, tol=DEFAULT_TOL, cond_cap=100.0, scale=1.0, rank=1, cluster_tol=None
):
    """Build diagonalizable ``A`` from ``spec``, ``C = A + B`` with rank-one ``B``.

    ``B`` has ``||B||_F = scale * ||A||_F`` and the two right-hand sides are
    independent standard normal draws. ``rank=0`` gives the unperturbed
    control (``C = A``).
    """
    if spec.defect != 0:
        raise ValueError("theorem2_check needs a diagonalizable spec (defect 0)")
    rng_b = np.random.default_rng(seed_b)
    a, _ = build_matrix(spec, cond_cap, seed=rng_b)
    b = random_rank_r(spec.n, rank, rng_b)
    if rank:
        b *= scale * np.linalg.norm(a) / np.linalg.norm(b)
    c = a + b
    rng_rhs = np.random.default_rng(seed_rhs)
    rhs_a = generic_rhs(spec.n, rng_rhs)
    rhs_c = generic_rhs(spec.n, rng_rhs)
    return doubling_report(a, c, rhs_a, rhs_c, spec.distinct, tol, cluster_tol=cluster_tol)


def jordan_block_bound_check(c, distinct_a, tol=None):
    """True iff every Jordan block of ``C`` has size at most ``distinct_a``."""
    return analyze(c, tol=tol).max_block <= distinct_a
