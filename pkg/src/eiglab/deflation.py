"""Saddle-point problems, Schur-complement preconditioning and deflated Newton.

A deflation operator ``M(u) = prod_i ||u - r_i||^{-p} + shift`` multiplies
the residual so that Newton's method cannot return to the known roots
``r_i``. Its Jacobian is a scaled copy of the original plus a rank-one term,
``J~ = M J + F E^T`` with ``E = grad M``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import AtRoot, Diverged, LinearSolveFailure, NoConvergence, SingularBlock, SingularMatrix
from .krylov import DEFAULT_TOL, gmres
from .matrix import lu_apply, lu_factor, lu_solve, singular_values
from .structure import analyze

AT_ROOT_DISTANCE = 1e-14


@dataclass
class SaddleProblem:
    """Nonlinear system ``F(u) = 0`` whose Jacobian is ``[[X, Y], [Z, 0]]``.

    ``residual`` and ``jacobian`` are callables of the state vector;
    ``block_sizes`` is ``(n1, n2)``.
    """

    residual: object
    jacobian: object
    block_sizes: tuple
    name: str = "saddle"
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return sum(self.block_sizes)

    def to_dict(self):
        return {
            "name": self.name,
            "blockSizes": list(self.block_sizes),
            "params": {k: np.asarray(v).tolist() for k, v in self.params.items()},
        }


def double_well_kkt(n1=6, n2=2, seed=0, c_scale=0.0):
    """KKT system of ``min sum_i (x_i^2 - 1)^2  s.t.  A x = c``.

    ``A`` is a random full-rank ``n2 x n1`` Gaussian matrix and
    ``c = c_scale * N(0, I)``. The state is ``u = (x, mu)`` and
    ``F(u) = (4 x (x^2 - 1) + A^T mu, A x - c)``.

    The default ``c = 0`` keeps the origin feasible and makes the root set
    symmetric under ``u -> -u``; deflated Newton from near the origin then
    finds several roots. With ``c != 0`` the damped iteration stalls far more
    often at nonzero local minima of ``||G||``.
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n2, n1))
    c = c_scale * rng.standard_normal(n2)

    def residual(u):
        x, mu = u[:n1], u[n1:]
        return np.concatenate([4 * x * (x * x - 1) + a.T @ mu, a @ x - c])

    def jacobian(u):
        x = u[:n1]
        j = np.zeros((n1 + n2, n1 + n2))
        j[:n1, :n1] = np.diag(12 * x * x - 4)
        j[:n1, n1:] = a.T
        j[n1:, :n1] = a
        return j

    return SaddleProblem(residual, jacobian, (n1, n2), "double-well-kkt", {"A": a, "c": c, "seed": seed})


def convex_kkt(n1=6, n2=2, seed=0):
    """KKT system of ``min 1/2 ||x - g||^2  s.t.  A x = c``; its only root is unique."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n2, n1))
    g = rng.standard_normal(n1)
    c = rng.standard_normal(n2)
    j = np.block([[np.eye(n1), a.T], [a, np.zeros((n2, n2))]])

    def residual(u):
        x, mu = u[:n1], u[n1:]
        return np.concatenate([x - g + a.T @ mu, a @ x - c])

    def jacobian(u):
        return j.copy()

    return SaddleProblem(residual, jacobian, (n1, n2), "convex-kkt", {"A": a, "c": c, "g": g, "seed": seed})


class SchurPreconditioner:
    """Block-diagonal ``P = diag(X, -S)`` with ``S = -Z X^{-1} Y``.

    ``P^{-1}`` is applied with exact (LU) solves against ``X`` and ``S``.
    """

    def __init__(self, jac, block_sizes):
        jac = np.asarray(jac)
        n1, n2 = block_sizes
        if jac.shape != (n1 + n2, n1 + n2):
            raise ValueError(f"Jacobian shape {jac.shape} does not match blocks {block_sizes}")
        if np.any(jac[n1:, n1:]):
            raise ValueError("the (2,2) block of a saddle-point Jacobian must be zero")
        self.n1, self.n2 = n1, n2
        self.x = jac[:n1, :n1]
        y = jac[:n1, n1:]
        z = jac[n1:, :n1]
        try:
            self._x_lu = lu_factor(self.x)
        except SingularMatrix as exc:
            raise SingularBlock(f"X block is singular: {exc}") from None
        self.s = -z @ lu_apply(self._x_lu, y)
        try:
            self._s_lu = lu_factor(self.s)
        except SingularMatrix as exc:
            raise SingularBlock(f"Schur complement is singular: {exc}") from None
        self.applies_exactly = True

    def matrix(self):
        n1, n2 = self.n1, self.n2
        p = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        p[:n1, :n1] = self.x
        p[n1:, n1:] = -self.s
        return p

    def solve(self, v):
        """``P^{-1} v`` for a vector or a block of columns."""
        v = np.asarray(v, dtype=complex)
        out = np.empty_like(v)
        out[: self.n1] = lu_apply(self._x_lu, v[: self.n1])
        out[self.n1:] = -lu_apply(self._s_lu, v[self.n1:])
        return out


def schur_preconditioner(jac, block_sizes):
    return SchurPreconditioner(jac, block_sizes)


def random_saddle_jacobian(n1=6, n2=2, seed=0):
    """``[[X, Y], [Y^T, 0]]`` with SPD ``X`` and Gaussian ``Y``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n1, n1))
    x = g @ g.T + n1 * np.eye(n1)
    y = rng.standard_normal((n1, n2))
    return np.block([[x, y], [y.T, np.zeros((n2, n2))]])


def preconditioned_spectrum_check(jac, precond, tol=None):
    """Number of distinct eigenvalues of ``P^{-1} J``.

    The cluster gap defaults to ``1e-6 * ||P^{-1} J||_F``.
    """
    pj = precond.solve(np.asarray(jac, dtype=complex))
    if tol is None:
        tol = 1e-6 * np.linalg.norm(pj)
    return analyze(pj, tol=tol).distinct


@dataclass
class DeflationState:
    """Known roots, pole power ``p`` and whether the ``+1`` shift is present."""

    roots: list = field(default_factory=list)
    power: float = 2.0
    shifted: bool = True

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError("deflation power must be positive")
        self.roots = [np.asarray(r, dtype=float) for r in self.roots]
        for i, ri in enumerate(self.roots):
            for rj in self.roots[i + 1:]:
                if np.linalg.norm(ri - rj) <= 1e-8 * (1 + np.linalg.norm(ri)):
                    raise ValueError("deflated roots must be pairwise distinct")

    def with_root(self, root):
        return DeflationState([*self.roots, root], self.power, self.shifted)

    def _distances(self, u):
        u = np.asarray(u, dtype=float)
        diffs = [u - r for r in self.roots]
        dists = [np.linalg.norm(d) for d in diffs]
        for i, d in enumerate(dists):
            if d < AT_ROOT_DISTANCE:
                raise AtRoot(f"point is {d:.1e} from deflated root {i}")
        return diffs, dists


def deflation_value(state, u):
    """``M(u)``; identically 1 when no roots are deflated."""
    if not state.roots:
        return 1.0
    _, dists = state._distances(u)
    prod = float(np.prod([d ** -state.power for d in dists]))
    return prod + (1.0 if state.shifted else 0.0)


def deflation_gradient(state, u):
    """``E = grad M(u)``.

    With ``P = prod_i d_i^{-p}``, ``grad P = -p P sum_i (u - r_i) / d_i^2``.
    """
    u = np.asarray(u, dtype=float)
    if not state.roots:
        return np.zeros_like(u)
    diffs, dists = state._distances(u)
    prod = float(np.prod([d ** -state.power for d in dists]))
    return -state.power * prod * sum(df / d**2 for df, d in zip(diffs, dists))


def deflated_system(problem, state, u):
    """``G = M F`` and ``J~ = M J + F E^T`` at ``u``."""
    u = np.asarray(u, dtype=float)
    m = deflation_value(state, u)
    e = deflation_gradient(state, u)
    f = problem.residual(u)
    j = problem.jacobian(u)
    return m * f, m * j + np.outer(f, e)


@dataclass
class NewtonResult:
    root: np.ndarray
    iterations: int
    damped_steps: int
    residual_norm: float


def newton_solve(problem, state, u0, max_iter=100, tol=1e-10, max_halvings=30):
    """Damped Newton on the deflated residual ``G``.

    Each step solves ``J~ delta = -G`` and halves the step (at most
    ``max_halvings`` times) until ``||G||`` decreases. Success is
    ``||F(u)|| <= tol``; a point that coincides with a deflated root is
    rejected. Raises :class:`Diverged` or :class:`LinearSolveFailure`.
    """
    u = np.array(u0, dtype=float)
    deflation_value(state, u)  # raises AtRoot at a deflated root
    damped = 0
    for it in range(max_iter + 1):
        f = problem.residual(u)
        fnorm = np.linalg.norm(f)
        if fnorm <= tol:
            for r in state.roots:
                if np.linalg.norm(u - r) <= 1e-6 * (1 + np.linalg.norm(r)):
                    raise Diverged("converged onto an already deflated root")
            return NewtonResult(u, it, damped, float(fnorm))
        if it == max_iter:
            break
        g, jt = deflated_system(problem, state, u)
        try:
            delta = lu_solve(jt, -g).real
        except SingularMatrix as exc:
            raise LinearSolveFailure(str(exc)) from None
        gnorm = np.linalg.norm(g)
        step = 1.0
        for _ in range(max_halvings + 1):
            trial = u + step * delta
            try:
                gtrial = deflation_value(state, trial) * np.linalg.norm(problem.residual(trial))
            except AtRoot:
                gtrial = np.inf
            if np.isfinite(gtrial) and gtrial < gnorm:
                break
            step /= 2
        else:
            raise Diverged(f"step underflow at iteration {it} (||G|| = {gnorm:.3e})")
        damped += step < 1.0
        u = trial
    raise Diverged(f"no convergence in {max_iter} iterations (||F|| = {fnorm:.3e})")


def deflated_search(problem, u0, max_roots, power=2.0, shifted=True, max_iter=100, tol=1e-10):
    """Roots found by repeated deflated Newton from the same ``u0``.

    Stops at the first failure or after ``max_roots`` roots.
    """
    if max_roots < 1:
        raise ValueError("max_roots must be >= 1")
    state = DeflationState([], power, shifted)
    results = []
    while len(results) < max_roots:
        try:
            res = newton_solve(problem, state, u0, max_iter=max_iter, tol=tol)
        except (Diverged, LinearSolveFailure, AtRoot):
            break
        results.append(res)
        state = state.with_root(res.root)
    return results


def rank_one_ratio(d):
    """``sigma_2 / sigma_1`` of ``d`` (0 when ``d`` vanishes)."""
    s = singular_values(d).singular_values
    if s[0] == 0:
        return 0.0
    return float(s[1] / s[0]) if s.size > 1 else 0.0


@dataclass
class DeflationDoublingReport:
    iters_a: int
    iters_c: int
    sigma_ratio: float
    deflation: float
    failure: str = ""

    @property
    def passed(self):
        return not self.failure and self.iters_c <= 2 * self.iters_a

    def to_row(self):
        return {
            "itersA": self.iters_a,
            "itersC": self.iters_c,
            "sigmaRatio": self.sigma_ratio,
            "M": self.deflation,
            "pass": self.passed,
            "failure": self.failure,
        }


def deflation_doubling_check(problem, state, u, rhs, tol=DEFAULT_TOL):
    """GMRES counts for ``A = M P^{-1} J`` and ``C = P^{-1} J~`` at ``u``.

    ``P`` is the Schur preconditioner of the undeflated Jacobian ``J(u)``.
    """
    u = np.asarray(u, dtype=float)
    jac = problem.jacobian(u)
    precond = schur_preconditioner(jac, problem.block_sizes)
    m = deflation_value(state, u)
    _, jt = deflated_system(problem, state, u)
    a = m * precond.solve(jac.astype(complex))
    c = precond.solve(jt.astype(complex))
    ratio = rank_one_ratio(c - a)
    iters = []
    failure = ""
    for op in (a, c):
        try:
            iters.append(gmres(op, rhs, tol=tol)[1].converged_at)
        except NoConvergence as exc:
            iters.append(None)
            failure = failure or f"stagnation: {exc}"
    return DeflationDoublingReport(iters[0], iters[1], ratio, m, failure)


def roots_to_json(problem, results):
    return json.dumps(
        {
            "problem": problem.to_dict(),
            "roots": [
                {
                    "u": r.root.tolist(),
                    "residualNorm": r.residual_norm,
                    "iterations": r.iterations,
                    "dampedSteps": r.damped_steps,
                }
                for r in results
            ],
        },
        indent=2,
    )
