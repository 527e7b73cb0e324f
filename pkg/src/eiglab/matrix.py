"""Dense complex linear algebra substrate.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single gate that enforces shape and finiteness.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidRank, SingularMatrix

EPS = np.finfo(float).eps


def as_matrix(a, square=False):
    """Return ``a`` as a finite 2-D complex array (real input is embedded)."""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {m.shape}")
    return m


def as_vector(v, n=None):
    x = np.array(v, dtype=complex).reshape(-1)
    if n is not None and x.shape[0] != n:
        raise DimensionMismatch(f"vector of length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def lu_factor(a):
    """Partial-pivoting LU of a square matrix.

    Raises :class:`SingularMatrix` if any pivot of ``U`` is at most
    ``n * eps * max|a_ij|``. The result is passed to :func:`lu_apply`.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    tol = n * EPS * np.max(np.abs(a))
    pivots = np.abs(np.diag(lu))
    if tol == 0 or np.min(pivots) <= tol:
        k = int(np.argmin(pivots))
        raise SingularMatrix(f"pivot {k} has magnitude {pivots[k]:.3e} <= tolerance {tol:.3e}")
    return lu, piv


def lu_apply(factors, rhs):
    lu, _ = factors
    b = np.asarray(rhs, dtype=complex)
    if b.shape[0] != lu.shape[0]:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, matrix has {lu.shape[0]}")
    return scipy.linalg.lu_solve(factors, b, check_finite=False)


def lu_solve(a, rhs):
    """Solve ``a @ x = rhs`` (vector or block of columns) by pivoted LU."""
    return lu_apply(lu_factor(a), rhs)


@dataclass(frozen=True)
class RankReport:
    singular_values: np.ndarray
    threshold: float

    @property
    def numerical_rank(self):
        return int(np.count_nonzero(self.singular_values > self.threshold))


def singular_values(a, threshold=None, rtol=None):
    """Singular values and numerical rank of ``a``.

    The default cutoff is ``max(m, n) * eps * sigma_1``. ``rtol`` replaces the
    ``max(m, n) * eps`` factor; ``threshold`` sets the absolute cutoff and wins
    over both.
    """
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    if threshold is None:
        if rtol is None:
            rtol = max(a.shape) * EPS
        threshold = rtol * (s[0] if s.size else 0.0)
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return RankReport(singular_values=s, threshold=float(threshold))


def numerical_rank(a, threshold=None, rtol=None):
    return singular_values(a, threshold=threshold, rtol=rtol).numerical_rank


def random_rank_r(n, r, seed, complex_entries=False):
    """Random ``n x n`` matrix of exact rank ``r``: a sum of ``r`` outer products.

    Factors are Gaussian; deterministic for a fixed ``seed`` (int or Generator).
    """
    if r < 0 or r > n:
        raise InvalidRank(f"rank {r} outside [0, {n}]")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, r))
    v = rng.standard_normal((n, r))
    if complex_entries:
        u = u + 1j * rng.standard_normal((n, r))
        v = v + 1j * rng.standard_normal((n, r))
    return (u @ v.T).astype(complex)


def condition_number(a):
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    return np.inf if s[-1] == 0 else float(s[0] / s[-1])
