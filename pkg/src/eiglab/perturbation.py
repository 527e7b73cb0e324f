"""Low-rank perturbation experiments on matrices of known Jordan structure.

The bound checked here is ``|Lambda(A + B)| <= (rank B + 1) |Lambda(A)| + d(A)``
together with the per-eigenvalue statement ``m_g(A + B, lam) >= m_g(A, lam) - rank B``.
"""

from dataclasses import dataclass, field

import numpy as np

from .eigen import eigenvalues
from .errors import EiglabError
from .jordan import JordanSpec, build_matrix
from .matrix import random_rank_r, singular_values
from .structure import DEFAULT_CLUSTER_RTOL, DEFECTIVE_CLUSTER_RTOL, cluster_eigenvalues

SCALES = (1e-3, 1.0, 1e3)
# m_g(C, lam) cutoff, relative to ||C||_2 + |lam| (an upper bound on ||C - lam I||_2).
MG_RTOL = 1e-9


def theorem1_bound(distinct_a, defect_a, r):
    """Upper bound on the number of distinct eigenvalues of ``A + B``."""
    if distinct_a < 1 or defect_a < 0 or r < 0:
        raise ValueError("need distinct_a >= 1, defect_a >= 0, r >= 0")
    return (r + 1) * distinct_a + defect_a


def trial_rng(seed, index):
    """Generator for one trial; independent of execution order."""
    return np.random.default_rng([int(seed), int(index)])


def scaled_update(a, r, rng, scale):
    """Random rank-``r`` matrix with ``||B||_F = scale * ||A||_F``."""
    n = a.shape[0]
    b = random_rank_r(n, r, rng)
    if r == 0:
        return b
    return b * (scale * np.linalg.norm(a) / np.linalg.norm(b))


def measured_distinct(c, defective, values=None, cluster_rtol=None):
    """Number of eigenvalue clusters of ``c`` and the gap tolerance used.

    The gap is ``1e-3 * max(1, ||C||_F)`` when ``A`` was defective and
    ``1e-6 * max(1, ||C||_F)`` otherwise. Merging too much can only lower the
    count, so a bound violation measured this way is not clustering noise.
    """
    rtol = cluster_rtol
    if rtol is None:
        rtol = DEFECTIVE_CLUSTER_RTOL if defective else DEFAULT_CLUSTER_RTOL
    tol = rtol * max(1.0, float(np.linalg.norm(c)))
    if values is None:
        values = eigenvalues(c)
    return len(cluster_eigenvalues(values, tol)), tol


def mg_at(c, lam, rtol=MG_RTOL):
    """``n - rank(C - lam I)`` with cutoff ``rtol * (||C||_2 + |lam|)``."""
    n = c.shape[0]
    threshold = rtol * (np.linalg.norm(c, 2) + abs(lam))
    return n - singular_values(c - lam * np.eye(n), threshold=threshold).numerical_rank


@dataclass
class BoundReport:
    spec: JordanSpec
    rank: int
    trial: int
    scale: float
    measured_distinct: int = -1
    distinct_tight: int = -1
    cluster_tol: float = float("nan")
    mg_drops: list = field(default_factory=list)
    error: str = ""

    @property
    def bound(self):
        return theorem1_bound(self.spec.distinct, self.spec.defect, self.rank)

    @property
    def bound_ok(self):
        return not self.error and self.measured_distinct <= self.bound

    @property
    def drop_ok(self):
        return not self.error and all(mc >= ma - self.rank for _, ma, mc in self.mg_drops)

    @property
    def passed(self):
        return self.bound_ok and self.drop_ok

    def to_row(self):
        return {
            "trial": self.trial,
            "n": self.spec.n,
            "distinctA": self.spec.distinct,
            "defectA": self.spec.defect,
            "r": self.rank,
            "scale": self.scale,
            "measuredDistinctC": self.measured_distinct,
            "distinctTight": self.distinct_tight,
            "bound": self.bound,
            "mgDrops": ";".join(f"{ma}->{mc}" for _, ma, mc in self.mg_drops),
            "clusterTol": self.cluster_tol,
            "boundOk": self.bound_ok,
            "dropOk": self.drop_ok,
            "pass": self.passed,
            "error": self.error,
        }


def run_trial(spec, r, trial, seed, cond_cap=100.0, scales=SCALES, mg_rtol=MG_RTOL, cluster_rtol=None):
    """One bound trial: ``C = A + B`` with ``B`` scaled by ``scales[trial % len(scales)]``."""
    scale = scales[trial % len(scales)]
    report = BoundReport(spec=spec, rank=r, trial=trial, scale=scale)
    rng = trial_rng(seed, trial)
    try:
        a, _ = build_matrix(spec, cond_cap, seed=rng)
        c = a + scaled_update(a, r, rng, scale)
        values = eigenvalues(c)
        report.measured_distinct, report.cluster_tol = measured_distinct(c, spec.defect > 0, values, cluster_rtol)
        report.distinct_tight, _ = measured_distinct(c, False, values)
        report.mg_drops = [(lam, spec.geometric(lam), mg_at(c, lam, mg_rtol)) for lam in spec.eigenvalues]
    except EiglabError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    return report


def check_bound(spec, r, trials, seed, cond_cap=100.0, scales=SCALES, mg_rtol=MG_RTOL, cluster_rtol=None):
    """Run ``trials`` independent bound trials on one spec.

    Trial ``t`` draws its own ``V`` and ``B`` from ``(seed, t)``; errors are
    recorded in the report rather than raised.
    """
    if r > spec.n:
        raise ValueError(f"rank {r} exceeds n = {spec.n}")
    return [run_trial(spec, r, t, seed, cond_cap, scales, mg_rtol, cluster_rtol) for t in range(trials)]


def tightness_construction(k, seed):
    """``A = diag(1, 1, 2, 2, ..., k, k)`` and a random rank-one ``B``.

    Each doubled eigenvalue keeps one copy and generically releases one new
    eigenvalue, so ``A + B`` is expected to have ``2k`` distinct eigenvalues.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a = np.diag(np.repeat(np.arange(1, k + 1), 2)).astype(complex)
    b = random_rank_r(2 * k, 1, seed)
    return a, b, 2 * k
