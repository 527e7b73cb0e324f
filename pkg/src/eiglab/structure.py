"""Numerical Jordan structure: distinct eigenvalues, multiplicities, defectivity,
Jordan block sizes and minimal polynomial degree."""

from dataclasses import dataclass, field

import numpy as np

from .eigen import eigenvalues
from .errors import StructureInconsistent
from .matrix import as_matrix, singular_values

DEFAULT_CLUSTER_RTOL = 1e-6
DEFECTIVE_CLUSTER_RTOL = 1e-3
# Cutoff for rank((A - lam I)^k) is DEFAULT_WEYR_RTOL * (||A||_2 + |lam|)^k.
DEFAULT_WEYR_RTOL = 1e-10


@dataclass
class EigenCluster:
    value: complex
    algebraic: int
    geometric: int
    block_sizes: tuple
    members: tuple = field(default=(), repr=False)

    @property
    def defect(self):
        return self.algebraic - self.geometric

    @property
    def max_block(self):
        return max(self.block_sizes)


@dataclass
class EigenStructure:
    clusters: list
    dimension: int
    cluster_tolerance: float
    rank_rtol: float

    @property
    def distinct(self):
        return len(self.clusters)

    @property
    def total_defect(self):
        return sum(c.defect for c in self.clusters)

    @property
    def mpd(self):
        return minimal_polynomial_degree(self)

    @property
    def max_block(self):
        return max(c.max_block for c in self.clusters)

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "distinct": self.distinct,
            "totalDefect": self.total_defect,
            "mpd": self.mpd,
            "clusterTolerance": self.cluster_tolerance,
            "rankRtol": self.rank_rtol,
            "clusters": [
                {
                    "re": float(np.real(c.value)),
                    "im": float(np.imag(c.value)),
                    "m_a": c.algebraic,
                    "m_g": c.geometric,
                    "d": c.defect,
                    "blockSizes": list(c.block_sizes),
                }
                for c in self.clusters
            ],
        }


def default_cluster_tolerance(a, defective=False):
    rtol = DEFECTIVE_CLUSTER_RTOL if defective else DEFAULT_CLUSTER_RTOL
    return rtol * max(1.0, float(np.linalg.norm(a)))


def cluster_eigenvalues(values, tol):
    """Single-linkage clusters of ``values`` at gap ``tol``.

    Returns a list of ``(mean, members)`` pairs ordered by (real, imag) of the
    mean. Two values share a cluster iff a chain of gaps ``<= tol`` joins them.
    """
    if tol <= 0:
        raise ValueError("cluster tolerance must be positive")
    vals = np.asarray(values, dtype=complex).reshape(-1)
    n = vals.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(vals[:, None] - vals[None, :])
    for i, j in zip(*np.nonzero(np.triu(dist <= tol, k=1))):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(vals[i])
    out = [(complex(np.mean(g)), tuple(g)) for g in groups.values()]
    out.sort(key=lambda c: (c[0].real, c[0].imag))
    return out


def geometric_multiplicity(a, lam, threshold=None, rtol=None):
    """``n - rank(A - lam I)``; the cutoff defaults to that of :func:`singular_values`."""
    a = as_matrix(a, square=True)
    n = a.shape[0]
    shifted = a - lam * np.eye(n)
    return n - singular_values(shifted, threshold=threshold, rtol=rtol).numerical_rank


def weyr_sequence(a, lam, algebraic, rtol=DEFAULT_WEYR_RTOL):
    """Kernel dimensions ``w_k = dim ker (A - lam I)^k`` for k = 1, 2, ...

    The rank cutoff for the k-th power is ``rtol * (||A||_2 + |lam|)^k``, an
    upper bound on ``||(A - lam I)^k||`` that stays meaningful when the power is
    numerically zero. Values are clamped into ``[w_{k-1}, algebraic]``; the
    sequence ends once it reaches ``algebraic``.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    shifted = a - lam * np.eye(n)
    scale = np.linalg.norm(a, 2) + abs(lam)
    power = shifted.copy()
    weyr = []
    prev = 0
    for k in range(1, algebraic + 1):
        w = n - singular_values(power, threshold=rtol * scale**k).numerical_rank
        w = min(max(w, prev), algebraic)
        if w == prev:
            raise StructureInconsistent(
                f"Weyr sequence stalled at {w} < m_a = {algebraic} for eigenvalue {lam}"
            )
        weyr.append(w)
        prev = w
        if w == algebraic:
            break
        power = power @ shifted
    return weyr


def blocks_from_weyr(weyr):
    """Jordan block sizes (nonincreasing) from a Weyr kernel sequence.

    ``weyr[k-1] - weyr[k-2]`` counts the blocks of size ``>= k``; the block
    sizes are the conjugate partition of those differences.
    """
    diffs = np.diff([0, *weyr])
    if np.any(diffs[1:] > diffs[:-1]):
        raise StructureInconsistent(f"Weyr differences {diffs.tolist()} are not nonincreasing")
    sizes = [int(np.count_nonzero(diffs > j)) for j in range(int(diffs[0]))]
    return tuple(sorted(sizes, reverse=True))


def analyze(a, tol=None, rank_rtol=DEFAULT_WEYR_RTOL, defective=False):
    """Recover the eigen/Jordan structure of ``a``.

    ``tol`` is the single-linkage cluster gap; by default
    ``1e-6 * max(1, ||A||_F)``, or ``1e-3 * max(1, ||A||_F)`` when the caller
    signals that defective eigenvalues are expected.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    if tol is None:
        tol = default_cluster_tolerance(a, defective)
    values = eigenvalues(a)
    clusters = []
    for mean, members in cluster_eigenvalues(values, tol):
        m_a = len(members)
        weyr = weyr_sequence(a, mean, m_a, rtol=rank_rtol)
        sizes = blocks_from_weyr(weyr)
        clusters.append(EigenCluster(mean, m_a, weyr[0], sizes, members))
    if sum(c.algebraic for c in clusters) != n:
        raise StructureInconsistent("algebraic multiplicities do not sum to n")
    return EigenStructure(clusters, n, float(tol), float(rank_rtol))


def minimal_polynomial_degree(structure):
    return sum(max(c.block_sizes) for c in structure.clusters)


def structure_summary(structure):
    """Integer fingerprint used for exact comparisons against ground truth."""
    return sorted((c.algebraic, c.geometric, c.block_sizes) for c in structure.clusters)
