"""Prescribed Jordan structures and matrices that realize them."""

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CondCapUnreachable
from .matrix import condition_number


@dataclass(frozen=True)
class JordanSpec:
    """Distinct eigenvalues, each with the sizes of its Jordan blocks.

    ``blocks`` is a tuple of ``(eigenvalue, sizes)`` pairs.
    """

    blocks: tuple

    def __post_init__(self):
        normalized = []
        for lam, sizes in self.blocks:
            sizes = tuple(sorted((int(s) for s in sizes), reverse=True))
            if not sizes or min(sizes) < 1:
                raise ValueError(f"eigenvalue {lam} needs at least one block of size >= 1")
            normalized.append((complex(lam), sizes))
        if not normalized:
            raise ValueError("a JordanSpec needs at least one eigenvalue")
        lams = [lam for lam, _ in normalized]
        if len(set(lams)) != len(lams):
            raise ValueError("eigenvalues in a JordanSpec must be distinct")
        object.__setattr__(self, "blocks", tuple(normalized))

    @property
    def n(self):
        return sum(sum(s) for _, s in self.blocks)

    @property
    def eigenvalues(self):
        return [lam for lam, _ in self.blocks]

    @property
    def distinct(self):
        return len(self.blocks)

    def algebraic(self, lam):
        return sum(self._sizes(lam))

    def geometric(self, lam):
        return len(self._sizes(lam))

    def _sizes(self, lam):
        for mu, sizes in self.blocks:
            if mu == lam:
                return sizes
        raise KeyError(lam)

    @property
    def defect(self):
        return sum(sum(s) - len(s) for _, s in self.blocks)

    @property
    def mpd(self):
        return sum(max(s) for _, s in self.blocks)

    @property
    def max_block(self):
        return max(max(s) for _, s in self.blocks)

    @property
    def min_gap(self):
        if len(self.blocks) < 2:
            return np.inf
        return min(abs(a - b) for a, b in combinations(self.eigenvalues, 2))

    def summary(self):
        """Sorted ``(m_a, m_g, block_sizes)`` triples, comparable with
        :func:`eiglab.structure.structure_summary`."""
        return sorted((sum(s), len(s), s) for _, s in self.blocks)

    def jordan_matrix(self):
        n = self.n
        j = np.zeros((n, n), dtype=complex)
        pos = 0
        for lam, sizes in self.blocks:
            for size in sizes:
                idx = np.arange(pos, pos + size)
                j[idx, idx] = lam
                j[idx[:-1], idx[1:]] = 1.0
                pos += size
        return j

    def to_dict(self):
        return {
            "blocks": [
                {"re": lam.real, "im": lam.imag, "sizes": list(sizes)} for lam, sizes in self.blocks
            ]
        }

    @classmethod
    def from_dict(cls, data):
        try:
            blocks = [
                (complex(b.get("re", 0.0), b.get("im", 0.0)), tuple(b["sizes"]))
                for b in data["blocks"]
            ]
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed JordanSpec: {exc}") from None
        return cls(tuple(blocks))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def diagonal(cls, values):
        """Spec of ``diag(values)``; repeated values become repeated 1x1 blocks."""
        counts = {}
        for v in values:
            counts[complex(v)] = counts.get(complex(v), 0) + 1
        return cls(tuple((lam, (1,) * c) for lam, c in counts.items()))


def build_matrix(spec, cond_cap=100.0, seed=0, max_draws=100):
    """``A = V J V^{-1}`` for the Jordan matrix ``J`` of ``spec``.

    ``V`` is a real Gaussian matrix redrawn until ``cond(V) <= cond_cap``
    (``cond_cap == 1`` means ``V = I``). Returns ``(A, V)``.
    """
    if cond_cap < 1:
        raise ValueError("cond_cap must be >= 1")
    j = spec.jordan_matrix()
    n = spec.n
    if cond_cap == 1:
        return j, np.eye(n, dtype=complex)
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        v = rng.standard_normal((n, n))
        if condition_number(v) <= cond_cap:
            a = np.linalg.solve(v.T, (v @ j).T).T
            return a, v.astype(complex)
    raise CondCapUnreachable(f"no V with cond <= {cond_cap} in {max_draws} draws (n={n})")


def _sample_eigenvalues(rng, k, min_gap, radius, complex_prob, avoid_zero):
    out = []
    while len(out) < k:
        re = rng.uniform(-radius, radius)
        im = rng.uniform(-radius, radius) if rng.random() < complex_prob else 0.0
        lam = complex(round(re, 3), round(im, 3))
        if avoid_zero and abs(lam) < min_gap:
            continue
        if all(abs(lam - mu) >= min_gap for mu in out):
            out.append(lam)
    return out


def random_spec(rng, n, distinct, defect, min_gap=0.5, radius=2.5, complex_prob=0.3, avoid_zero=False):
    """Random JordanSpec of size ``n`` with ``distinct`` eigenvalues and total defect ``defect``.

    There are ``n - defect`` blocks in all; each eigenvalue gets at least one.
    ``avoid_zero`` also keeps every eigenvalue ``min_gap`` away from the
    origin, for experiments that need a safely nonsingular matrix.
    """
    nblocks = n - defect
    if distinct < 1 or defect < 0 or nblocks < distinct:
        raise ValueError(f"infeasible spec request n={n}, distinct={distinct}, defect={defect}")
    sizes = np.ones(nblocks, dtype=int)
    for _ in range(defect):
        sizes[rng.integers(nblocks)] += 1
    owner = np.concatenate([np.arange(distinct), rng.integers(distinct, size=nblocks - distinct)])
    rng.shuffle(owner)
    lams = _sample_eigenvalues(rng, distinct, min_gap, radius, complex_prob, avoid_zero)
    blocks = tuple((lams[i], tuple(sizes[owner == i].tolist())) for i in range(distinct))
    return JordanSpec(blocks)


def suite_spec(rng, n_range=(4, 10), distinct_range=(1, 4), defect_range=(0, 2), **kwargs):
    """Draw a spec from the randomized suite's parameter box."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    defect = int(rng.integers(defect_range[0], min(defect_range[1], n - 1) + 1))
    k_max = min(distinct_range[1], n - defect)
    distinct = int(rng.integers(distinct_range[0], k_max + 1))
    return random_spec(rng, n, distinct, defect, **kwargs)
