import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eiglab.errors import StructureInconsistent
from eiglab.jordan import JordanSpec, build_matrix, suite_spec
from eiglab.structure import (
    analyze,
    blocks_from_weyr,
    cluster_eigenvalues,
    geometric_multiplicity,
    minimal_polynomial_degree,
    structure_summary,
    weyr_sequence,
)


def jordan(lam, k):
    return lam * np.eye(k) + np.diag(np.ones(k - 1), 1)


def block_diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    pos = 0
    for b in blocks:
        k = b.shape[0]
        out[pos:pos + k, pos:pos + k] = b
        pos += k
    return out


def test_cluster_forced_by_gaps():
    clusters = cluster_eigenvalues([1.0, 1.0 + 1e-12, 3.0], 1e-8)
    assert [len(m) for _, m in clusters] == [2, 1]


def test_cluster_chain_linkage():
    tol = 1e-3
    clusters = cluster_eigenvalues([0.0, tol / 2, tol], tol)
    assert len(clusters) == 1 and len(clusters[0][1]) == 3
    assert clusters[0][0] == pytest.approx(tol / 2)


def test_cluster_of_diagonal_eigenvalues():
    from eiglab.eigen import eigenvalues

    clusters = cluster_eigenvalues(eigenvalues(np.diag([1.0, 1, 2, 2, 2])), 1e-8)
    assert [len(m) for _, m in clusters] == [2, 3]


def test_cluster_rejects_nonpositive_tol():
    with pytest.raises(ValueError):
        cluster_eigenvalues([1.0], 0.0)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=1, max_size=12),
       st.floats(1e-6, 1.0), st.integers(0, 2**32 - 1))
def test_cluster_order_invariant(values, tol, seed):
    perm = np.random.default_rng(seed).permutation(len(values))
    a = cluster_eigenvalues(values, tol)
    b = cluster_eigenvalues([values[i] for i in perm], tol)
    assert sorted(len(m) for _, m in a) == sorted(len(m) for _, m in b)
    assert sum(len(m) for _, m in a) == len(values)
    means = [c for c, _ in a]
    # Representatives of different clusters are separated by more than tol
    # only through their members; members of distinct clusters always are.
    for i, (_, mi) in enumerate(a):
        for _, mj in a[i + 1:]:
            assert min(abs(x - y) for x in mi for y in mj) > tol
    assert len(means) == len(a)


def test_geometric_multiplicity_examples():
    assert geometric_multiplicity(np.eye(3), 1.0) == 3
    assert geometric_multiplicity(jordan(5.0, 3), 5.0) == 1
    assert geometric_multiplicity(block_diag(jordan(0.0, 2), jordan(0.0, 2)), 0.0) == 2


def test_analyze_single_jordan_block():
    s = analyze(jordan(5.0, 3), defective=True)
    assert s.distinct == 1
    c = s.clusters[0]
    assert (c.algebraic, c.geometric, c.defect, c.block_sizes) == (3, 1, 2, (3,))
    assert s.mpd == 3
    assert abs(c.value - 5) < 1e-4


def test_analyze_diagonal():
    s = analyze(np.diag([1.0, 2.0, 2.0]))
    assert [c.algebraic for c in s.clusters] == [1, 2]
    assert s.total_defect == 0 and s.mpd == 2


def test_analyze_similarity_transformed():
    spec = JordanSpec(((1, (2, 1)), (4, (1,))))
    a, _ = build_matrix(spec, 100, seed=3)
    s = analyze(a, defective=True)
    by_value = {round(c.value.real): c for c in s.clusters}
    assert (by_value[1].algebraic, by_value[1].geometric, by_value[1].defect) == (3, 2, 1)
    assert by_value[1].block_sizes == (2, 1)
    assert by_value[4].algebraic == 1
    assert s.mpd == 3


def test_minimal_polynomial_degree_examples():
    assert minimal_polynomial_degree(analyze(np.diag([1.0, 2.0, 3.0]))) == 3
    assert minimal_polynomial_degree(analyze(jordan(5.0, 3), defective=True)) == 3
    m = block_diag(jordan(0.0, 2), jordan(0.0, 2), jordan(1.0, 1))
    assert minimal_polynomial_degree(analyze(m, defective=True)) == 3


def test_weyr_sequence_and_blocks():
    m = block_diag(jordan(0.0, 3), jordan(0.0, 1), jordan(0.0, 2))
    w = weyr_sequence(m, 0.0, 6)
    assert w == [3, 5, 6]
    assert blocks_from_weyr(w) == (3, 2, 1)


def test_blocks_from_weyr_rejects_non_partition():
    with pytest.raises(StructureInconsistent):
        blocks_from_weyr([1, 3])


def test_to_dict_keys():
    d = analyze(np.diag([1.0, 2.0, 2.0])).to_dict()
    assert d["distinct"] == 2 and d["totalDefect"] == 0 and d["mpd"] == 2
    assert set(d["clusters"][0]) == {"re", "im", "m_a", "m_g", "d", "blockSizes"}


@given(seed=st.integers(0, 2**32 - 1))
def test_round_trip_and_invariants(seed):
    rng = np.random.default_rng(seed)
    spec = suite_spec(rng, n_range=(2, 12))
    a, _ = build_matrix(spec, 100, seed=rng)
    s = analyze(a, defective=spec.defect > 0)
    assert structure_summary(s) == spec.summary()
    assert s.mpd == spec.mpd
    assert sum(c.algebraic for c in s.clusters) == s.dimension == spec.n
    for c in s.clusters:
        assert c.algebraic >= c.geometric >= 1
        assert sum(c.block_sizes) == c.algebraic and len(c.block_sizes) == c.geometric
        # Conjugate-partition identity against the kernel dimensions.
        w = [0, *weyr_sequence(a, c.value, c.algebraic)]
        for k in range(1, len(w)):
            assert sum(b >= k for b in c.block_sizes) == w[k] - w[k - 1]
    assert (s.total_defect == 0) == all(set(c.block_sizes) == {1} for c in s.clusters)
    if s.total_defect == 0:
        assert s.mpd == s.distinct
