import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eiglab.errors import DimensionMismatch, ParseError
from eiglab.mmio import format_matrix, parse_matrix, read_matrix, write_matrix


def test_identity_round_trip(tmp_path):
    path = tmp_path / "eye.mtx"
    write_matrix(path, np.eye(2))
    np.testing.assert_array_equal(read_matrix(path), np.eye(2))
    assert "real" in path.read_text().splitlines()[0]


def test_coordinate_single_entry():
    text = "%%MatrixMarket matrix coordinate real general\n% one entry\n2 2 1\n1 1 2.5\n"
    np.testing.assert_array_equal(parse_matrix(text), [[2.5, 0], [0, 0]])


def test_complex_round_trip_is_exact(tmp_path, rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    path = tmp_path / "c.mtx"
    write_matrix(path, a, comment="random complex")
    back = read_matrix(path)
    assert np.max(np.abs(back.real - a.real)) == 0
    assert np.max(np.abs(back.imag - a.imag)) == 0


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=finite),
       arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=finite))
def test_round_trip_property(re, im):
    if re.shape == im.shape:
        a = re + 1j * im
    else:
        a = re.astype(complex)
    back = parse_matrix(format_matrix(a))
    np.testing.assert_array_equal(back, a)


def test_array_layout_is_column_major():
    text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"
    np.testing.assert_array_equal(parse_matrix(text), [[1, 3], [2, 4]])


def test_symmetric_and_hermitian_coordinate():
    sym = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 5\n"
    np.testing.assert_array_equal(parse_matrix(sym), [[1, 5], [5, 0]])
    herm = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 1 2\n"
    np.testing.assert_array_equal(parse_matrix(herm), [[0, 1 - 2j], [1 + 2j, 0]])
    skew = "%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n"
    np.testing.assert_array_equal(parse_matrix(skew), [[0, -3], [3, 0]])


def test_pattern_field():
    text = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 2\n"
    np.testing.assert_array_equal(parse_matrix(text), [[0, 0], [0, 1]])


def test_bad_header_reports_line_one():
    with pytest.raises(ParseError) as info:
        parse_matrix("%%NotMatrixMarket\n1 1\n1\n")
    assert info.value.line == 1


def test_bad_entry_reports_its_line():
    text = "%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 1.0\n1 x 2.0\n"
    with pytest.raises(ParseError) as info:
        parse_matrix(text)
    assert info.value.line == 5
    assert "line 5" in str(info.value)


def test_out_of_range_index():
    text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"
    with pytest.raises((ParseError, DimensionMismatch)):
        parse_matrix(text)


def test_entry_count_mismatch():
    with pytest.raises((ParseError, DimensionMismatch)):
        parse_matrix("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n")
