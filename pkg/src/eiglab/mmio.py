"""Matrix Market (.mtx) reading and writing for dense complex matrices.

Both the ``array`` (dense, column-major) and ``coordinate`` (1-based triplets)
layouts are read, with ``real``, ``integer``, ``complex`` and ``pattern``
fields and ``general``, ``symmetric``, ``skew-symmetric`` and ``hermitian``
symmetry. Writing always produces the ``array`` layout; ``%.17g`` keeps the
round trip exact.
"""

import numpy as np

from .errors import DimensionMismatch, ParseError
from .matrix import as_matrix

_FIELDS = {"real", "integer", "complex", "pattern"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric", "hermitian"}


def _data_lines(lines, start):
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        yield lineno, text.split()


def _parse_number(tokens, field, lineno):
    try:
        if field == "complex":
            if len(tokens) != 2:
                raise ParseError(f"complex entry needs 2 components, got {len(tokens)}", lineno)
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ParseError(f"{field} entry needs 1 component, got {len(tokens)}", lineno)
        return complex(float(tokens[0]))
    except ValueError as exc:
        raise ParseError(f"bad number {' '.join(tokens)!r}: {exc}", lineno) from None


def parse_matrix(text):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].strip().split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise ParseError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'", 1)
    layout, field, symmetry = (h.lower() for h in header[2:])
    if layout not in {"array", "coordinate"}:
        raise ParseError(f"unknown format {layout!r}", 1)
    if field not in _FIELDS:
        raise ParseError(f"unknown field {field!r}", 1)
    if symmetry not in _SYMMETRIES:
        raise ParseError(f"unknown symmetry {symmetry!r}", 1)
    if layout == "array" and field == "pattern":
        raise ParseError("pattern field is only valid with coordinate format", 1)

    body = _data_lines(lines, 1)
    try:
        lineno, size = next(body)
    except StopIteration:
        raise ParseError("missing size line", len(lines)) from None
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise ParseError(f"bad size line {' '.join(size)!r}", lineno) from None
    expected_dims = 2 if layout == "array" else 3
    if len(dims) != expected_dims or min(dims) < 0:
        raise ParseError(f"size line must hold {expected_dims} nonnegative integers", lineno)
    rows, cols = dims[0], dims[1]
    if rows < 1 or cols < 1:
        raise DimensionMismatch(f"matrix must be at least 1x1, header says {rows}x{cols}")
    if symmetry != "general" and rows != cols:
        raise DimensionMismatch(f"{symmetry} matrix must be square, header says {rows}x{cols}")

    out = np.zeros((rows, cols), dtype=complex)

    def mirror(i, j, value):
        if i == j:
            return
        if symmetry == "symmetric":
            out[j, i] = value
        elif symmetry == "skew-symmetric":
            out[j, i] = -value
        elif symmetry == "hermitian":
            out[j, i] = np.conj(value)

    if layout == "array":
        if symmetry == "general":
            slots = [(i, j) for j in range(cols) for i in range(rows)]
        elif symmetry == "skew-symmetric":
            slots = [(i, j) for j in range(cols) for i in range(j + 1, rows)]
        else:
            slots = [(i, j) for j in range(cols) for i in range(j, rows)]
        count = 0
        for lineno, tokens in body:
            if count >= len(slots):
                raise DimensionMismatch(f"line {lineno}: more entries than the {len(slots)} declared")
            i, j = slots[count]
            value = _parse_number(tokens, field, lineno)
            out[i, j] = value
            mirror(i, j, value)
            count += 1
        if count != len(slots):
            raise DimensionMismatch(f"expected {len(slots)} entries, found {count}")
        return out

    nnz = dims[2]
    count = 0
    for lineno, tokens in body:
        if count >= nnz:
            raise DimensionMismatch(f"line {lineno}: more entries than the {nnz} declared")
        if len(tokens) < 2:
            raise ParseError("coordinate entry needs row and column indices", lineno)
        try:
            i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
        except ValueError:
            raise ParseError(f"bad indices {tokens[0]!r} {tokens[1]!r}", lineno) from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise DimensionMismatch(f"line {lineno}: index ({i + 1}, {j + 1}) outside {rows}x{cols}")
        value = 1.0 + 0j if field == "pattern" else _parse_number(tokens[2:], field, lineno)
        out[i, j] = value
        mirror(i, j, value)
        count += 1
    if count != nnz:
        raise DimensionMismatch(f"expected {nnz} entries, found {count}")
    return out


def read_matrix(path):
    with open(path, encoding="ascii") as fh:
        return as_matrix(parse_matrix(fh.read()))


def format_matrix(a, comment=None):
    a = as_matrix(a)
    is_real = not np.any(a.imag)
    lines = [f"%%MatrixMarket matrix array {'real' if is_real else 'complex'} general"]
    if comment:
        lines.extend(f"% {c}" for c in comment.splitlines())
    lines.append(f"{a.shape[0]} {a.shape[1]}")
    for value in a.T.reshape(-1):
        if is_real:
            lines.append(f"{value.real:.17g}")
        else:
            lines.append(f"{value.real:.17g} {value.imag:.17g}")
    return "\n".join(lines) + "\n"


def write_matrix(path, a, comment=None):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(a, comment))
