"""Dense complex matrix text format.

First line: "d d". Then d rows of d whitespace-separated entries, each
written as re+imj (no spaces inside an entry) with 17 significant digits,
which round-trips every finite double exactly. Example for the identity:

    2 2
    1+0j 0+0j
    0+0j 1+0j
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .linalg import as_complex_matrix


def format_float(x: float) -> str:
    """17-significant-digit decimal text; exact on read-back."""
    return format(float(x), ".17g")


def format_complex(z: complex) -> str:
    z = complex(z)
    re = format_float(z.real)
    im = format_float(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}j"


def matrix_to_text(m) -> str:
    mat = as_complex_matrix(m)
    rows, cols = mat.shape
    lines = [f"{rows} {cols}"]
    for r in range(rows):
        lines.append(" ".join(format_complex(mat[r, c]) for c in range(cols)))
    return "\n".join(lines) + "\n"


def write_matrix(path, m) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(matrix_to_text(m))


def parse_matrix_text(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"header must be 'rows cols', found {len(header)} fields", 1)
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"header fields must be integers, got {lines[0]!r}", 1) from None
    if rows <= 0 or cols <= 0:
        raise ParseError(f"matrix dimensions must be positive, got {rows} x {cols}", 1)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != rows:
        raise ParseError(f"expected {rows} data rows, found {len(body)}")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for r, line in enumerate(body):
        fields = line.split()
        if len(fields) != cols:
            raise ParseError(f"expected {cols} entries, found {len(fields)}", r + 2)
        for c, token in enumerate(fields):
            try:
                out[r, c] = complex(token)
            except ValueError:
                raise ParseError(f"entry {token!r} is not a complex number",
                                 r + 2, c + 1) from None
    return out


def read_matrix(path) -> np.ndarray:
    with open(path, "r") as fh:
        return parse_matrix_text(fh.read())
