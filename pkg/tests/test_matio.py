import math

import numpy as np
import pytest

from twirlsim import ParseError, read_matrix, write_matrix
from twirlsim.matio import format_complex, format_float, matrix_to_text, parse_matrix_text


def test_format_float_round_trips():
    for x in (1.0 / 3.0, math.pi, 1e-300, 1e300, -0.0, 0.1 + 0.2):
        assert float(format_float(x)) == x


def test_format_complex_signs():
    assert format_complex(1 + 2j) == "1+2j"
    assert format_complex(1 - 2j) == "1-2j"
    assert format_complex(complex(1.0, -0.0)) == "1-0j"
    assert complex(format_complex(complex(1.0, -0.0))) == 1 - 0j


def test_matrix_text_shape():
    text = matrix_to_text(np.eye(2))
    lines = text.splitlines()
    assert lines[0] == "2 2"
    assert len(lines) == 3
    assert text.endswith("\n")


def test_round_trip_exact(tmp_path):
    rng = np.random.default_rng(44)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m[0, 0] = 1.0 / 3.0 + 1e-300j
    m[1, 2] = complex(math.pi, -0.0)
    path = tmp_path / "m.txt"
    write_matrix(path, m)
    back = read_matrix(path)
    assert np.array_equal(back, m)
    # writing the read-back matrix reproduces the file byte for byte
    path2 = tmp_path / "m2.txt"
    write_matrix(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_non_square_round_trip(tmp_path):
    m = np.arange(6, dtype=float).reshape(2, 3) + 0j
    path = tmp_path / "rect.txt"
    write_matrix(path, m)
    assert np.array_equal(read_matrix(path), m)


def test_header_errors():
    with pytest.raises(ParseError) as err:
        parse_matrix_text("2\n1+0j 0+0j\n")
    assert err.value.line == 1
    assert "1 fields" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_matrix_text("a b\n")
    assert err.value.line == 1
    with pytest.raises(ParseError) as err:
        parse_matrix_text("0 2\n")
    assert "positive" in str(err.value)
    with pytest.raises(ParseError):
        parse_matrix_text("")


def test_row_count_mismatch():
    with pytest.raises(ParseError) as err:
        parse_matrix_text("2 2\n1+0j 0+0j\n")
    assert "expected 2 data rows, found 1" in str(err.value)


def test_entry_count_mismatch_reports_line():
    with pytest.raises(ParseError) as err:
        parse_matrix_text("2 2\n1+0j 0+0j\n1+0j\n")
    assert err.value.line == 3
    assert "expected 2 entries, found 1" in str(err.value)


def test_bad_entry_reports_line_and_column():
    with pytest.raises(ParseError) as err:
        parse_matrix_text("2 2\n1+0j 0+0j\n0+0j oops\n")
    assert err.value.line == 3
    assert err.value.column == 2
    assert "'oops'" in str(err.value)
