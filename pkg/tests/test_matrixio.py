import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ccrflow.errors import ParseError
from ccrflow.flow import flow_trajectory
from ccrflow.matrixio import (
    CSV_COLUMNS,
    dumps,
    format_float,
    matrix_from_json,
    matrix_to_json,
    parse_grid,
    parse_trajectory_csv,
    read_matrix,
    trajectory_csv,
    write_matrix,
)

FINITE = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(arrays(float, (3, 3), elements=FINITE), arrays(float, (3, 3), elements=FINITE))
def test_matrix_roundtrip(re, im):
    a = re + 1j * im
    back = matrix_from_json(json.loads(dumps(matrix_to_json(a))))
    assert np.array_equal(back, a)


def test_real_matrix_has_null_im(tmp_path):
    p = tmp_path / "m.json"
    write_matrix(p, np.eye(2))
    obj = json.loads(p.read_text())
    assert obj["im"] is None and obj["dim"] == 2
    assert np.array_equal(read_matrix(p), np.eye(2))


@given(FINITE)
def test_float_roundtrip(x):
    assert float(format_float(x)) == x


@pytest.mark.parametrize(
    "text",
    ['{"re": [[1, 2]]}', '{"im": null}', '{"dim": 3, "re": [[1]]}', '{"re": [["a"]]}', "[1, 2]"],
)
def test_bad_matrix_objects(text):
    with pytest.raises(ParseError):
        matrix_from_json(json.loads(text))


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(ParseError):
        read_matrix(p)
    with pytest.raises(ParseError):
        read_matrix(tmp_path / "missing.json")


def test_dumps_is_stable():
    obj = {"b": 0.1, "a": [1, 2.5, None, True], "c": {"x": np.float64(1 / 3)}}
    assert dumps(obj) == dumps(obj)
    assert '"b": 0.10000000000000001' in dumps(obj)
    assert json.loads(dumps(obj))["c"]["x"] == 1 / 3


def test_csv_roundtrip(mu03):
    tr = flow_trajectory(mu03, [1, 2, 4, 8])
    text = trajectory_csv(tr.rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = parse_trajectory_csv(text)
    for parsed, row in zip(rows, tr.rows):
        for col in CSV_COLUMNS:
            assert parsed[col] == getattr(row, col)


def test_csv_bad_header():
    with pytest.raises(ParseError):
        parse_trajectory_csv("a,b\n1,2\n")


def test_parse_grid():
    assert parse_grid("1,2,4,...,1024") == [2.0**k for k in range(11)]
    assert parse_grid("0.5, 1.5") == [0.5, 1.5]
    assert parse_grid("1,3,...,81") == [1, 3, 9, 27, 81]
    for bad in ("1,...,8", "2,1,...,0.1", "1,x"):
        with pytest.raises(ParseError):
            parse_grid(bad)
