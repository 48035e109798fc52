import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from okuboflat import io
from okuboflat.errors import ConfigError
from okuboflat.painleve import default_state, linear_problem, okubo_frame
from okuboflat.realize import minimize, realize
from okuboflat.saito import flat_frame

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100)
@given(re=finite, im=finite)
def test_complex_round_trip(re, im):
    z = complex(re, im)
    text = io.dumps(io.cnum(z))
    back = io.from_cnum(json.loads(text))
    assert back == z
    assert io.dumps(io.cnum(back)) == text


def test_cnum_forms():
    assert io.from_cnum(2) == 2 + 0j
    with pytest.raises(ValueError):
        io.from_cnum([1, 2, 3])
    with pytest.raises(ValueError):
        io.dumps(io.cnum(complex(float("nan"), 0)))


def test_matrix_round_trip_and_layout():
    M = np.array([[1, 2j], [3, 4 - 1j], [0.5, -7]])
    d = io.cmat(M)
    assert d["rows"] == 3 and d["cols"] == 2
    assert d["entries"][1] == [0.0, 2.0]  # row-major
    assert np.array_equal(io.from_cmat(d), M)
    with pytest.raises(ValueError):
        io.from_cmat({"rows": 2, "cols": 2, "entries": [[0, 0]]})
    with pytest.raises(ValueError):
        io.from_cmat({"rows": 2})


def test_frame_round_trip():
    fr = okubo_frame("V", default_state("V"))
    back = io.frame_from_json(json.loads(io.dumps(io.frame_to_json(fr))))
    assert np.array_equal(back.T, fr.T) and np.array_equal(back.P, fr.P)
    assert back.blocks == fr.blocks and np.array_equal(back.zCoords, fr.zCoords)
    assert io.dumps(io.frame_to_json(back)) == io.dumps(io.frame_to_json(fr))


def test_connection_and_realization_round_trip():
    conn = linear_problem("III", default_state("III"))
    back = io.connection_from_json(json.loads(io.dumps(io.connection_to_json(conn))))
    z = 0.7 + 2j
    assert np.array_equal(back.evaluate(z), conn.evaluate(z))
    bad = io.connection_to_json(conn)
    bad["poles"][0]["r"] += 1
    with pytest.raises(ValueError):
        io.connection_from_json(bad)
    real = minimize(realize(conn))
    doc = io.realization_to_json(real)
    again = io.realization_from_json(json.loads(io.dumps(doc)))
    assert np.array_equal(again.S, real.S) and again.minimal
    assert doc["jordan"] == real.jordan_spec().to_json()


def test_saito_json_is_deterministic():
    sf = flat_frame(okubo_frame("IV", default_state("IV")))
    a = io.dumps(io.saito_to_json(sf))
    b = io.dumps(io.saito_to_json(flat_frame(okubo_frame("IV", default_state("IV")))))
    assert a == b
    doc = json.loads(a)
    assert len(doc["Phi"]) == 3 and set(doc) == {"w", "t", "C", "Phi", "g", "jacobianCond"}


def test_load_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "kind": "II",\n  "samples": ,\n}\n')
    with pytest.raises(ConfigError) as info:
        io.load(p)
    assert info.value.line == 3
    good = tmp_path / "good.json"
    good.write_text('{"a": 1}')
    assert io.load(good) == {"a": 1}
