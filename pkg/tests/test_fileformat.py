import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superlin import ParseError, SchemaError, dump_system, load_system, parse_system_file
from superlin.discovery import generate_random_balanced

from helpers import SYSTEMS_DIR, brunton_embedding, brunton_system


def test_shipped_worked_example():
    sys, emb = parse_system_file(SYSTEMS_DIR / "brunton.json")
    assert sys == brunton_system() and emb == brunton_embedding()


def test_shipped_files_round_trip():
    for path in sorted(SYSTEMS_DIR.glob("*.json")):
        text = path.read_text()
        assert dump_system(*load_system(text)) == text, path.name


def test_embedding_optional():
    sys, emb = parse_system_file(SYSTEMS_DIR / "rotation.json")
    assert emb is None and sys.n == 3


def _doc():
    return json.loads((SYSTEMS_DIR / "brunton.json").read_text())


def test_wrong_exponent_length():
    doc = _doc()
    doc["f"][0][0]["exponents"] = [0, 2, 1]
    with pytest.raises(SchemaError, match=r"f\[0\]\[0\]\.exponents"):
        load_system(json.dumps(doc))


def test_float_coefficient_rejected():
    doc = _doc()
    doc["f"][0][0]["coefficient"] = 0.5
    with pytest.raises(SchemaError, match="coefficient"):
        load_system(json.dumps(doc))


def test_grid_shape():
    doc = _doc()
    doc["embedding"]["A_ell"].pop()
    with pytest.raises(SchemaError, match="A_ell"):
        load_system(json.dumps(doc))


def test_observable_count_must_match_m():
    doc = _doc()
    doc["m"] = 2
    with pytest.raises(SchemaError):
        load_system(json.dumps(doc))


def test_repeated_monomial():
    doc = _doc()
    doc["f"][1].append(dict(doc["f"][1][0]))
    with pytest.raises(SchemaError, match="repeated"):
        load_system(json.dumps(doc))


def test_malformed_json_reports_line():
    with pytest.raises(ParseError, match="line 3"):
        load_system('{\n  "n": 2,\n  "f": [,\n}')


def test_lenient_rationals():
    doc = _doc()
    doc["f"][1][0]["coefficient"] = -1
    doc["embedding"]["A_ell"][2][2] = " -2 "
    sys, emb = load_system(json.dumps(doc))
    assert sys == brunton_system() and emb == brunton_embedding()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 2), st.integers(2, 3))
def test_generated_round_trip(seed, k, n2, deg):
    gen = generate_random_balanced(seed, k, n2, deg)
    text = dump_system(gen.system, gen.embedding)
    sys, emb = load_system(text)
    assert (sys, emb) == (gen.system, gen.embedding)
    assert dump_system(sys, emb) == text
