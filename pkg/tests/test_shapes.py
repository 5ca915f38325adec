import json

import pytest

from isotropy.errors import DomainError, SpecError
from isotropy.exact import gq
from isotropy.shapes import ShapeSpec, load_spec_document, parse_spec_document


def test_derived_mu_and_n():
    s = ShapeSpec(1, (3, 2), (1, 2))
    assert s.mu == (1, 4)  # c+alpha even keeps m, odd doubles it
    assert s.n == 3 * 1 + 2 * 4
    assert s.epsilon == 1 and s.nilpotent


def test_nonzero_n():
    s = ShapeSpec(2, (2, 1), (1, 3), lam=gq(0, 1))
    assert s.n == 2 * (2 + 3)
    assert not s.nilpotent


@pytest.mark.parametrize("kwargs", [
    dict(c=3, alpha=(1,), m=(1,)),
    dict(c=1, alpha=(1, 2), m=(1, 1)),
    dict(c=1, alpha=(2, 2), m=(1, 1)),
    dict(c=1, alpha=(2,), m=(0,)),
    dict(c=1, alpha=(2,), m=(1, 1)),
    dict(c=1, alpha=(2,), m=(1,), epsilon=0),
    dict(c=1, alpha=(2,), m=(1,), lam=gq(0)),
    dict(c=1, alpha=(2,), m=(1,), lam=gq(1), epsilon=1),
])
def test_invalid_shapes(kwargs):
    with pytest.raises(DomainError):
        ShapeSpec(**kwargs)


def test_json_round_trip():
    for s in (ShapeSpec(1, (3, 1), (2, 1), epsilon=-1), ShapeSpec(2, (2,), (1,), lam=gq("1/2", -3))):
        assert ShapeSpec.from_json(json.loads(json.dumps(s.to_json()))) == s


def test_spec_document_parts():
    parts = parse_spec_document({"parts": [{"c": 1, "alpha": [1], "m": [1]},
                                           {"c": 1, "alpha": [1], "m": [1], "lambda": "2"}]})
    assert len(parts) == 2 and parts[1].lam == gq(2)


@pytest.mark.parametrize("doc", [
    {"c": 1, "alpha": [1]},
    {"c": 1, "alpha": [1], "m": [1], "colour": "red"},
    {"c": 1, "alpha": ["x"], "m": [1]},
    {"parts": []},
    {"c": 1, "alpha": [1], "m": [1], "lambda": {"re": "1/0"}},
])
def test_schema_rejections(doc):
    with pytest.raises(SpecError):
        parse_spec_document(doc)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError):
        load_spec_document(str(bad))
    with pytest.raises(SpecError):
        load_spec_document(str(tmp_path / "missing.json"))
