import io
from fractions import Fraction
import json

import jsonschema
import pytest

from p1dyn.arith import PlaceSet
from p1dyn.census import (
    BRANCH_ORDER,
    CensusConfig,
    CensusResult,
    analyze_map,
    candidate_coeffs,
    class_key,
    classify,
    dumps_report,
    emit_report,
    enumerate_maps,
    run_census,
    verify_report,
)
from p1dyn.dynamics import conjugate_map, is_cycle, make_map, rational_cycles
from p1dyn.errors import DomainError, ResourceError
from p1dyn.families import psi3
from p1dyn.proj import Mobius, ProjPoint
from p1dyn.reduction import good_outside

PHI3 = make_map([4, -17, 18], [2, -8, 6])

POINT = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}
SCHEMA = {
    "type": "object",
    "required": ["config", "records", "classes", "summary"],
    "properties": {
        "config": {
            "type": "object",
            "required": ["s", "height", "strategy"],
            "properties": {
                "s": {"type": "array", "items": {"type": "integer"}},
                "height": {"type": "integer"},
                "strategy": {"enum": ["by-cycles", "by-coeffs"]},
            },
        },
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["map", "disc", "cycles", "class_id", "checks"],
                "properties": {
                    "map": {
                        "type": "array",
                        "minItems": 2,
                        "maxItems": 2,
                        "items": {"type": "array", "items": {"type": "integer"}},
                    },
                    "disc": {"type": "string", "pattern": "^[0-9]+$"},
                    "cycles": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["points", "period"],
                            "properties": {
                                "points": {"type": "array", "items": POINT},
                                "period": {"type": "integer", "minimum": 1},
                            },
                        },
                    },
                    "class_id": {"type": ["string", "null"]},
                    "checks": {
                        "type": "object",
                        "required": ["prop61", "mobius_bound", "n34", "prop_n3_branch"],
                        "properties": {
                            "prop61": {"type": "boolean"},
                            "mobius_bound": {"type": "boolean"},
                            "n34": {"type": ["boolean", "null"]},
                            "prop_n3_branch": {"type": ["string", "null"]},
                        },
                    },
                },
            },
        },
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "representative", "size"],
                "properties": {"id": {"type": "string"}, "size": {"type": "integer", "minimum": 1}},
            },
        },
        "summary": {"type": "object"},
    },
}


@pytest.fixture(scope="module")
def small():
    return run_census(CensusConfig((2,), 3, "by-cycles"), workers=1)


def test_config_validation():
    with pytest.raises(DomainError):
        CensusConfig((2,), 0)
    with pytest.raises(DomainError):
        CensusConfig((2,), 3, "by-magic")
    with pytest.raises(ResourceError):
        CensusConfig((2,), 3, max_period=20)
    assert CensusConfig().to_json() == {"s": [2, 3], "height": 8, "strategy": "by-cycles", "max_period": 6}


def test_small_census_schema_and_soundness(small):
    doc = json.loads(dumps_report(small))
    jsonschema.validate(doc, SCHEMA)
    assert doc["records"]
    assert verify_report(doc) == []
    S = PlaceSet((2,))
    for rec in small.records:
        phi = make_map(rec["coeffs"][:3], rec["coeffs"][3:])
        assert good_outside(phi, S)
        for c in rec["cycles"]:
            assert is_cycle(phi, [ProjPoint(*p) for p in c])
    assert not small.violations


def test_classes_are_consistent(small):
    ids = {c["id"] for c in small.classes}
    sizes = {c["id"]: c["size"] for c in small.classes}
    counted = {}
    for rec in small.records:
        if rec["class_id"] is not None:
            assert rec["class_id"] in ids
            counted[rec["class_id"]] = counted.get(rec["class_id"], 0) + 1
    assert counted == sizes
    for c in small.classes:
        members = [r["coeffs"] for r in small.records if r["class_id"] == c["id"]]
        assert tuple(c["representative"][0] + c["representative"][1]) == min(members)


def test_branches_in_order(small):
    for rec in small.records:
        b = rec["checks"]["prop_n3_branch"]
        assert b is None or b in BRANCH_ORDER
        assert b != "precondition-failed"
        if any(len(c) == 3 for c in rec["cycles"]):
            assert b is not None


def test_empty_census_is_valid_json():
    empty = CensusResult(CensusConfig((2,), 1), [], [])
    doc = json.loads(dumps_report(empty))
    jsonschema.validate(doc, SCHEMA)
    assert doc["records"] == [] and doc["summary"]["records"] == 0


def test_single_record_report(tmp_path):
    rec = analyze_map(psi3(2).map.coeffs, PlaceSet((2,)), 6)
    res = CensusResult(CensusConfig((2,), 1), [rec], classify([rec]))
    out = tmp_path / "one.json"
    emit_report(res, str(out))
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert len(doc["records"]) == 1 and doc["records"][0]["class_id"] == doc["classes"][0]["id"]
    buf = io.StringIO()
    emit_report(res, buf)
    assert buf.getvalue() == out.read_text()
    with pytest.raises(OSError):
        emit_report(res, str(tmp_path / "missing" / "x.json"))


def test_rerun_is_byte_identical(small):
    again = run_census(CensusConfig((2,), 3, "by-cycles"), workers=2)
    assert dumps_report(again) == dumps_report(small)


def test_by_cycles_contains_psi3_units():
    found = set(candidate_coeffs((2, 3), "by-cycles", 6))
    for a in (1, -1, 2, -2, 3, -3, 4, 6, -6, Fraction(1, 2), Fraction(-1, 3), Fraction(2, 3)):
        assert psi3(a).map.coeffs in found, a


def test_by_coeffs_height_one_empty_s():
    maps = list(enumerate_maps((), "by-coeffs", 1))
    assert maps
    assert len({m.coeffs for m in maps}) == len(maps)
    for m in maps:
        assert max(abs(v) for v in m.coeffs) <= 1
        assert abs(m.resultant) == 1


def test_by_coeffs_monotone():
    h1 = set(candidate_coeffs((2,), "by-coeffs", 1))
    h2 = set(candidate_coeffs((2,), "by-coeffs", 2))
    assert h1 < h2


def test_by_cycles_monotone():
    h2 = set(candidate_coeffs((2, 3), "by-cycles", 2))
    h3 = set(candidate_coeffs((2, 3), "by-cycles", 3))
    assert h2 <= h3


def test_phi3_class_reached_over_235():
    # Phi_3 itself has coefficient height 18; the by-cycles census reaches its class
    key = class_key(PHI3, rational_cycles(PHI3, 4))
    res = run_census(CensusConfig((2, 3, 5), 3, "by-cycles", 4), workers=1)
    assert any(r["key"] == key for r in res.records)
    assert not res.violations


def test_classify_conjugates_share_a_class():
    phi = psi3(1).map
    conj = conjugate_map(phi, Mobius(2, 1, 1, 1))
    recs = [analyze_map(m.coeffs, PlaceSet(()), 3) for m in (phi, conj)]
    classes = classify(recs)
    assert len(classes) == 1 and classes[0]["size"] == 2
    r3 = analyze_map(PHI3.coeffs, PlaceSet((2, 3, 5)), 4)
    recs = [analyze_map(phi.coeffs, PlaceSet((2, 3, 5)), 4), r3]
    assert len(classify(recs)) == 2


def test_by_coeffs_height_budget():
    with pytest.raises(ResourceError):
        candidate_coeffs((2,), "by-coeffs", 17)
