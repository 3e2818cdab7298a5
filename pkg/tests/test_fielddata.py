import json

import pytest

from raylat.fielddata import (FieldFileError, parse_field_file,
                              serialize_field_file, validate_field)
from tests.conftest import FIELDS_DIR, load_descriptor

ALL_FIELDS = ["qi", "qsqrt2", "qsqrt_m5", "zeta7plus", "qsqrt5"]


def _raw(name: str) -> dict:
    return json.loads((FIELDS_DIR / f"{name}.json").read_text())


def _parse(obj: dict):
    return parse_field_file(json.dumps(obj).encode())


@pytest.mark.parametrize("name", ALL_FIELDS)
def test_round_trip(name):
    fd = load_descriptor(name)
    assert parse_field_file(serialize_field_file(fd)) == fd


def test_qi_invariants(qi):
    assert qi.degree == 2 and (qi.r1, qi.r2) == (0, 1)
    assert qi.unit_rank == 0 and qi.disc == -4
    assert qi.torsion_order == 4


def test_qsqrt2_invariants(qsqrt2):
    assert (qsqrt2.r1, qsqrt2.r2) == (2, 0)
    assert qsqrt2.unit_rank == 1


def test_disc_inconsistency_rejected():
    obj = _raw("qi")
    obj["disc"] = "-3"
    with pytest.raises(FieldFileError, match="discriminant"):
        _parse(obj)


def test_non_monic_rejected():
    obj = _raw("qi")
    obj["poly"] = ["1", "0", "2"]
    with pytest.raises(FieldFileError, match="monic"):
        _parse(obj)


def test_degree_cap():
    obj = _raw("qi")
    obj["degree"] = "9"
    obj["poly"] = ["1"] + ["0"] * 8 + ["1"]
    obj["signature"] = ["1", "4"]
    with pytest.raises(FieldFileError, match="cap"):
        _parse(obj)


def test_missing_override_rejected():
    obj = _raw("qsqrt5")
    obj["prime_splitting"] = {}
    with pytest.raises(FieldFileError, match="override"):
        _parse(obj)


@pytest.mark.parametrize("mutation", [
    {"degree": "3"},                       # dimension mismatch
    {"signature": ["1", "1"]},             # n != r1 + 2 r2
    {"index": "0"},                        # positivity
    {"class_number": "0"},
    {"torsion": {"gen": ["0", "1"], "order": "0"}},
])
def test_structural_mutations_rejected(mutation):
    obj = _raw("qi")
    obj.update(mutation)
    with pytest.raises(FieldFileError):
        _parse(obj)


def test_unknown_and_missing_keys_rejected():
    obj = _raw("qi")
    obj["surprise"] = 1
    with pytest.raises(FieldFileError, match="unknown"):
        _parse(obj)
    obj = _raw("qi")
    del obj["units"]
    with pytest.raises(FieldFileError, match="missing"):
        _parse(obj)


@pytest.mark.parametrize("name", ALL_FIELDS)
def test_validate_all_fixtures(name):
    fd = load_descriptor(name)
    rep = validate_field(fd)
    assert rep.overall, str(rep)


def test_validate_catches_bad_unit(qsqrt2):
    # replace the fundamental unit by 2 + sqrt2 (norm 2)
    from dataclasses import replace
    bad = replace(qsqrt2, units=((2, 1),))
    rep = validate_field(bad)
    names = {c.name: c.passed for c in rep.checks}
    assert names["unit_norm_0"] is False
    assert not rep.overall


def test_validate_catches_wrong_torsion(qi):
    from dataclasses import replace
    bad = replace(qi, torsion_order=8)
    rep = validate_field(bad)
    names = {c.name: c.passed for c in rep.checks}
    assert names["torsion_order"] is False


def test_validation_precision_monotone(qsqrt2):
    r1 = validate_field(qsqrt2, precision=128)
    r2 = validate_field(qsqrt2, precision=256)
    v1 = [(c.name, c.passed) for c in r1.checks]
    v2 = [(c.name, c.passed) for c in r2.checks]
    assert v1 == v2


def test_dobrowolski_margin(qsqrt2):
    # max conjugate of 1+sqrt2 is 2.414 >= 1 + log(2)/24 = 1.0289
    import math
    bound = 1 + math.log(2) / 24
    assert 2.41421 >= bound
    rep = validate_field(qsqrt2)
    names = {c.name: c.passed for c in rep.checks}
    assert names["dobrowolski_0"] is True


def test_regulator_hint_checked(qsqrt2):
    from dataclasses import replace
    from fractions import Fraction
    bad = replace(qsqrt2, regulator_hint=Fraction(2),
                  regulator_hint_quantum=Fraction(1, 10 ** 12))
    rep = validate_field(bad)
    names = {c.name: c.passed for c in rep.checks}
    assert names["regulator_hint"] is False
