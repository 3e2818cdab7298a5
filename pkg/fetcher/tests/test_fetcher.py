import json
import urllib.request
from pathlib import Path

import pytest

from fieldfetch import FetchError, FetchJob, fetch_field
from raylat.fielddata import parse_field_file, validate_field

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "fixtures"
PRIMARY_FIELDS = HERE.parent.parent / "fields"


def offline_job(label, **kw):
    return FetchJob(label=label, offline=True, fixture_dir=str(FIXTURES),
                    **kw)


def test_qi_matches_committed_fixture():
    data = fetch_field(offline_job("2.0.4.1"))
    emitted = json.loads(data.decode())
    committed = json.loads((PRIMARY_FIELDS / "qi.json").read_text())
    assert emitted == committed


def test_qsqrt2_matches_committed_fixture():
    data = fetch_field(offline_job("2.2.8.1"))
    emitted = json.loads(data.decode())
    committed = json.loads((PRIMARY_FIELDS / "qsqrt2.json").read_text())
    assert emitted == committed


def test_output_passes_primary_validator(tmp_path):
    out = tmp_path / "field.json"
    fetch_field(offline_job("2.2.8.1", output_path=str(out)))
    fd = parse_field_file(out.read_bytes())
    rep = validate_field(fd)
    assert rep.overall, str(rep)
    assert fd.regulator_hint is not None
    assert abs(float(fd.regulator_hint) - 0.88137) < 1e-4


def test_power_basis_conversion_and_override():
    """Q(sqrt5): the unit arrives as (1+x)/2 in the power basis and must
    land on integral-basis coordinates (0, 1); the index divisor 2 needs
    its splitting override carried through."""
    data = fetch_field(offline_job("2.2.5.1"))
    emitted = json.loads(data.decode())
    committed = json.loads((PRIMARY_FIELDS / "qsqrt5.json").read_text())
    assert emitted == committed
    assert emitted["units"] == [["0", "1"]]
    assert "2" in emitted["prime_splitting"]


def test_unknown_label_offline():
    with pytest.raises(FetchError, match="fixture missing"):
        fetch_field(offline_job("9.9.9.9"))


def test_missing_units_rejected(tmp_path):
    rec = json.loads((FIXTURES / "2.2.8.1.json").read_text())
    del rec["units"]
    (tmp_path / "2.2.8.1.json").write_text(json.dumps(rec))
    job = FetchJob(label="2.2.8.1", offline=True, fixture_dir=str(tmp_path))
    with pytest.raises(FetchError, match="unit data"):
        fetch_field(job)


def test_wrong_unit_count_rejected(tmp_path):
    rec = json.loads((FIXTURES / "2.2.8.1.json").read_text())
    rec["units"] = []
    (tmp_path / "2.2.8.1.json").write_text(json.dumps(rec))
    job = FetchJob(label="2.2.8.1", offline=True, fixture_dir=str(tmp_path))
    with pytest.raises(FetchError, match="unit rank"):
        fetch_field(job)


def test_non_integral_unit_rejected(tmp_path):
    rec = json.loads((FIXTURES / "2.2.8.1.json").read_text())
    rec["units"] = [["1/3", "0"]]
    (tmp_path / "2.2.8.1.json").write_text(json.dumps(rec))
    job = FetchJob(label="2.2.8.1", offline=True, fixture_dir=str(tmp_path))
    with pytest.raises(FetchError, match="not integral"):
        fetch_field(job)


def test_inconsistent_record_fails_validation(tmp_path):
    rec = json.loads((FIXTURES / "2.2.8.1.json").read_text())
    rec["units"] = [["3", "2"]]  # 3 + 2 sqrt2 has norm 1... check: 9-8=1
    rec["regulator"] = "0.8813735870195430"
    (tmp_path / "2.2.8.1.json").write_text(json.dumps(rec))
    job = FetchJob(label="2.2.8.1", offline=True, fixture_dir=str(tmp_path))
    # 3+2sqrt2 = (1+sqrt2)^2 is a unit but the regulator hint no longer
    # matches the supplied generator set
    with pytest.raises(FetchError, match="validation"):
        fetch_field(job)


def test_offline_is_hermetic(monkeypatch):
    def boom(*a, **k):
        raise AssertionError("network access attempted in offline mode")

    monkeypatch.setattr(urllib.request, "urlopen", boom)
    data = fetch_field(offline_job("2.0.4.1"))
    assert json.loads(data.decode())["label"] == "2.0.4.1"


def test_online_mode_uses_http(monkeypatch):
    payload = (FIXTURES / "2.0.4.1.json").read_bytes()

    class FakeResponse:
        status = 200

        def read(self):
            return payload

        def __enter__(self):
            return self

        def __exit__(self, *a):
            return False

    seen = {}

    def fake_urlopen(url, timeout=None):
        seen["url"] = url
        return FakeResponse()

    monkeypatch.setattr(urllib.request, "urlopen", fake_urlopen)
    job = FetchJob(label="2.0.4.1", offline=False,
                   base_url="https://db.example/api/field")
    data = fetch_field(job)
    assert seen["url"] == "https://db.example/api/field/2.0.4.1"
    assert json.loads(data.decode())["label"] == "2.0.4.1"


def test_job_invariants():
    with pytest.raises(ValueError, match="bound"):
        fetch_field(FetchJob(label="x", splitting_bound=1, offline=True,
                             fixture_dir=str(FIXTURES)))
    with pytest.raises(ValueError, match="fixture"):
        fetch_field(FetchJob(label="x", offline=True, fixture_dir=None))


def test_cli_roundtrip(tmp_path, capsys):
    from fieldfetch.client import main
    out = tmp_path / "qi.json"
    code = main(["--label", "2.0.4.1", "--offline",
                 "--fixture-dir", str(FIXTURES), "-o", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["label"] == "2.0.4.1"
    code = main(["--label", "missing", "--offline",
                 "--fixture-dir", str(FIXTURES)])
    assert code == 2
