"""Thin client for a number-field database HTTP API.

Given a field label, fetches the database record (or replays a recorded
fixture in offline mode), converts it to the canonical field-file format
— units and torsion arrive in power-basis coordinates and are converted
to integral-basis coordinates — and refuses to emit anything that does
not pass the primary parser and validator.  Nothing is ever fabricated:
a record without unit data is an error.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.request
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from raylat.fielddata import (FieldFileError, parse_field_file,
                              serialize_field_file, validate_field)

DEFAULT_BASE_URL = "https://fielddb.example.org/api/field"


class FetchError(Exception):
    pass


@dataclass
class FetchJob:
    label: str
    output_path: str | None = None
    splitting_bound: int = 100
    offline: bool = True
    fixture_dir: str | None = None
    base_url: str = DEFAULT_BASE_URL

    def validate(self):
        if self.splitting_bound < 2:
            raise ValueError("splitting-prime bound must be >= 2")
        if self.offline and not self.fixture_dir:
            raise ValueError("offline mode needs a fixture directory")


def _load_record(job: FetchJob) -> dict:
    if job.offline:
        path = Path(job.fixture_dir) / f"{job.label}.json"
        if not path.exists():
            raise FetchError(f"fixture missing for label {job.label!r}")
        return json.loads(path.read_text(encoding="utf-8"))
    url = f"{job.base_url}/{job.label}"
    try:
        with urllib.request.urlopen(url, timeout=30) as resp:
            if resp.status != 200:
                raise FetchError(f"HTTP {resp.status} for {job.label!r}")
            return json.loads(resp.read().decode("utf-8"))
    except OSError as exc:
        raise FetchError(f"label {job.label!r} not resolvable: {exc}")


def _rat(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def _rat_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 \
        else f"{x.numerator}/{x.denominator}"


def _power_to_integral(power_coords, basis_rows, what: str):
    """Convert power-basis rational coordinates to integral-basis integer
    coordinates; errors out when the element is not in the order."""
    n = len(basis_rows)
    basis = [[_rat(x) for x in row] for row in basis_rows]
    vec = [_rat(x) for x in power_coords]
    if len(vec) != n:
        raise FetchError(f"{what}: expected {n} power-basis coordinates")
    # solve c * basis = vec
    aug = [[basis[i][j] for i in range(n)] for j in range(n)]
    rhs = vec[:]
    coords = _solve(aug, rhs)
    out = []
    for c in coords:
        if c.denominator != 1:
            raise FetchError(f"{what}: not integral over the given basis")
        out.append(int(c))
    return out


def _solve(a, b):
    n = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            raise FetchError("integral basis matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [v - f * w for v, w in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def _prime_factors(m: int):
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def convert_record(record: dict, job: FetchJob) -> dict:
    """Database record -> canonical field-file object (pre-validation)."""
    for key in ("label", "coeffs", "degree", "signature", "disc",
                "class_number", "index", "integral_basis", "torsion"):
        if key not in record:
            raise FetchError(f"source record incomplete: missing {key!r}")
    if "units" not in record or record["units"] is None:
        raise FetchError("source record has no unit data; refusing to "
                         "fabricate fundamental units")
    r1, r2 = (int(v) for v in record["signature"])
    rank = r1 + r2 - 1
    units = record["units"]
    if len(units) != rank:
        raise FetchError(
            f"source supplies {len(units)} units, unit rank is {rank}")
    basis_rows = record["integral_basis"]
    units_integral = [
        [str(c) for c in _power_to_integral(u, basis_rows, f"unit {k}")]
        for k, u in enumerate(units)]
    tors = record["torsion"]
    tors_gen = [str(c) for c in _power_to_integral(
        tors["generator"], basis_rows, "torsion generator")]

    index = int(record["index"])
    overrides = {}
    source_split = record.get("index_splitting") or {}
    for p in _prime_factors(index):
        if p > job.splitting_bound:
            raise FetchError(
                f"index divisor {p} above the splitting-prime bound")
        entry = source_split.get(str(p))
        if not entry:
            raise FetchError(
                f"source record lacks splitting data for index divisor {p}")
        overrides[str(p)] = [
            {"gen_poly": [str(c) for c in _power_to_integral(
                e["gen_power"], basis_rows, f"splitting gen over {p}")],
             "e": str(e["e"]), "f": str(e["f"])}
            for e in entry]

    reg = record.get("regulator")
    return {
        "label": str(record["label"]),
        "poly": [str(int(c)) for c in record["coeffs"]],
        "degree": str(int(record["degree"])),
        "signature": [str(r1), str(r2)],
        "disc": str(int(record["disc"])),
        "integral_basis": [[_rat_str(_rat(x)) for x in row]
                           for row in basis_rows],
        "index": str(index),
        "class_number": str(int(record["class_number"])),
        "narrow_class_number":
            None if record.get("narrow_class_number") is None
            else str(int(record["narrow_class_number"])),
        "units": units_integral,
        "torsion": {"gen": tors_gen, "order": str(int(tors["order"]))},
        "regulator": None if reg is None else str(reg),
        "prime_splitting": overrides,
    }


def fetch_field(job: FetchJob) -> bytes:
    """Fetch, convert, validate, and (optionally) write one field file."""
    job.validate()
    record = _load_record(job)
    obj = convert_record(record, job)
    data = (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")
    try:
        fd = parse_field_file(data)
    except FieldFileError as exc:
        raise FetchError(f"converted record fails the parser: {exc}")
    report = validate_field(fd)
    if not report.overall:
        raise FetchError(f"converted record fails validation:\n{report}")
    # canonical serialization (identical content, canonical key order)
    data = serialize_field_file(fd)
    if job.output_path:
        Path(job.output_path).write_bytes(data)
    return data


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="fieldfetch",
        description="Fetch number-field invariants and emit a validated "
                    "field file.")
    ap.add_argument("--label", required=True)
    ap.add_argument("--output", "-o", default=None)
    ap.add_argument("--offline", action="store_true")
    ap.add_argument("--fixture-dir", default=None)
    ap.add_argument("--base-url", default=DEFAULT_BASE_URL)
    ap.add_argument("--splitting-bound", type=int, default=100)
    args = ap.parse_args(argv)
    job = FetchJob(label=args.label, output_path=args.output,
                   splitting_bound=args.splitting_bound,
                   offline=args.offline, fixture_dir=args.fixture_dir,
                   base_url=args.base_url)
    try:
        data = fetch_field(job)
    except (FetchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.output:
        sys.stdout.write(data.decode("utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
