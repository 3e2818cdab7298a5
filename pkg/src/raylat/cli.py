"""Command-line surface.

Subcommands: validate, constants, count, verify, census.  Exit codes:
0 pass, 1 verification failure, 2 input error.  The modulus and class
representatives use the mini-syntax ``p:i:e,p:i:e,...`` (the i-th prime
above p, factors in the canonical order, to the e-th power) or ``unit``
for O_K.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import algebra, intervals, oracle, raycount, unitlog
from .algebra import Order
from .fielddata import FieldFileError, parse_field_file, validate_field
from .unitlog import LogEmbedding


@dataclass
class RunConfig:
    field_path: str
    modulus: str = "unit"
    class_spec: str = "all"
    x_grid: tuple = (10, 100, 1000, 10000)
    method: str = "both"
    precision_start: int = 128
    precision_cap: int = 4096
    jobs: int = 1
    fmt: str = "tsv"
    output: str | None = None

    def validate(self):
        if self.precision_start > self.precision_cap:
            raise ValueError("precision start exceeds cap")
        if not self.x_grid or any(x < 1 for x in self.x_grid):
            raise ValueError("x grid must be nonempty with all x >= 1")


class InputError(Exception):
    pass


def _load_field(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read field file: {exc}")
    try:
        return parse_field_file(data)
    except FieldFileError as exc:
        raise InputError(f"field file invalid: {exc}")


def parse_modulus(fd, spec: str):
    """(Ideal, factorization) from 'p:i:e,...' or 'unit'."""
    order = Order.for_field(fd)
    if spec.strip() == "unit":
        return algebra.unit_ideal(order), ()
    fac = {}
    for part in spec.split(","):
        bits = part.strip().split(":")
        if len(bits) != 3:
            raise InputError(f"bad modulus component {part!r}; want p:i:e")
        try:
            p, idx, e = (int(b) for b in bits)
        except ValueError:
            raise InputError(f"bad modulus component {part!r}")
        if e < 1:
            raise InputError("modulus exponent must be >= 1")
        split = algebra.prime_splitting(fd, p)
        if not (0 <= idx < len(split)):
            raise InputError(
                f"prime index {idx} out of range for p={p} "
                f"({len(split)} factors)")
        pid = split[idx][0]
        fac[pid] = fac.get(pid, 0) + e
    ideal = algebra.unit_ideal(order)
    factorization = tuple(sorted(fac.items(),
                                 key=lambda kv: (kv[0].norm, kv[0].hnf)))
    for pid, e in factorization:
        ideal = algebra.ideal_mul(order, ideal, algebra.ideal_pow(order, pid, e))
    return ideal, factorization


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    fd = _load_field(args.field)
    rep = validate_field(fd, precision=args.precision_start)
    print(rep)
    return 0 if rep.overall else 2


def cmd_constants(args) -> int:
    fd = _load_field(args.field)
    emb = LogEmbedding(fd, prec=args.precision_start)
    q, fac = parse_modulus(fd, args.modulus)
    ctx = unitlog.ray_context(fd, q, fac or None, emb=emb)
    from .intervals import mid_float
    rows = [
        ("n_K", fd.degree),
        ("r1", fd.r1),
        ("r2", fd.r2),
        ("d_K", fd.disc),
        ("h_K", fd.class_number),
        ("R_K", mid_float(raycount.regulator_interval(fd, emb))),
        ("alpha_K", mid_float(raycount.residue_alpha_K(fd, emb))),
        ("phi_q", ctx.phi),
        ("h_Kq", ctx.h_kq),
        ("R_Kq1", mid_float(unitlog.q1_regulator(ctx, emb))),
        ("m", ",".join(str(m) for m in ctx.m) or "-"),
        ("F_q", str(raycount.F_constant(fd, ctx))),
        ("E_K", "%.6e" % mid_float(raycount.E_constant(fd, emb))),
    ]
    width = max(len(k) for k, _ in rows)
    out = "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"
    _emit(out, args.output)
    return 0


def _resolve_classes(fd, ctx, emb, census, spec: str):
    """Class representatives c (of the inverse classes) for counting."""
    order = Order.for_field(fd)
    if spec == "all":
        reps = []
        for b, rep_idx in enumerate(census.reps):
            reps.append((b, census.entries[rep_idx].ideal))
        return reps
    ideal, fac = parse_modulus(fd, spec)
    ideal = algebra.Ideal(ideal.hnf, ideal.norm, tuple(fac))
    return [(None, ideal)]


def cmd_count(cfg: RunConfig) -> int:
    fd = _load_field(cfg.field_path)
    emb = LogEmbedding(fd, prec=cfg.precision_start)
    q, fac = parse_modulus(fd, cfg.modulus)
    ctx = unitlog.ray_context(fd, q, fac or None, emb=emb)
    x_max = max(cfg.x_grid)
    census = None
    if cfg.method in ("oracle", "both") or cfg.class_spec == "all":
        census = oracle.classify(fd, ctx, x_max, emb=emb)
    lines = ["class\tx\tcount_lattice\tcount_oracle"]
    rows_json = []
    for label, c in _resolve_classes(fd, ctx, emb, census, cfg.class_spec):
        for x in sorted(cfg.x_grid):
            lat = orc = None
            if cfg.method in ("lattice", "both"):
                lat = raycount.count_ray_class(fd, ctx, emb, c, x,
                                               method="lattice",
                                               jobs=cfg.jobs)
            if cfg.method in ("oracle", "both"):
                orc = raycount.count_ray_class(fd, ctx, emb, c, x,
                                               method="oracle", census=census)
            if lat is not None and orc is not None and lat != orc:
                print(f"method disagreement at class={label} x={x}: "
                      f"{lat} != {orc}", file=sys.stderr)
                return 1
            lines.append(f"{label if label is not None else 'c'}\t{x}\t"
                         f"{'' if lat is None else lat}\t"
                         f"{'' if orc is None else orc}")
            rows_json.append({"class": label, "x": x,
                              "count_lattice": lat, "count_oracle": orc})
    if cfg.fmt == "json":
        _emit(json.dumps(rows_json, indent=2, sort_keys=True) + "\n",
              cfg.output)
    else:
        _emit("\n".join(lines) + "\n", cfg.output)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    fd = _load_field(cfg.field_path)
    emb = LogEmbedding(fd, prec=cfg.precision_start)
    q, fac = parse_modulus(fd, cfg.modulus)
    ctx = unitlog.ray_context(fd, q, fac or None, emb=emb)
    report, census = raycount.verify_asymptotic(
        fd, ctx, emb, list(cfg.x_grid), modulus_label=cfg.modulus,
        jobs=cfg.jobs)
    if cfg.fmt == "json":
        _emit(raycount.report_json(report), cfg.output)
    else:
        _emit(raycount.report_tsv(report), cfg.output)
    return 0 if report.overall else 1


def cmd_census(args) -> int:
    fd = _load_field(args.field)
    emb = LogEmbedding(fd, prec=args.precision_start)
    census = oracle.enumerate_ideals(fd, args.x_max)
    if args.modulus:
        q, fac = parse_modulus(fd, args.modulus)
        ctx = unitlog.ray_context(fd, q, fac or None, emb=emb)
        census = oracle.classify(fd, ctx, census, emb=emb)
    _emit(oracle.census_tsv(census), args.output)
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p):
    p.add_argument("--field", required=True, help="field file path")
    p.add_argument("--precision-start", type=int, default=128)
    p.add_argument("--precision-cap", type=int, default=4096)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", dest="fmt", choices=("tsv", "json"),
                   default="tsv")
    p.add_argument("--output", "-o", default=None)


def _grid(s: str):
    return tuple(int(v) for v in s.split(","))


def build_parser():
    ap = argparse.ArgumentParser(
        prog="raylat",
        description="Count integral ideals in narrow ray classes two ways "
                    "and verify the explicit asymptotic.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="validate a field file")
    _add_common(p)

    p = sub.add_parser("constants", help="print the constants table")
    _add_common(p)
    p.add_argument("--modulus", default="unit")

    p = sub.add_parser("count", help="count one or all ray classes")
    _add_common(p)
    p.add_argument("--modulus", default="unit")
    p.add_argument("--class-rep", dest="class_spec", default="all",
                   help="inverse-class representative (p:i:e,... or 'unit' "
                        "or 'all')")
    p.add_argument("--x", type=_grid, default=(10, 100, 1000, 10000))
    p.add_argument("--method", choices=("lattice", "oracle", "both"),
                   default="both")

    p = sub.add_parser("verify", help="full verification report")
    _add_common(p)
    p.add_argument("--modulus", default="unit")
    p.add_argument("--x", type=_grid, default=(10, 100, 1000, 10000))
    p.add_argument("--method", choices=("lattice", "oracle", "both"),
                   default="both")

    p = sub.add_parser("census", help="export the ideal census")
    _add_common(p)
    p.add_argument("--modulus", default=None)
    p.add_argument("--x-max", type=int, required=True)
    return ap


def _config_from(args) -> RunConfig:
    cfg = RunConfig(
        field_path=args.field,
        modulus=getattr(args, "modulus", "unit") or "unit",
        class_spec=getattr(args, "class_spec", "all"),
        x_grid=tuple(getattr(args, "x", (10, 100, 1000, 10000))),
        method=getattr(args, "method", "both"),
        precision_start=args.precision_start,
        precision_cap=args.precision_cap,
        jobs=args.jobs,
        fmt=args.fmt,
        output=args.output)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if "RAYLAT_PRECISION_CAP" not in os.environ:
        intervals.DEFAULT_CAP = args.precision_cap
    intervals.START_PREC = max(args.precision_start, 32)
    try:
        if args.cmd == "validate":
            return cmd_validate(args)
        if args.cmd == "constants":
            return cmd_constants(args)
        if args.cmd == "census":
            return cmd_census(args)
        cfg = _config_from(args)
        if args.cmd == "count":
            return cmd_count(cfg)
        if args.cmd == "verify":
            return cmd_verify(cfg)
        raise InputError(f"unknown command {args.cmd}")
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FieldFileError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
