"""Command-line front end: ``permfam check|search|theta-atlas|verify-paper``.

Exit codes: 0 success (or "permutes" for ``check``), 1 "does not permute"
or a failed reproduction check, 2 usage or runtime error.

Environment variables PERMPOLY_WORKERS and PERMPOLY_FORMAT (text, json,
csv) supply defaults; command-line flags take precedence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields as dc_fields
from functools import lru_cache

import numpy as np

from . import engine
from .criteria import C_SET_FAMILIES, CriterionReport, InvariantViolation, decide
from .family import ORACLE_LIMIT, FamilyParams, derive
from .field import Field, FieldError, is_prime_power, prime_power

ENV_PREFIX = "PERMPOLY_"
FORMATS = ("text", "json", "csv")
CSV_COLUMNS = ("q", "p", "n", "r", "v", "k", "t", "s", "d", "e", "verdict", "path")
ENGINE_Q_LIMIT = 2**24  # log tables have q entries


class UsageError(ValueError):
    pass


# -- parsing --------------------------------------------------------------

def parse_int_list(text: str, name: str = "value") -> list[int]:
    """'5', 'a..b' or comma-separated mixtures such as '1..3,7'."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise UsageError(f"empty range {part!r} for {name}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"cannot parse {name} {part!r}") from None
    if not out:
        raise UsageError(f"no values given for {name}")
    return sorted(set(out))


def _positive(values: list[int], name: str) -> list[int]:
    if any(x < 1 for x in values):
        raise UsageError(f"{name} values must be positive")
    return values


FieldKey = tuple  # (p, n, modulus or None); picklable stand-in for a Field


@lru_cache(maxsize=64)
def field_from_key(key: FieldKey) -> Field:
    p, n, modulus = key
    return Field(p, n, modulus)


def resolve_fields(args) -> list[FieldKey]:
    if args.q is not None:
        if args.p is not None or args.n is not None or args.modulus is not None:
            raise UsageError("give either --q or --p/--n/--modulus, not both")
        qs = parse_int_list(args.q, "q")
        if args.q_all_prime_powers:
            qs = [q for q in qs if is_prime_power(q)]
            if not qs:
                raise UsageError("no prime powers in the given q range")
        keys = []
        for q in qs:
            if not is_prime_power(q):
                raise UsageError(f"q = {q} is not a prime power")
            p, n = prime_power(q)
            keys.append((p, n, None))
        return keys
    if args.p is None:
        raise UsageError("a field is required: --q or --p [--n] [--modulus]")
    n = 1 if args.n is None else args.n
    modulus = None
    if args.modulus is not None:
        try:
            modulus = tuple(int(c) for c in args.modulus.split(","))
        except ValueError:
            raise UsageError(f"cannot parse modulus {args.modulus!r}") from None
    return [(args.p, n, modulus)]


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def resolve_format(args) -> str:
    if getattr(args, "json", False):
        return "json"
    if getattr(args, "csv", False):
        return "csv"
    fmt = _env("FORMAT", "text").lower()
    if fmt not in FORMATS:
        raise UsageError(f"{ENV_PREFIX}FORMAT must be one of {', '.join(FORMATS)}")
    return fmt


def resolve_workers(args) -> int:
    raw = args.workers if args.workers is not None else _env("WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise UsageError(f"bad worker count {raw!r}") from None
    if workers < 1:
        raise UsageError("worker count must be at least 1")
    return workers


# -- records --------------------------------------------------------------

@dataclass(frozen=True)
class ResultRecord:
    q: int
    p: int
    n: int
    r: int
    v: int
    k: int
    t: int
    s: int
    d: int
    e: int
    verdict: bool
    path: str
    conditions: tuple[tuple[str, bool], ...]
    star_holds: bool | None
    epsilon: int | None
    family: str | None
    oracle_verdict: bool | None

    @classmethod
    def from_report(cls, params: FamilyParams, report: CriterionReport) -> "ResultRecord":
        der = derive(params)
        f = params.field
        return cls(f.q, f.p, f.n, params.r, params.v, params.k, params.t, der.s, der.d, der.e,
                   bool(report.verdict), report.path.value,
                   tuple((str(c), bool(ok)) for c, ok in report.conditions),
                   report.star_holds, report.epsilon, report.matched_psi_family,
                   report.oracle_verdict)

    @property
    def key(self):
        return (self.q, self.r, self.v, self.k, self.t)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["conditions"] = [list(c) for c in self.conditions]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        names = [f.name for f in dc_fields(cls)]
        if set(data) != set(names):
            raise ValueError(f"record fields differ: {sorted(set(data) ^ set(names))}")
        data = dict(data)
        data["conditions"] = tuple((str(c), bool(ok)) for c, ok in data["conditions"])
        return cls(**data)

    @classmethod
    def from_json(cls, line: str) -> "ResultRecord":
        return cls.from_dict(json.loads(line))

    def csv_row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]

    def to_text(self) -> str:
        word = "permutes" if self.verdict else "no"
        extra = []
        if self.star_holds:
            extra.append("(*)")
        if self.epsilon is not None:
            extra.append(f"eps={self.epsilon:+d}")
        if self.family:
            extra.append(self.family)
        if self.oracle_verdict is not None:
            extra.append("oracle=" + ("yes" if self.oracle_verdict else "no"))
        tail = ("  " + " ".join(extra)) if extra else ""
        return (f"q={self.q} r={self.r} v={self.v} k={self.k} t={self.t}  "
                f"d={self.d} {self.path} {word}{tail}")


class RecordWriter:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self._csv = None

    def write(self, rec: ResultRecord):
        if self.fmt == "json":
            self.stream.write(rec.to_json() + "\n")
        elif self.fmt == "csv":
            if self._csv is None:
                self._csv = csv.writer(self.stream, lineterminator="\n")
                self._csv.writerow(CSV_COLUMNS)
            self._csv.writerow(rec.csv_row())
        else:
            self.stream.write(rec.to_text() + "\n")


# -- check ----------------------------------------------------------------

def _single(values: list[int], name: str) -> int:
    if len(values) != 1:
        raise UsageError(f"check takes a single {name}")
    return values[0]


def cmd_check(args) -> int:
    keys = resolve_fields(args)
    if len(keys) != 1:
        raise UsageError("check takes a single field")
    field = field_from_key(keys[0])
    r, v, k, t = (_single(_positive(parse_int_list(getattr(args, x), x), x), x) for x in "rvkt")
    if args.oracle and field.q > ORACLE_LIMIT:
        raise UsageError(f"--oracle needs q <= {ORACLE_LIMIT}")
    params = FamilyParams(field, r, v, k, t)
    report = decide(params, with_oracle=args.oracle)
    rec = ResultRecord.from_report(params, report)
    fmt = resolve_format(args)
    if fmt == "text":
        der = derive(params)
        print(f"field   {field!r}, q = {field.q}")
        print(f"params  r={r} v={v} k={k} t={t}")
        print(f"derived s={der.s} d={der.d} e={der.e} n_lin={der.n_lin}")
        print(f"path    {report.path.value}")
        for cid, ok in report.conditions:
            print(f"  [{'x' if ok else ' '}] {'(' + cid + ')' if cid.isdigit() else cid}")
        if report.star_holds is not None:
            print(f"  (*) {'holds' if report.star_holds else 'fails'}")
        if report.epsilon is not None:
            print(f"  epsilon family {report.epsilon:+d}")
        if report.matched_psi_family:
            print(f"  psi matches {report.matched_psi_family}")
        print(f"verdict {'permutes' if report.verdict else 'does not permute'}")
        if report.oracle_verdict is not None:
            print("oracle  agrees")
    else:
        RecordWriter(fmt).write(rec)
    return 0 if report.verdict else 1


# -- search ---------------------------------------------------------------

@dataclass(frozen=True)
class SearchJob:
    fields: tuple
    rs: tuple | None
    vs: tuple | None
    ks: tuple | None
    ts: tuple
    with_oracle: bool = False
    emit_all: bool = False
    d_filter: tuple | None = None
    workers: int = 1

    def validate(self):
        if not self.fields:
            raise UsageError("no fields to search")
        for key in self.fields:
            q = key[0] ** key[1]
            if self.with_oracle and q > ORACLE_LIMIT:
                raise UsageError(f"--oracle needs q <= {ORACLE_LIMIT}; got q = {q}")
            if q > ENGINE_Q_LIMIT:
                raise UsageError(f"search supports q <= {ENGINE_Q_LIMIT}; got q = {q}")

    def grid_for(self, q: int):
        m = q - 1
        rs = self.rs or tuple(range(1, m + 1))
        vs = self.vs or tuple(range(1, m + 1))
        ks = self.ks or tuple(range(1, q + 1))
        if self.d_filter:
            vs = tuple(v for v in vs if m // np.gcd(v, m) in self.d_filter)
        return rs, vs, ks, self.ts

    def chunks(self, per_field: int):
        for key in self.fields:
            q = key[0] ** key[1]
            rs, vs, ks, ts = self.grid_for(q)
            step = max(1, -(-len(vs) // per_field))
            for i in range(0, len(vs), step):
                yield key, rs, vs[i:i + step], ks, ts


def _search_chunk(job: SearchJob, key, rs, vs, ks, ts):
    """Engine verdicts for one slice of the grid plus reference reports for emitted tuples."""
    field = field_from_key(key)
    records = []
    paths: Counter = Counter()
    if not (rs and vs and ks and ts):
        return records, paths, 0
    verdict, path, oracle = engine.grid_verdicts(field, vs, ks, ts, rs, with_oracle=job.with_oracle)
    for code, count in zip(*np.unique(path, return_counts=True)):
        paths[engine.PATH_NAMES[code]] += int(count)
    picks = np.argwhere(np.ones_like(verdict, dtype=bool) if job.emit_all else verdict == 1)
    for ir, iv, ik, it in picks:
        params = FamilyParams(field, rs[ir], vs[iv], ks[ik], ts[it])
        report = decide(params, with_oracle=job.with_oracle)
        if report.verdict != bool(verdict[ir, iv, ik, it]):
            raise InvariantViolation(f"engine and reference disagree at q={field.q} "
                                     f"r={params.r} v={params.v} k={params.k} t={params.t}")
        if job.with_oracle and oracle[ir, iv, ik, it] != int(report.oracle_verdict):
            raise InvariantViolation(f"engine oracle disagrees at q={field.q} "
                                     f"r={params.r} v={params.v} k={params.k} t={params.t}")
        records.append(ResultRecord.from_report(params, report))
    if job.with_oracle:
        # the engine oracle checks every tuple, emitted or not
        bad = int(np.count_nonzero(oracle != verdict))
        if bad:
            raise InvariantViolation(f"{bad} engine verdicts disagree with the oracle over q={field.q}")
    return records, paths, int(verdict.size)


def run_search(job: SearchJob):
    """All records of a job in canonical (q, r, v, k, t) order, plus path counts and tuple count."""
    job.validate()
    chunks = list(job.chunks(per_field=4 * job.workers if job.workers > 1 else 1))
    if job.workers > 1:
        with ProcessPoolExecutor(max_workers=job.workers) as pool:
            results = list(pool.map(_search_chunk, [job] * len(chunks), *zip(*chunks)))
    else:
        results = [_search_chunk(job, *c) for c in chunks]
    records, paths, total = [], Counter(), 0
    for recs, cnt, n in results:
        records.extend(recs)
        paths.update(cnt)
        total += n
    records.sort(key=lambda rec: rec.key)
    return records, paths, total


def cmd_search(args) -> int:
    keys = tuple(resolve_fields(args))
    opt = {}
    for name in "rvk":
        raw = getattr(args, name)
        opt[name] = tuple(_positive(parse_int_list(raw, name), name)) if raw is not None else None
    ts = tuple(_positive(parse_int_list(args.t or "1..3", "t"), "t"))
    d_filter = tuple(parse_int_list(args.d, "d")) if args.d is not None else None
    job = SearchJob(keys, opt["r"], opt["v"], opt["k"], ts, args.oracle, args.all, d_filter,
                    resolve_workers(args))
    records, paths, total = run_search(job)
    writer = RecordWriter(resolve_format(args))
    for rec in records:
        writer.write(rec)
    sys.stdout.flush()
    found = sum(1 for rec in records if rec.verdict)
    summary = ", ".join(f"{name}={paths.get(name, 0)}" for name in engine.PATH_NAMES)
    print(f"searched {total} tuples, emitted {len(records)}, permutations {found}; paths: {summary}",
          file=sys.stderr)
    return 0


# -- theta-atlas ----------------------------------------------------------

def cmd_theta_atlas(args) -> int:
    from .atlas import enumerate_valid_theta

    atlas = enumerate_valid_theta(args.d)
    fmt = resolve_format(args)
    if fmt == "json":
        print(json.dumps(atlas.to_json()))
    elif fmt == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("d", "class", "representative", "orbit_size", "polynomial"))
        for i, cls in enumerate(atlas.classes):
            w.writerow((atlas.d, i, " ".join(map(str, cls.representative.coeffs)),
                        len(cls.orbit), str(cls.representative)))
    else:
        print(f"d={atlas.d}: {atlas.count} maps, {atlas.class_count} classes")
        for cls in atlas.classes:
            print(f"  {str(cls.representative):<40} orbit size {len(cls.orbit)}")
    return 0


# -- verify-paper ---------------------------------------------------------

def mutated_c_set():
    """C with one coefficient changed, for checking that the suite notices."""
    name, ms, terms = C_SET_FAMILIES[1]
    (c, a, b), *rest = terms
    return (C_SET_FAMILIES[0], (name, ms, ((c + 1, a, b), *rest)), C_SET_FAMILIES[2])


def cmd_verify_paper(args) -> int:
    from .checks import run_suite

    families = mutated_c_set() if args.mutate_c_set else C_SET_FAMILIES

    def show(res):
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name:<22} {res.seconds:8.1f}s  {res.detail}",
              flush=True)

    only = [x.strip() for x in args.only.split(",")] if args.only else None
    results = run_suite(quick=args.quick, families=families, progress=show, only=only)
    failed = [r.name for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)} ({total:.1f}s)")
        return 1
    print(f"all {len(results)} checks reproduced ({total:.1f}s)")
    return 0


# -- entry point ----------------------------------------------------------

def _add_field_args(sp):
    sp.add_argument("--q", help="field order(s): 7, 2..50, or 4,8,9")
    sp.add_argument("--p", type=int, help="characteristic")
    sp.add_argument("--n", type=int, help="extension degree (with --p)")
    sp.add_argument("--modulus", help="coefficients c0,c1,...,cn of the defining polynomial")


def _add_format_args(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="JSON lines output")
    g.add_argument("--csv", action="store_true", help="CSV output with header")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permfam", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="decide a single polynomial")
    _add_field_args(sp)
    for name in "rvkt":
        sp.add_argument(f"--{name}", required=True)
    sp.add_argument("--oracle", action="store_true", help="confirm by brute force")
    _add_format_args(sp)
    sp.set_defaults(func=cmd_check, q_all_prime_powers=False)

    sp = sub.add_parser("search", help="enumerate a parameter grid")
    _add_field_args(sp)
    sp.add_argument("--r", help="default 1..q-1")
    sp.add_argument("--v", help="default 1..q-1")
    sp.add_argument("--k", help="default 1..q")
    sp.add_argument("--t", help="default 1..3")
    sp.add_argument("--d", help="keep only v with (q-1)/gcd(v,q-1) in this set")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--all", action="store_true", help="emit every tuple, not only permutations")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--prime-powers-only", dest="q_all_prime_powers", action="store_true",
                    help="silently drop non-prime-powers from a --q range")
    _add_format_args(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("theta-atlas", help="valid theta_hat maps for an odd prime d")
    sp.add_argument("--d", type=int, required=True)
    _add_format_args(sp)
    sp.set_defaults(func=cmd_theta_atlas)

    sp = sub.add_parser("verify-paper", help="run the reproduction suite")
    sp.add_argument("--quick", action="store_true", help="cap exhaustive grids at q <= 128")
    sp.add_argument("--only", help="comma-separated subset of checks to run")
    sp.add_argument("--mutate-c-set", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify_paper)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FieldError, ValueError, InvariantViolation) as exc:
        print(f"permfam: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
