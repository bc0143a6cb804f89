"""Reproduction checks for the criteria and the theta_hat counts.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_suite`
runs them all.  The same functions back ``permfam verify-paper`` and the
acceptance tests.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import engine
from .atlas import atlas_c_set_sides, enumerate_valid_theta, find_realizations
from .criteria import (
    C_SET_FAMILIES,
    PsiTable,
    _basic_conditions,
    chi_decide,
    interpolate_theta,
    product_identity_check,
    prop_conditions,
    psi_table,
    star_condition,
)
from .family import FamilyParams, derive
from .field import Field, prime_powers

FULL_GRID_Q = 343
QUICK_GRID_Q = 128
LARGE_Q = 10**4


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = dc_field(default_factory=dict, repr=False)


def _families_key(families):
    return None if families is C_SET_FAMILIES else families


@lru_cache(maxsize=8)
def grid_totals(q_max: int, families=None) -> tuple[dict[str, int], tuple]:
    """Engine counters summed over every prime power q <= q_max (full parameter grid)."""
    totals: dict[str, int] = dict.fromkeys(engine.STAT_NAMES, 0)
    mismatches = []
    for q in prime_powers(2, q_max):
        stats, mism = engine.grid_stats(Field.of_order(q), families=families)
        for key, value in stats.items():
            totals[key] += value
        mismatches.extend((q,) + m for m in mism)
    return totals, tuple(mismatches)


def check_oracle_equivalence(q_max: int = FULL_GRID_Q, families=None) -> CheckResult:
    totals, mism = grid_totals(q_max, _families_key(families))
    ok = totals["mismatches"] == 0 and totals["tuples"] > 0
    detail = (f"{totals['tuples']} tuples over q <= {q_max}, {totals['oracle_true']} permutations, "
              f"{totals['mismatches']} mismatches")
    if mism:
        detail += f"; first (q,r,v,k,t): {mism[0]}"
    return CheckResult("oracle_equivalence", ok, detail, data=totals)


EXPECTED_THETA_COUNTS = {3: (1, None), 5: (1, None), 7: (3, None), 11: (25, 5), 13: (133, 14)}


def check_theta_counts() -> CheckResult:
    got, ok = {}, True
    for d, (count, classes) in EXPECTED_THETA_COUNTS.items():
        atlas = enumerate_valid_theta(d)
        got[d] = (atlas.count, atlas.class_count)
        ok &= atlas.count == count and (classes is None or atlas.class_count == classes)
    detail = ", ".join(f"d={d}: {c} maps/{k} classes" for d, (c, k) in got.items())
    return CheckResult("theta_counts", ok, detail, data={"counts": got})


def check_c_set(families=C_SET_FAMILIES) -> CheckResult:
    induced, listed = atlas_c_set_sides(families)
    ok = induced == listed and len(listed) == 24
    detail = f"{len(induced)} induced functions, {len(listed)} in C, equal={induced == listed}"
    return CheckResult("c_set_correspondence", ok, detail)


def _powmod_vec(base: np.ndarray, e: int, mod: int) -> np.ndarray:
    result = np.ones_like(base) % mod
    base = base % mod
    while e:
        if e & 1:
            result = result * base % mod
        base = base * base % mod
        e >>= 1
    return result


def representative_tuples(field: Field, d: int, t_values=(1, 2, 3)):
    """Grid tuples (r, v, k, t) with conditions (1)-(3), one per class of identical inputs.

    For odd prime d the psi table, (*), the values of g on mu_d and n_lin
    depend on k only through k mod d and on r only through r mod d, while
    conditions (1) and (3) are tested on the representative itself (the sign
    in (3) is +1 for odd d, so r plays no role there).  Hence the outcome of
    every criterion on the full grid r in [1,q-1], k in [1,q] equals its
    outcome on these representatives.
    """
    q, p = field.q, field.p
    m = q - 1
    s = m // d
    k_all = np.arange(1, q + 1, dtype=np.int64)
    r_reps = {}
    for r in range(1, q):
        if math.gcd(r, s) == 1:
            r_reps.setdefault(r % d, r)
        if len(r_reps) == d:
            break
    for j in range(1, d):
        if math.gcd(j, d) != 1:
            continue
        v = j * s
        for t in t_values:
            residues = np.arange(p, dtype=np.int64)
            kpow = _powmod_vec(residues, (s * t) % (p - 1), p)
            kpow[0] = 0
            passing = k_all[(np.gcd(k_all, d) == 1) & (kpow[k_all % p] == 1)]
            k_reps = {}
            for k in passing.tolist():
                k_reps.setdefault(k % d, k)
                if len(k_reps) == d - 1:
                    break
            for k in k_reps.values():
                for r in r_reps.values():
                    params = FamilyParams(field, r, v, k, t)
                    der = derive(params)
                    if all(ok for _, ok in _basic_conditions(params, der)):
                        yield params, der


def _small_d_routes(d: int, q_max: int):
    """For each representative tuple with (1)-(3): (chi verdict, conditions (4)&(5), (*))."""
    for q in prime_powers(d + 1, q_max):
        if (q - 1) % d:
            continue
        field = Field.of_order(q)
        ctx = field.roots_of_unity(d)
        for params, der in representative_tuples(field, d):
            chi = chi_decide(params, der, psi_table(params, der, ctx))
            flags, _ = prop_conditions(params, der, ctx)
            yield q, params, chi, flags[3] and flags[4], star_condition(params, der, ctx)


def check_d3_totality(q_max: int = LARGE_Q, grid_q: int = FULL_GRID_Q) -> CheckResult:
    totals, _ = grid_totals(grid_q, None)
    checked = bad = 0
    first = None
    for q, params, chi, prop45, _ in _small_d_routes(3, q_max):
        checked += 1
        if not (chi and prop45):
            bad += 1
            first = first or (q, params.r, params.v, params.k, params.t)
    ok = bad == 0 and totals["d3_counterexamples"] == 0 and checked and totals["d3_checked"]
    detail = (f"oracle: {totals['d3_checked']} tuples (q <= {grid_q}), "
              f"{totals['d3_counterexamples']} counterexamples; chi: {checked} classes "
              f"(q <= {q_max}), {bad} counterexamples")
    if first:
        detail += f"; first {first}"
    return CheckResult("d3_totality", bool(ok), detail)


def check_d5_star(q_max: int = LARGE_Q, grid_q: int = FULL_GRID_Q) -> CheckResult:
    totals, _ = grid_totals(grid_q, None)
    checked = bad = 0
    first = None
    for q, params, chi, prop45, star in _small_d_routes(5, q_max):
        checked += 1
        if not chi == prop45 == star:
            bad += 1
            first = first or (q, params.r, params.v, params.k, params.t)
    ok = bad == 0 and totals["d5_counterexamples"] == 0 and checked and totals["d5_checked"]
    detail = (f"oracle: {totals['d5_checked']} tuples (q <= {grid_q}), "
              f"{totals['d5_counterexamples']} counterexamples; chi: {checked} classes "
              f"(q <= {q_max}), {bad} counterexamples")
    if first:
        detail += f"; first {first}"
    return CheckResult("d5_iff_star", bool(ok), detail)


def sample_product_params(rng: random.Random, qs: list[int], fields: dict[int, Field]):
    while True:
        q = rng.choice(qs)
        if q not in fields:
            fields[q] = Field.of_order(q)
        field = fields[q]
        v = rng.randint(1, q - 1)
        d = (q - 1) // math.gcd(v, q - 1)
        k = rng.randint(1, q)
        if math.gcd(field.p * d, k) == 1:
            return FamilyParams(field, rng.randint(1, q - 1), v, k, rng.randint(1, 3))


def check_product_identity(samples: int = 1000, q_max: int = LARGE_Q, seed: int = 20240601) -> CheckResult:
    rng = random.Random(seed)
    qs = prime_powers(2, q_max)
    fields: dict[int, Field] = {}
    bad = 0
    for _ in range(samples):
        params = sample_product_params(rng, qs, fields)
        der = derive(params)
        if not product_identity_check(params, der, params.field.roots_of_unity(der.d)):
            bad += 1
    return CheckResult("product_identity", bad == 0, f"{samples} samples, {bad} failures")


def check_cond3_necessity(q_max: int = FULL_GRID_Q) -> CheckResult:
    totals, _ = grid_totals(q_max, None)
    ok = totals["cond3_violations"] == 0 and totals["oracle_true"] > 0
    return CheckResult("cond3_necessity", ok,
                       f"{totals['oracle_true']} permutations, {totals['cond3_violations']} violations")


def check_computer_claim(ds=(3, 5, 7, 11, 13), q_max: int = LARGE_Q) -> CheckResult:
    parts, ok = [], True
    witnesses = {}
    for d in ds:
        targets = enumerate_valid_theta(d).valid
        found = find_realizations(d, q_max)
        confirmed = sum(1 for w in found.values() if w.oracle_confirmed)
        ok &= len(found) == len(targets) == confirmed
        parts.append(f"d={d}: {len(found)}/{len(targets)} realised")
        witnesses[d] = found
    return CheckResult("computer_claim", ok, ", ".join(parts), data={"witnesses": witnesses})


def check_degree_bound(q_max: int = FULL_GRID_Q, synthetic: int = 1000, seed: int = 7) -> CheckResult:
    grid_tables = bad = 0
    for q in prime_powers(2, q_max):
        field = Field.of_order(q)
        for d in field.order_factors:
            if d < 3:
                continue
            for row in engine.grid_psi_tables(field, d):
                psi = PsiTable(d, tuple(int(x) for x in row))
                _, strict = interpolate_theta(psi)
                grid_tables += 1
                bad += strict != (sum(psi.values) % d == 0)
    rng = np.random.default_rng(seed)
    synth = 0
    for d in (3, 5, 7, 11, 13):
        for row in rng.integers(0, d, size=(synthetic, (d - 1) // 2)):
            psi = PsiTable(d, tuple(int(x) for x in row))
            _, strict = interpolate_theta(psi)
            synth += 1
            bad += strict != (sum(psi.values) % d == 0)
    return CheckResult("degree_bound", bad == 0,
                       f"{grid_tables} grid tables, {synth} synthetic tables, {bad} violations")


CHECK_NAMES = (
    "oracle_equivalence", "theta_counts", "c_set_correspondence", "d3_totality", "d5_iff_star",
    "product_identity", "cond3_necessity", "computer_claim", "degree_bound",
)


def run_suite(quick: bool = False, families=C_SET_FAMILIES, progress=None, only=None) -> list[CheckResult]:
    """Run every check (or those named in ``only``); ``quick`` caps the exhaustive grids at q <= 128."""
    grid_q = QUICK_GRID_Q if quick else FULL_GRID_Q
    fam = _families_key(families)
    jobs = [
        ("oracle_equivalence", lambda: check_oracle_equivalence(grid_q, fam)),
        ("theta_counts", check_theta_counts),
        ("c_set_correspondence", lambda: check_c_set(families)),
        ("d3_totality", lambda: check_d3_totality(LARGE_Q, grid_q)),
        ("d5_iff_star", lambda: check_d5_star(LARGE_Q, grid_q)),
        ("product_identity", check_product_identity),
        ("cond3_necessity", lambda: check_cond3_necessity(grid_q)),
        ("computer_claim", check_computer_claim),
        ("degree_bound", lambda: check_degree_bound(grid_q)),
    ]
    if only:
        unknown = set(only) - set(CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
        jobs = [(name, job) for name, job in jobs if name in only]
    results = []
    for name, job in jobs:
        start = time.perf_counter()
        res = job()
        res.seconds = time.perf_counter() - start
        results.append(res)
        if progress:
            progress(res)
    return results
