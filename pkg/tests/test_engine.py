"""The compiled engine against the reference deciders and the Python oracle."""

import random

import numpy as np
import pytest

from permfam import engine
from permfam.criteria import C_SET_FAMILIES, decide
from permfam.family import FamilyParams, family_is_permutation
from permfam.field import Field, prime_powers


@pytest.mark.parametrize("q", prime_powers(2, 64))
def test_grid_stats_clean(q):
    stats, mism = engine.grid_stats(Field.of_order(q))
    assert stats["tuples"] == (q - 1) ** 2 * q * 3
    assert stats["mismatches"] == 0 and mism == []
    assert stats["oracle_true"] == stats["verdict_true"]
    for key in ("cond3_violations", "closed_chi_prop_disagree", "star_implies_fail",
                "d3_counterexamples", "d5_counterexamples"):
        assert stats[key] == 0, key
    paths = sum(stats[k] for k in ("path_easy_d1", "path_easy_d2", "path_closed_form",
                                   "path_chi", "path_general"))
    assert paths == stats["tuples"]


@pytest.mark.parametrize("q", [16, 27, 29, 32, 125, 243, 343])
def test_verdicts_match_reference(q):
    f = Field.of_order(q)
    rng = random.Random(q)
    rs = sorted(rng.sample(range(1, q), min(q - 1, 6)))
    vs = sorted(rng.sample(range(1, q), min(q - 1, 8)))
    ks = sorted(rng.sample(range(1, q + 1), min(q, 6)))
    ts = [1, 2, 3]
    verdict, path, oracle = engine.grid_verdicts(f, vs, ks, ts, rs, with_oracle=True)
    assert (oracle == verdict).all()
    for ir, r in enumerate(rs):
        for iv, v in enumerate(vs):
            for ik, k in enumerate(ks):
                for it, t in enumerate(ts):
                    params = FamilyParams(f, r, v, k, t)
                    rep = decide(params)
                    assert rep.verdict == bool(verdict[ir, iv, ik, it])
                    assert rep.path.value == engine.PATH_NAMES[path[ir, iv, ik, it]]
                    if q <= 32:
                        assert family_is_permutation(params) == rep.verdict


def test_engine_oracle_on_large_exponents():
    f = Field(31)
    rs = np.array([1, 7, 31, 61, 10**6 + 3])
    vs = np.array([3, 10, 45, 1000])
    ks = np.array([2, 5, 33, 10**5 + 1])
    verdict, _, oracle = engine.grid_verdicts(f, vs, ks, [1, 4], rs, with_oracle=True)
    assert (oracle == verdict).all()
    for ir, r in enumerate(rs):
        for iv, v in enumerate(vs):
            for ik, k in enumerate(ks):
                params = FamilyParams(f, int(r), int(v), int(k), 4)
                assert family_is_permutation(params) == bool(oracle[ir, iv, ik, 1])


def test_broken_c_set_is_detected():
    # dropping m = -3 from the first family loses witnesses over F_243
    name, ms, terms = C_SET_FAMILIES[0]
    broken = ((name, (3, 5, -5), terms),) + C_SET_FAMILIES[1:]
    stats, mism = engine.grid_stats(Field(3, 5), vs=[22], k_range=(2, 2), t_range=(1, 1),
                                    families=broken)
    assert stats["mismatches"] > 0 and mism[0][1] == 22


def test_psi_tables_for_d():
    f = Field(43)
    rows = engine.grid_psi_tables(f, 7)
    assert rows.shape[1] == 3 and len(rows) > 1
    assert (rows >= 0).all() and (rows < 7).all()
    assert engine.grid_psi_tables(f, 5).shape == (0, 2)
