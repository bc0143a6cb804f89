import json

import numpy as np
import pytest

from permfam.atlas import (
    ThetaAtlas,
    atlas_c_set_sides,
    atlas_matches_c_set,
    enumerate_valid_theta,
    find_realizations,
    interpolate_theta,
    is_valid_theta,
    orbit_action,
)
from permfam.criteria import SQUARES_11, C_SET_FAMILIES, PsiTable, ThetaMap, psi_table
from permfam.family import FamilyParams, derive, family_is_permutation
from permfam.field import Field, SubgroupContext


@pytest.mark.parametrize("d,count,classes", [(3, 1, 1), (5, 1, 1), (7, 3, 2), (11, 25, 5), (13, 133, 14)])
def test_counts(d, count, classes):
    atlas = enumerate_valid_theta(d)
    assert atlas.count == count and atlas.class_count == classes
    assert ThetaMap(d, (0,) * ((d - 1) // 2)) in atlas.valid


def test_d7_maps():
    atlas = enumerate_valid_theta(7)
    assert [t.coeffs for t in atlas.valid] == [(0, 0, 0), (0, 2, 0), (0, 5, 0)]
    assert [str(c.representative) for c in atlas.classes] == ["0", "2x^2"]
    assert [len(c.orbit) for c in atlas.classes] == [1, 2]


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_methods_agree(d):
    a = enumerate_valid_theta(d, "odometer")
    b = enumerate_valid_theta(d, "backtrack")
    assert a.valid == b.valid
    assert [c.orbit for c in a.classes] == [c.orbit for c in b.classes]


@pytest.mark.parametrize("d,count,classes", [(17, 3857, 242), (19, 25905, 1453)])
def test_larger_d(d, count, classes):
    atlas = enumerate_valid_theta(d)
    assert (atlas.count, atlas.class_count) == (count, classes)
    rng = np.random.default_rng(d)
    for row in rng.choice(atlas.count, 50, replace=False):
        assert is_valid_theta(atlas.valid[row])


@pytest.mark.parametrize("d", [7, 11, 13, 17])
def test_definitional_validity_and_orbits(d):
    atlas = enumerate_valid_theta(d)
    assert all(is_valid_theta(t) for t in atlas.valid)
    assert all(t.strict for t in atlas.valid)
    assert sum(len(c.orbit) for c in atlas.classes) == atlas.count
    members = set(atlas.valid)
    for cls in atlas.classes:
        rep = cls.representative
        assert rep == min(cls.orbit, key=lambda t: t.coeffs)
        images = {orbit_action(rep, a) for a in range(1, d)}
        assert images == set(cls.orbit) and images <= members


def test_odometer_is_exhaustive_for_d7():
    valid = [ThetaMap(7, (a, b, 0)) for b in range(7) for a in range(7)]
    valid = [t for t in valid if is_valid_theta(t)]
    assert tuple(valid) == enumerate_valid_theta(7).valid


def test_orbit_action_examples():
    theta = ThetaMap(7, (0, 2, 0))
    assert orbit_action(theta, 1) == theta
    assert orbit_action(theta, 6) == ThetaMap(7, (0, 5, 0))
    assert orbit_action(theta, 3) == ThetaMap(7, (0, 5, 0))
    with pytest.raises(ValueError):
        orbit_action(theta, 7)


def test_bounds():
    for bad in (1, 2, 9, 15, 29, 31):
        with pytest.raises(ValueError):
            enumerate_valid_theta(bad)
    with pytest.raises(ValueError):
        enumerate_valid_theta(7, "magic")


def test_c_set_sides():
    induced, listed = atlas_c_set_sides()
    assert len(induced) == len(listed) == 24 and induced == listed
    assert atlas_matches_c_set()
    assert tuple(3 * i % 11 for i in SQUARES_11) in induced


def test_c_set_mutation_caught():
    name, ms, terms = C_SET_FAMILIES[1]
    (c, a, b), *rest = terms
    mutated = (C_SET_FAMILIES[0], (name, ms, ((c + 1, a, b), *rest)), C_SET_FAMILIES[2])
    assert not atlas_matches_c_set(mutated)


def test_json_export():
    atlas = enumerate_valid_theta(11)
    data = json.loads(json.dumps(atlas.to_json()))
    assert set(data) == {"d", "count", "class_count", "classes"}
    assert data["count"] == 25 and data["class_count"] == 5
    assert sum(len(c["orbit"]) for c in data["classes"]) == 25
    assert all(set(c) == {"representative", "orbit"} for c in data["classes"])


def check_witness(d, w):
    """Recompute theta_hat from the witness' own omega and confirm by brute force."""
    f = Field.of_order(w.q)
    params = FamilyParams(f, w.r, w.v, 2, 1)
    der = derive(params)
    assert der.d == d and der.e == 1
    theta, strict = interpolate_theta(psi_table(params, der, SubgroupContext(f, d, w.omega)))
    assert strict
    assert theta.scaled(pow(der.n_lin, d - 2, d)) == w.theta_hat
    return params


@pytest.mark.parametrize("d", [3, 5, 7])
def test_realizations_complete_small(d):
    found = find_realizations(d, 10**4)
    assert set(found) == set(enumerate_valid_theta(d).valid)
    for w in found.values():
        assert w.oracle_confirmed
        check_witness(d, w)


def test_realizations_d11_witness():
    found = find_realizations(11, 10**4, confirm=False)
    w = found[ThetaMap(11, (0, 0, 8, 0, 0))]
    assert (w.q, w.r, w.v) == (243, 1, 22)
    params = check_witness(11, w)
    assert family_is_permutation(params)


@pytest.fixture(scope="module")
def d11_deep():
    return find_realizations(11, 3 * 10**5, confirm=False, extension_q_max=10**4)


def test_realizations_d11_beyond_bound(d11_deep):
    """All 25 maps occur once q may exceed 10^4 (largest witness is 214787)."""
    assert set(d11_deep) == set(enumerate_valid_theta(11).valid)
    assert max(w.q for w in d11_deep.values()) == 214787
    for w in d11_deep.values():
        check_witness(11, w)


def test_atlas_membership():
    atlas = enumerate_valid_theta(13)
    assert ThetaMap(13, (0,) * 6) in atlas
    assert ThetaMap(11, (0,) * 5) not in atlas
    assert isinstance(atlas, ThetaAtlas)
