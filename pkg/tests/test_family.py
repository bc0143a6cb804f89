import pytest
from hypothesis import given, settings, strategies as st

from permfam.field import Field, FieldError, prime_powers
from permfam.family import (
    FamilyParams,
    derive,
    eval_f,
    eval_f_literal,
    eval_hk,
    family_is_permutation,
    g_quotient,
    ghat_on_mu_d,
    is_permutation_oracle,
)

F5, F7, F11, F13 = (Field(p) for p in (5, 7, 11, 13))


def test_derive_examples():
    d = derive(FamilyParams(F13, 1, 4, 1, 1))
    assert (d.s, d.d, d.e) == (4, 3, 1)
    d = derive(FamilyParams(F7, 1, 2, 1, 1))
    assert (d.s, d.d, d.e) == (2, 3, 1)
    d = derive(FamilyParams(F11, 1, 2, 2, 1))
    assert (d.s, d.d, d.e, d.n_lin) == (2, 5, 1, 4)


def test_params_positive():
    with pytest.raises(ValueError):
        FamilyParams(F7, 0, 1, 1, 1)
    with pytest.raises(ValueError):
        FamilyParams(F7, 1, 1, 1, 0)


def test_eval_hk_examples():
    assert eval_hk(F5, 3, 1) == 3
    assert eval_hk(F5, 3, 2) == 2
    assert eval_hk(F7, 2, 0) == 1


def test_eval_f_examples():
    assert eval_f(FamilyParams(F7, 1, 2, 2, 1), 3) == 2
    assert eval_f(FamilyParams(F7, 1, 2, 2, 3), 2) == 5
    assert eval_f(FamilyParams(F7, 1, 2, 2, 3), 0) == 0


def test_oracle_examples():
    assert not is_permutation_oracle(F5, lambda x: x * x % 5)
    assert is_permutation_oracle(F5, lambda x: x**3 % 5)
    params = FamilyParams(F7, 1, 2, 2, 3)
    assert [eval_f(params, x) for x in range(7)] == [0, 1, 5, 4, 3, 2, 6]
    assert family_is_permutation(params)


def test_easy_d2_collision_example():
    params = FamilyParams(F5, 1, 2, 3, 1)
    assert eval_f(params, 2) == eval_f(params, 4) == 2
    assert not family_is_permutation(params)


def test_ghat_examples():
    params = FamilyParams(F7, 1, 2, 2, 3)
    ctx = F7.roots_of_unity(3)
    assert ghat_on_mu_d(params, ctx, 2) == 2
    # zeta = 1 gives k^(st)
    assert ghat_on_mu_d(params, ctx, 1) == pow(2, 6, 7)
    # d | k: h_k vanishes at a nontrivial zeta
    bad = FamilyParams(F7, 1, 2, 3, 1)
    assert 0 in {ghat_on_mu_d(bad, ctx, z) for z in ctx.elements[1:]}


def test_ghat_rejects_foreign_context():
    params = FamilyParams(F7, 1, 2, 2, 3)
    with pytest.raises(FieldError):
        ghat_on_mu_d(params, F7.roots_of_unity(2), 1)
    with pytest.raises(FieldError):
        g_quotient(params, F7.roots_of_unity(3), 1)


def test_oracle_bound():
    with pytest.raises(FieldError):
        is_permutation_oracle(Field(1000003), lambda x: x)


SMALL = prime_powers(2, 64)


@st.composite
def small_params(draw, max_exp=12):
    q = draw(st.sampled_from(SMALL))
    f = Field.of_order(q)
    return FamilyParams(f, *(draw(st.integers(1, max_exp)) for _ in range(4)))


@settings(max_examples=300, deadline=None)
@given(small_params(), st.data())
def test_eval_matches_literal(params, data):
    x = data.draw(st.integers(0, params.field.q - 1))
    assert eval_f(params, x) == eval_f_literal(params, x)


@settings(max_examples=200, deadline=None)
@given(small_params(max_exp=200), st.data())
def test_quotient_matches_ghat(params, data):
    der = derive(params)
    ctx = params.field.roots_of_unity(der.d)
    z = data.draw(st.sampled_from(ctx.elements))
    f = params.field
    if z != 1 and f.pow(z, der.e) != 1:
        assert g_quotient(params, ctx, z) == ghat_on_mu_d(params, ctx, z)
    # f(x) restricted to x^s = z: ghat(z) is f(x)^s
    m = f.q - 1
    x = next(y for y in range(1, f.q) if f.pow(y, der.s) == z)
    assert f.pow(eval_f(params, x), der.s) == ghat_on_mu_d(params, ctx, z)
    assert f.pow(x, m) == 1
