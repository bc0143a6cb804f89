"""The polynomials f(x) = x^r * h_k(x^v)^t and a brute-force permutation test.

Here h_k(x) = 1 + x + ... + x^(k-1).  Exponents are kept as Python integers
of any size and only reduced modulo q - 1 when applied to nonzero bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .field import Field, FieldError, SubgroupContext

ORACLE_LIMIT = 10**6


@dataclass(frozen=True)
class FamilyParams:
    field: Field
    r: int
    v: int
    k: int
    t: int

    def __post_init__(self):
        for name in ("r", "v", "k", "t"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")


@dataclass(frozen=True)
class DerivedParams:
    """s = gcd(v, q-1), d = (q-1)/s, e = v/s and n_lin = (2r + (k-1)vt) mod d."""

    s: int
    d: int
    e: int
    n_lin: int


def derive(params: FamilyParams) -> DerivedParams:
    m = params.field.q - 1
    s = math.gcd(params.v, m)
    d = m // s
    e = params.v // s
    assert math.gcd(d, e) == 1
    n_lin = (2 * params.r + (params.k - 1) * params.v * params.t) % d
    return DerivedParams(s, d, e, n_lin)


def eval_hk(field: Field, k: int, x: int) -> int:
    """h_k(x); equals k * 1 at x = 1 and (x^k - 1)/(x - 1) elsewhere."""
    if x == 0:
        return 1
    if x == 1:
        return field(k)
    return field.div(field.sub(field.pow(x, k), 1), field.sub(x, 1))


def eval_f(params: FamilyParams, x: int) -> int:
    if x == 0:
        return 0
    f = params.field
    h = eval_hk(f, params.k, f.pow(x, params.v))
    return f.mul(f.pow(x, params.r), f.pow(h, params.t))


def eval_f_literal(params: FamilyParams, x: int) -> int:
    """f(x) by repeated multiplication, with no exponent reduction at all.

    Only usable for small exponents; serves as a check on ``eval_f``.
    """
    f = params.field

    def power(base, e):
        out = 1
        for _ in range(e):
            out = f.mul(out, base)
        return out

    y = power(x, params.v)
    h, term = 0, 1
    for _ in range(params.k):
        h = f.add(h, term)
        term = f.mul(term, y)
    return f.mul(power(x, params.r), power(h, params.t))


def is_permutation_oracle(field: Field, fn) -> bool:
    """True iff ``fn`` takes q pairwise distinct values on F_q."""
    if field.q > ORACLE_LIMIT:
        raise FieldError(f"oracle limited to q <= {ORACLE_LIMIT}")
    seen = bytearray(field.q)
    for x in field.elements():
        y = fn(x)
        if seen[y]:
            return False
        seen[y] = 1
    return True


def family_is_permutation(params: FamilyParams) -> bool:
    return is_permutation_oracle(params.field, lambda x: eval_f(params, x))


def ghat_on_mu_d(params: FamilyParams, ctx: SubgroupContext, zeta: int) -> int:
    """zeta^r * h_k(zeta^e)^(st) for zeta in mu_d."""
    der = derive(params)
    if ctx.d != der.d:
        raise FieldError(f"context is mu_{ctx.d}, expected mu_{der.d}")
    if not ctx.contains(zeta):
        raise FieldError(f"{zeta} is not in mu_{ctx.d}")
    f = params.field
    h = eval_hk(f, params.k, f.pow(zeta, der.e))
    return f.mul(f.pow(zeta, params.r), f.pow(h, der.s * params.t))


def g_quotient(params: FamilyParams, ctx: SubgroupContext, zeta: int) -> int:
    """zeta^r * ((1 - zeta^(ek)) / (1 - zeta^e))^(st) for zeta in mu_d, zeta != 1."""
    der = derive(params)
    f = params.field
    if zeta == 1 or not ctx.contains(zeta):
        raise FieldError("g_quotient needs zeta in mu_d minus {1}")
    ze = f.pow(zeta, der.e)
    ratio = f.div(f.sub(1, f.pow(ze, params.k)), f.sub(1, ze))
    return f.mul(f.pow(zeta, params.r), f.pow(ratio, der.s * params.t))
