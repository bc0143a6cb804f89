"""Permutation criteria for x^r * h_k(x^v)^t and the decision pipeline.

Every decider returns a :class:`CriterionReport` listing the conditions it
evaluated, so a negative verdict always says which condition failed.
Condition ids "1".."5" refer to the five-condition characterisation:

1. gcd(r, s) = gcd(d, k) = 1
2. gcd(d, 2r + vt(k-1)) <= 2
3. k^(st) = (-1)^((d+1)(r+1)) mod p
4. g(x) = x^r ((1 - x^(ek))/(1 - x^e))^(st) is injective on mu_d minus {1}
5. (-1)^((d+1)(r+1)) is not a value of g on mu_d minus {1}
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from sympy import isprime

from .family import (
    ORACLE_LIMIT,
    DerivedParams,
    FamilyParams,
    derive,
    family_is_permutation,
    g_quotient,
    ghat_on_mu_d,
)
from .field import Field, FieldError, SubgroupContext


class InvariantViolation(RuntimeError):
    """Two routes that must agree did not; always an implementation bug."""


class Path(str, enum.Enum):
    EASY_D1 = "EASY_D1"
    EASY_D2 = "EASY_D2"
    PRIME_D_CLOSED_FORM = "PRIME_D_CLOSED_FORM"
    PRIME_D_CHI = "PRIME_D_CHI"
    GENERAL_PROP = "GENERAL_PROP"


@dataclass
class CriterionReport:
    verdict: bool
    path: Path
    conditions: list[tuple[str, bool]] = dc_field(default_factory=list)
    star_holds: bool | None = None
    epsilon: int | None = None
    matched_psi_family: str | None = None
    oracle_verdict: bool | None = None

    def condition(self, cid: str) -> bool | None:
        for key, value in self.conditions:
            if key == cid:
                return value
        return None


@dataclass(frozen=True)
class PsiTable:
    """Values psi(1), ..., psi((d-1)/2); psi(0) = 0 and psi(-i) = psi(i)."""

    d: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != (self.d - 1) // 2:
            raise ValueError("psi table needs (d-1)/2 values")
        if any(not 0 <= x < self.d for x in self.values):
            raise ValueError("psi values must lie in [0, d)")

    def __call__(self, i: int) -> int:
        i %= self.d
        if i == 0:
            return 0
        if 2 * i > self.d:
            i = self.d - i
        return self.values[i - 1]


@dataclass(frozen=True)
class ThetaMap:
    """theta(x) = c_1 x + ... + c_h x^h over F_d with h = (d-1)/2."""

    d: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != (self.d - 1) // 2:
            raise ValueError("theta needs (d-1)/2 coefficients")

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc + c) * x % self.d
        return acc

    @property
    def strict(self) -> bool:
        """deg(theta) < (d-1)/2."""
        return not self.coeffs or self.coeffs[-1] == 0

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def scaled(self, c: int) -> "ThetaMap":
        return ThetaMap(self.d, tuple(a * c % self.d for a in self.coeffs))

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coeffs, start=1):
            if c:
                mono = "x" if j == 1 else f"x^{j}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) or "0"


def _sign(field: Field, d: int, r: int) -> int:
    """(-1)^((d+1)(r+1)) as an element of F_q."""
    return 1 if (d + 1) * (r + 1) % 2 == 0 else field.neg(1)


def k_power_mod_p(k: int, st: int, p: int) -> int:
    """k^st mod p for possibly huge st."""
    k %= p
    if k == 0:
        return 0
    return pow(k, st % (p - 1), p)


def _basic_conditions(params: FamilyParams, der: DerivedParams) -> list[tuple[str, bool]]:
    p = params.field.p
    c1 = math.gcd(params.r, der.s) == 1 and math.gcd(der.d, params.k) == 1
    c2 = math.gcd(der.d, der.n_lin) <= 2
    sign = 1 if (der.d + 1) * (params.r + 1) % 2 == 0 else p - 1
    c3 = k_power_mod_p(params.k, der.s * params.t, p) == sign % p
    return [("1", c1), ("2", c2), ("3", c3)]


def lemma1_decide(field: Field, r: int, d: int, h) -> bool:
    """Whether x^r h(x^((q-1)/d)) permutes F_q, via the subgroup reduction.

    ``h`` is any map on field elements.  The reduced map
    zeta -> zeta^r h(zeta)^((q-1)/d) is tested for bijectivity on mu_d.
    """
    if d < 1 or (field.q - 1) % d:
        raise FieldError(f"{d} does not divide q - 1")
    s = (field.q - 1) // d
    if math.gcd(r, s) != 1:
        return False
    ctx = field.roots_of_unity(d)
    members = set(ctx.elements)
    images = {field.mul(field.pow(z, r), field.pow(h(z), s)) for z in ctx.elements}
    return len(images) == d and images <= members


def easy_d_decide(params: FamilyParams, der: DerivedParams) -> CriterionReport:
    p, k = params.field.p, params.k
    rs = math.gcd(params.r, der.s) == 1
    if der.d == 1:
        kp = math.gcd(k, p) == 1
        return CriterionReport(kp and rs, Path.EASY_D1, [("gcd(k,p)=1", kp), ("gcd(r,s)=1", rs)])
    if der.d == 2:
        k2p = math.gcd(k, 2 * p) == 1
        sign = 1 if (params.r + 1) % 2 == 0 else p - 1
        cong = k_power_mod_p(k, der.s * params.t, p) == sign % p
        conditions = [("gcd(k,2p)=1", k2p), ("gcd(r,s)=1", rs), ("k^st=(-1)^(r+1) mod p", cong)]
        return CriterionReport(k2p and rs and cong, Path.EASY_D2, conditions)
    raise ValueError(f"easy_d_decide needs d in {{1, 2}}, got d = {der.d}")


def prop_conditions(params: FamilyParams, der: DerivedParams, ctx: SubgroupContext):
    """Evaluate all five conditions; returns (c1, ..., c5) and a report."""
    field = params.field
    conds = _basic_conditions(params, der)
    values = [g_quotient(params, ctx, z) for z in ctx.elements[1:]]
    image = set(values)
    c4 = len(image) == len(values)
    c5 = _sign(field, der.d, params.r) not in image
    conds += [("4", c4), ("5", c5)]
    flags = tuple(v for _, v in conds)
    return flags, CriterionReport(all(flags), Path.GENERAL_PROP, conds)


def product_identity_check(params: FamilyParams, der: DerivedParams, ctx: SubgroupContext) -> bool:
    """prod over mu_d of ghat equals (-1)^((d+1)r) k^(st)."""
    field = params.field
    if math.gcd(der.d, params.k) != 1 or params.k % field.p == 0:
        raise ValueError("product identity needs gcd(pd, k) = 1")
    lhs = 1
    for z in ctx.elements:
        lhs = field.mul(lhs, ghat_on_mu_d(params, ctx, z))
    sign = 1 if (der.d + 1) * params.r % 2 == 0 else field.neg(1)
    rhs = field.mul(sign, field.pow(field(params.k), der.s * params.t))
    return lhs == rhs


def _require_odd_prime(d: int):
    if d < 3 or not isprime(d):
        raise ValueError(f"d = {d} is not an odd prime")


def _sine_ratio(field: Field, ctx: SubgroupContext, a: int, b: int) -> int:
    """(w^a - w^-a) / (w^b - w^-b) for w = omega."""
    num = field.sub(ctx.power(a), ctx.power(-a))
    den = field.sub(ctx.power(b), ctx.power(-b))
    if num == 0 or den == 0:
        raise InvariantViolation(f"vanishing sine ratio at exponents ({a}, {b})")
    return field.div(num, den)


def psi_table(params: FamilyParams, der: DerivedParams, ctx: SubgroupContext) -> PsiTable:
    d, field = der.d, params.field
    _require_odd_prime(d)
    if math.gcd(d, params.k) != 1:
        raise ValueError("psi table needs gcd(d, k) = 1")
    st, e = der.s * params.t, der.e
    values = []
    for i in range(1, (d - 1) // 2 + 1):
        y = field.pow(_sine_ratio(field, ctx, i * params.k * e, i * e), st)
        if not ctx.contains(y):
            raise InvariantViolation(f"psi({i}) value {y} is not in mu_{d}")
        values.append(ctx.dlog(y))
    return PsiTable(d, tuple(values))


@lru_cache(maxsize=None)
def _lagrange_basis(nodes: tuple[int, ...], p: int) -> np.ndarray:
    """Row j holds the coefficients (constant first) of the j-th Lagrange basis polynomial."""
    size = len(nodes)
    basis = np.zeros((size, size), dtype=np.int64)
    for j, xj in enumerate(nodes):
        poly = [1]
        denom = 1
        for l, xl in enumerate(nodes):
            if l == j:
                continue
            # multiply by (x - xl)
            nxt = [0] * (len(poly) + 1)
            for a, c in enumerate(poly):
                nxt[a] = (nxt[a] - c * xl) % p
                nxt[a + 1] = (nxt[a + 1] + c) % p
            poly = nxt
            denom = denom * (xj - xl) % p
        scale = pow(denom, p - 2, p)
        basis[j, : len(poly)] = [c * scale % p for c in poly]
    return basis


def lagrange_interpolate(xs, ys, p: int) -> list[int]:
    """Coefficients (constant first) of the unique polynomial of degree < len(xs) through the points."""
    nodes = tuple(x % p for x in xs)
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    basis = _lagrange_basis(nodes, p)
    y = np.asarray([v % p for v in ys], dtype=np.int64)
    return [int(c) for c in (y @ basis) % p]


def interpolate_theta(psi: PsiTable) -> tuple[ThetaMap, bool]:
    """theta with theta(0) = 0 and theta(i^2) = psi(i), degree <= (d-1)/2."""
    d = psi.d
    _require_odd_prime(d)
    half = (d - 1) // 2
    xs = [i * i % d for i in range(half + 1)]
    ys = [0] + list(psi.values)
    coeffs = lagrange_interpolate(xs, ys, d)
    assert coeffs[0] == 0
    theta = ThetaMap(d, tuple(coeffs[1:]))
    return theta, theta.strict


def chi_decide(params: FamilyParams, der: DerivedParams, psi: PsiTable) -> bool:
    """Bijectivity of i -> i * n_lin + psi(i) on Z/d."""
    d = der.d
    _require_odd_prime(d)
    if psi.d != d:
        raise ValueError("psi table belongs to a different d")
    return len({(i * der.n_lin + psi(i)) % d for i in range(d)}) == d


def star_condition(params: FamilyParams, der: DerivedParams, ctx: SubgroupContext) -> bool:
    """((z^k - z^-k)/(z - z^-1))^(st) = 1 for every z in mu_d minus {1}.

    At z = -1 the quotient is read as its polynomial value (-1)^(k-1) k.
    """
    field, k = params.field, params.k
    if der.d < 2 or math.gcd(der.d, k) != 1:
        raise ValueError("star condition needs d >= 2 and gcd(d, k) = 1")
    minus_one = field.neg(1)
    st = der.s * params.t
    for z in ctx.elements[1:]:
        if z == minus_one:
            x = field(k) if k % 2 else field.neg(field(k))
        else:
            num = field.sub(field.pow(z, k), field.pow(z, -k))
            den = field.sub(z, field.inv(z))
            x = field.div(num, den)
        if x == 0 or field.pow(x, st) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# The explicit list C for d = 11: functions on the squares (1, 3, 4, 5, 9).
#
# Each family is (name, range of m, terms) with terms (coef, m-exponent,
# i-exponent), i.e. the map i -> sum coef * m^a * i^b mod 11.

SQUARES_11 = (1, 3, 4, 5, 9)

C_SET_FAMILIES = (
    ("C1", (3, -3, 5, -5), ((1, 1, 1),)),
    ("C2", tuple(range(1, 11)), ((5, 3, 4), (1, 7, 3), (-2, 1, 2), (-4, 5, 1))),
    ("C3", tuple(range(1, 11)), ((4, 3, 4), (1, 7, 3), (-2, 1, 2), (-5, 5, 1))),
)


@dataclass(frozen=True)
class PsiFamily:
    """One member of C, with every (family, m) that produces it."""

    tags: tuple[str, ...]
    values: tuple[int, ...]

    @property
    def tag(self) -> str:
        return self.tags[0]

    def __call__(self, i: int) -> int:
        return self.values[SQUARES_11.index(i % 11)]


def c_set_d11(families=C_SET_FAMILIES) -> list[PsiFamily]:
    seen: dict[tuple[int, ...], list[str]] = {}
    for name, ms, terms in families:
        for m in ms:
            values = tuple(
                sum(c * pow(m, a, 11) * pow(i, b, 11) for c, a, b in terms) % 11
                for i in SQUARES_11
            )
            seen.setdefault(values, []).append(f"{name}[m={m % 11}]")
    return [PsiFamily(tuple(tags), values) for values, tags in seen.items()]


CLOSED_FORM_D = (3, 5, 7, 11)


def prime_d_decide(params: FamilyParams, der: DerivedParams, ctx: SubgroupContext,
                   families=C_SET_FAMILIES) -> CriterionReport:
    d = der.d
    if d not in CLOSED_FORM_D:
        raise ValueError(f"no closed form for d = {d}")
    conds = _basic_conditions(params, der)
    if not all(v for _, v in conds):
        return CriterionReport(False, Path.GENERAL_PROP, conds)
    report = CriterionReport(False, Path.PRIME_D_CLOSED_FORM, conds)
    report.star_holds = star_condition(params, der, ctx)
    n = der.n_lin
    if d == 3:
        report.verdict = True
    elif d == 5:
        report.verdict = report.star_holds
    elif d == 7:
        psi = psi_table(params, der, ctx)
        for eps in (1, -1):
            if all(psi(i) == 2 * eps * n * i % 7 for i in (1, 2, 4)):
                report.epsilon = eps
                break
        report.verdict = report.star_holds or report.epsilon is not None
    else:
        psi = psi_table(params, der, ctx)
        for fam in c_set_d11(families):
            if all(psi(i) == n * fam(i) % 11 for i in SQUARES_11):
                report.matched_psi_family = fam.tag
                break
        report.verdict = report.star_holds or report.matched_psi_family is not None
    return report


def decide(params: FamilyParams, with_oracle: bool = False) -> CriterionReport:
    """Dispatch to the strongest applicable criterion.

    With ``with_oracle`` (and q within the oracle bound) the verdict is also
    computed by brute force, and disagreement raises InvariantViolation.
    """
    der = derive(params)
    field = params.field
    if der.d <= 2:
        report = easy_d_decide(params, der)
    elif der.d % 2 and isprime(der.d):
        ctx = field.roots_of_unity(der.d)
        if der.d in CLOSED_FORM_D:
            report = prime_d_decide(params, der, ctx)
        else:
            conds = _basic_conditions(params, der)
            if not all(v for _, v in conds):
                report = CriterionReport(False, Path.GENERAL_PROP, conds)
            else:
                chi = chi_decide(params, der, psi_table(params, der, ctx))
                report = CriterionReport(chi, Path.PRIME_D_CHI, conds + [("chi", chi)])
                report.star_holds = star_condition(params, der, ctx)
    else:
        _, report = prop_conditions(params, der, field.roots_of_unity(der.d))
    if with_oracle and field.q <= ORACLE_LIMIT:
        report.oracle_verdict = family_is_permutation(params)
        if report.oracle_verdict != report.verdict:
            raise InvariantViolation(
                f"criteria say {report.verdict}, oracle says {report.oracle_verdict} "
                f"for q={field.q} r={params.r} v={params.v} k={params.k} t={params.t}"
            )
    return report
