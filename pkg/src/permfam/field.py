"""Exact arithmetic in finite fields F_q, q = p^n.

Elements are plain integers in ``[0, q)``.  The base-``p`` digits of an
element are its coordinates in the power basis of the defining modulus,
constant coordinate first, so ``x = c_0 + c_1 p + ... + c_{n-1} p^{n-1}``.
Integer order is the canonical total order on elements; in particular the
prime subfield F_p is ``{0, 1, ..., p-1}`` and ``k * 1`` is ``k % p``.

Supported sizes: ``q <= 2**48`` (``MAX_ORDER``).  Fields with
``q <= TABLE_LIMIT`` additionally keep exp/log tables so that
multiplication, inversion and powering are table lookups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

MAX_ORDER = 2**48
TABLE_LIMIT = 2**16
DLOG_TABLE_LIMIT = 10**6


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    """Description of F_{p^n}; ``modulus`` lists coefficients constant first."""

    p: int
    n: int = 1
    modulus: tuple[int, ...] | None = None

    @property
    def q(self) -> int:
        return self.p**self.n


def is_irreducible(coeffs, p: int) -> bool:
    """Irreducibility over F_p of the polynomial with coefficients ``coeffs`` (constant first)."""
    dense = [c % p for c in reversed(coeffs)]
    while dense and dense[0] == 0:
        dense.pop(0)
    if len(dense) < 2:
        return False
    return bool(gf_irreducible_p(dense, p, ZZ))


def find_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree n over F_p.

    Candidates ``(c_0, ..., c_{n-1})`` are scanned lexicographically with
    ``c_0`` most significant; the returned tuple includes the leading 1.
    """
    # c_0 = 0 means x divides the candidate, so those are skipped outright
    for low in product(range(1, p), *[range(p)] * (n - 1)):
        coeffs = low + (1,)
        if is_irreducible(coeffs, p):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, n) with q = p^n, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    f = factorint(q)
    if len(f) != 1:
        raise FieldError(f"{q} is not a prime power")
    (p, n), = f.items()
    return int(p), int(n)


def is_prime_power(q: int) -> bool:
    return q >= 2 and len(factorint(q)) == 1


def prime_powers(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime_power(q)]


class Field:
    """The finite field F_q with q = p^n."""

    def __init__(self, p: int, n: int = 1, modulus=None):
        if p < 2 or not isprime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if n < 1:
            raise FieldError("extension degree must be at least 1")
        q = p**n
        if q > MAX_ORDER:
            raise FieldError(f"q = {q} exceeds the supported bound 2**48")
        self.p = p
        self.n = n
        self.q = q
        if n == 1:
            if modulus is not None and len(modulus) != 2:
                raise FieldError("a prime field takes no modulus of degree > 1")
            self.modulus = None
        else:
            if modulus is None:
                modulus = find_irreducible(p, n)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != n + 1:
                raise FieldError(f"modulus must have degree {n}")
            if modulus[-1] != 1:
                raise FieldError("modulus must be monic")
            if not is_irreducible(modulus, p):
                raise FieldError(f"modulus {modulus} is reducible over F_{p}")
            self.modulus = modulus
        self._exp = self._log = None
        self._contexts: dict[int, SubgroupContext] = {}
        if n > 1 and q <= TABLE_LIMIT:
            self._build_tables()

    @classmethod
    def of_order(cls, q: int) -> "Field":
        p, n = prime_power(q)
        return cls(p, n)

    @property
    def spec(self) -> FieldSpec:
        return FieldSpec(self.p, self.n, self.modulus)

    def __repr__(self):
        if self.n == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.n}, modulus={list(self.modulus)})"

    # -- coordinates -------------------------------------------------------

    def coords(self, x: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.n):
            x, c = divmod(x, p)
            out.append(c)
        return out

    def element(self, coeffs) -> int:
        """Pack a coordinate vector (constant first) into an element."""
        if len(coeffs) > self.n:
            raise FieldError("too many coordinates")
        x = 0
        for c in reversed(list(coeffs)):
            x = x * self.p + (c % self.p)
        return x

    def __call__(self, k: int) -> int:
        """The element k * 1 of the prime subfield."""
        return k % self.p

    def elements(self) -> range:
        return range(self.q)

    # -- additive structure -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        ca, cb = self.coords(a), self.coords(b)
        return self.element([x + y for x, y in zip(ca, cb)])

    def neg(self, a: int) -> int:
        if self.n == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.element([-c for c in self.coords(a)])

    def sub(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    # -- multiplicative structure -------------------------------------------

    def _polymul(self, a: int, b: int) -> int:
        p, n, mod = self.p, self.n, self.modulus
        ca, cb = self.coords(a), self.coords(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        for deg in range(2 * n - 2, n - 1, -1):
            c = prod[deg] % p
            if c:
                for j in range(n):
                    prod[deg - n + j] -= c * mod[j]
            prod[deg] = 0
        return self.element(prod[:n])

    def _build_tables(self):
        m = self.q - 1
        g = self._search_primitive_root(self._polymul)
        exp = [0] * m
        log = [-1] * self.q
        x = 1
        for a in range(m):
            exp[a] = x
            log[x] = a
            x = self._polymul(x, g)
        self._exp, self._log = exp, log
        self.__dict__["primitive_root"] = g

    def mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._polymul(a, b)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 1 if e == 0 else 0
        m = self.q - 1
        e %= m
        if self.n == 1:
            return pow(a, e, self.p)
        if self._log is not None:
            return self._exp[self._log[a] * e % m]
        result, base = 1, a
        while e:
            if e & 1:
                result = self._polymul(result, base)
            base = self._polymul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, -1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # -- group structure ----------------------------------------------------

    @cached_property
    def order_factors(self) -> dict[int, int]:
        """Prime factorisation of q - 1."""
        return {int(ell): int(a) for ell, a in factorint(self.q - 1).items()}

    def element_order(self, x: int) -> int:
        """Multiplicative order of a nonzero element."""
        if x == 0:
            raise FieldError("0 has no multiplicative order")
        order = self.q - 1
        for ell in self.order_factors:
            while order % ell == 0 and self.pow(x, order // ell) == 1:
                order //= ell
        return order

    def _search_primitive_root(self, mul) -> int:
        m = self.q - 1
        if m == 1:
            return 1
        cofactors = [m // ell for ell in self.order_factors]
        for g in range(2, self.q):
            def power(e):
                result, base = 1, g
                while e:
                    if e & 1:
                        result = mul(result, base)
                    base = mul(base, base)
                    e >>= 1
                return result
            if all(power(c) != 1 for c in cofactors):
                return g
        raise FieldError("no primitive root found")

    @cached_property
    def primitive_root(self) -> int:
        """Smallest generator of F_q^* in the canonical element order."""
        return self._search_primitive_root(self.mul)

    def roots_of_unity(self, d: int) -> "SubgroupContext":
        """mu_d, generated by g^((q-1)/d) for the primitive root g."""
        if d < 1 or (self.q - 1) % d:
            raise FieldError(f"{d} does not divide q - 1 = {self.q - 1}")
        ctx = self._contexts.get(d)
        if ctx is None:
            omega = self.pow(self.primitive_root, (self.q - 1) // d)
            ctx = self._contexts[d] = SubgroupContext(self, d, omega)
        return ctx

    def log_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """exp, log and log(1 - g^b) tables relative to the primitive root.

        ``log[0]`` and ``one_minus[0]`` are -1 (there is no logarithm of 0).
        Intended for the vectorised search engine; limited to q <= 2**24.
        """
        if self.q > 2**24:
            raise FieldError("log tables are limited to q <= 2**24")
        return _log_tables(self)


_TABLE_CACHE: dict[FieldSpec, tuple] = {}


def _log_tables(field: Field):
    key = field.spec
    if key not in _TABLE_CACHE:
        m = field.q - 1
        g = field.primitive_root
        exp = np.empty(m, dtype=np.int64)
        x = 1
        for a in range(m):
            exp[a] = x
            x = field.mul(x, g)
        log = np.full(field.q, -1, dtype=np.int64)
        log[exp] = np.arange(m, dtype=np.int64)
        one_minus = np.full(m, -1, dtype=np.int64)
        for b in range(1, m):
            one_minus[b] = log[field.sub(1, int(exp[b]))]
        _TABLE_CACHE[key] = (exp, log, one_minus)
    return _TABLE_CACHE[key]


def build_field(spec: FieldSpec) -> Field:
    return Field(spec.p, spec.n, spec.modulus)


@dataclass(frozen=True)
class SubgroupContext:
    """The cyclic subgroup mu_d of F_q^* with a chosen generator ``omega``."""

    field: Field
    d: int
    omega: int

    def __post_init__(self):
        f = self.field
        if (f.q - 1) % self.d:
            raise FieldError(f"{self.d} does not divide q - 1")
        if self.omega == 0 or f.element_order(self.omega) != self.d:
            raise FieldError(f"omega = {self.omega} does not have order {self.d}")

    def power(self, j: int) -> int:
        return self.field.pow(self.omega, j % self.d)

    @cached_property
    def elements(self) -> tuple[int, ...]:
        f, out, x = self.field, [], 1
        for _ in range(self.d):
            out.append(x)
            x = f.mul(x, self.omega)
        return tuple(out)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {x: j for j, x in enumerate(self.elements)}

    def contains(self, x: int) -> bool:
        return x != 0 and self.field.pow(x, self.d) == 1

    def dlog(self, x: int) -> int:
        """The exponent j in [0, d) with omega^j = x."""
        if not self.contains(x):
            raise FieldError(f"{x} is not in mu_{self.d}")
        if self.d <= DLOG_TABLE_LIMIT:
            return self._index[x]
        return self._bsgs(x)

    def _bsgs(self, x: int) -> int:
        f = self.field
        step = math.isqrt(self.d - 1) + 1
        baby = {}
        y = 1
        for j in range(step):
            baby.setdefault(y, j)
            y = f.mul(y, self.omega)
        giant = f.inv(f.pow(self.omega, step))
        y = x
        for i in range(step + 1):
            if y in baby:
                return (i * step + baby[y]) % self.d
            y = f.mul(y, giant)
        raise FieldError("discrete logarithm not found")

    def with_generator(self, c: int) -> "SubgroupContext":
        """Same subgroup, generator replaced by omega^c (c a unit mod d)."""
        if math.gcd(c, self.d) != 1:
            raise FieldError(f"omega^{c} does not generate mu_{self.d}")
        return SubgroupContext(self.field, self.d, self.power(c))
