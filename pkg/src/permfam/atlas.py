"""Maps theta_hat with theta_hat(0) = 0, deg < (d-1)/2 and x + theta_hat(x^2) a permutation of F_d.

Two enumeration strategies are provided:

``odometer``
    every coefficient vector (a_1, ..., a_{(d-3)/2}) over F_d, a_1 varying
    fastest; vectorised with numpy, practical for d <= 13.
``backtrack``
    assigns the values u_y = theta_hat(y) on the nonzero squares y = i^2 one
    at a time, pruning as soon as the two values i + u_y and -i + u_y clash
    with earlier ones; the last value is fixed by the degree condition.
    Compiled with numba; d = 23 (about 1.5 million maps) takes tens of seconds.

Maps are stored as an integer array of coefficient rows; ThetaMap objects
are built on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from sympy import isprime, perfect_power

from .criteria import (
    C_SET_FAMILIES,
    SQUARES_11,
    ThetaMap,
    _lagrange_basis,
    c_set_d11,
    chi_decide,
    interpolate_theta,
    psi_table,
)
from .family import ORACLE_LIMIT, FamilyParams, derive, family_is_permutation
from .field import Field

# d = 29 and 31 are out of reach: the search tree grows roughly a
# hundredfold per step in d, and d = 23 already has 1,515,283 maps.
MAX_ATLAS_D = 23
ODOMETER_MAX_D = 13


@dataclass(frozen=True)
class ThetaClass:
    representative: ThetaMap
    orbit: tuple[ThetaMap, ...]


def _lex_keys(coeffs: np.ndarray, d: int) -> np.ndarray:
    """Integer keys ordering rows lexicographically (a_1 most significant)."""
    keys = np.zeros(len(coeffs), dtype=np.int64)
    for j in range(coeffs.shape[1]):
        keys = keys * d + coeffs[:, j]
    return keys


class ThetaAtlas:
    """Valid maps for one d (odometer order) and their classes under the alpha-action."""

    def __init__(self, d: int, coeffs: np.ndarray):
        self.d = d
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.int64)
        keys = _lex_keys(self.coeffs, d)
        order = np.argsort(keys)
        sorted_keys = keys[order]
        rep_keys = keys.copy()
        for alpha in range(2, d):
            image = _lex_keys(orbit_action_rows(self.coeffs, alpha, d), d)
            pos = np.searchsorted(sorted_keys, image)
            pos[pos == len(keys)] = 0
            if len(keys) and not np.array_equal(sorted_keys[pos], image):
                raise AssertionError(f"alpha = {alpha} maps a valid theta_hat outside the atlas")
            np.minimum(rep_keys, image, out=rep_keys)
        self.class_keys, self.class_of = np.unique(rep_keys, return_inverse=True)
        self._sorted_keys = sorted_keys

    @property
    def count(self) -> int:
        return len(self.coeffs)

    @property
    def class_count(self) -> int:
        return len(self.class_keys)

    def _theta(self, row) -> ThetaMap:
        return ThetaMap(self.d, tuple(int(c) for c in row))

    @cached_property
    def valid(self) -> tuple[ThetaMap, ...]:
        return tuple(self._theta(row) for row in self.coeffs)

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.class_of, minlength=self.class_count)

    @cached_property
    def classes(self) -> tuple[ThetaClass, ...]:
        """Classes sorted by representative (the lexicographically least member)."""
        members = np.argsort(_lex_keys(self.coeffs, self.d), kind="stable")
        members = members[np.argsort(self.class_of[members], kind="stable")]
        bounds = np.cumsum(self.class_sizes)[:-1]
        out = []
        for rows in np.split(members, bounds):
            orbit = tuple(self._theta(self.coeffs[i]) for i in rows)
            out.append(ThetaClass(orbit[0], orbit))
        return tuple(out)

    def __contains__(self, theta: ThetaMap) -> bool:
        if theta.d != self.d:
            return False
        key = 0
        for c in theta.coeffs:
            key = key * self.d + c % self.d
        pos = np.searchsorted(self._sorted_keys, key)
        return bool(pos < len(self._sorted_keys) and self._sorted_keys[pos] == key)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "count": self.count,
            "class_count": self.class_count,
            "classes": [
                {"representative": list(c.representative.coeffs),
                 "orbit": [list(t.coeffs) for t in c.orbit]}
                for c in self.classes
            ],
        }


def is_valid_theta(theta: ThetaMap) -> bool:
    d = theta.d
    return len({(x + theta(x * x % d)) % d for x in range(d)}) == d


def orbit_action(theta: ThetaMap, alpha: int) -> ThetaMap:
    """theta(alpha^2 x) / alpha."""
    d = theta.d
    if alpha % d == 0:
        raise ValueError("alpha must be nonzero mod d")
    coeffs = tuple(c * pow(alpha, 2 * j - 1, d) % d for j, c in enumerate(theta.coeffs, start=1))
    image = ThetaMap(d, coeffs)
    if is_valid_theta(theta):
        assert is_valid_theta(image)
    return image


def orbit_action_rows(coeffs: np.ndarray, alpha: int, d: int) -> np.ndarray:
    """orbit_action applied to every coefficient row at once."""
    scale = np.array([pow(alpha, 2 * j - 1, d) for j in range(1, coeffs.shape[1] + 1)], dtype=np.int64)
    return coeffs * scale % d


def _check_d(d: int):
    if d < 3 or d % 2 == 0 or not isprime(d):
        raise ValueError(f"d = {d} is not an odd prime")
    if d > MAX_ATLAS_D:
        raise ValueError(f"d = {d} exceeds the supported bound {MAX_ATLAS_D}")


def pow_vec(x: np.ndarray, e: int, d: int) -> np.ndarray:
    out = np.ones_like(x)
    for _ in range(e):
        out = out * x % d
    return out


def _odometer(d: int) -> np.ndarray:
    free = (d - 3) // 2
    half = (d - 1) // 2
    x = np.arange(d, dtype=np.int64)
    idx = np.arange(d**free, dtype=np.int64)
    coeffs = np.stack([(idx // d**j) % d for j in range(free)], axis=1) if free else np.zeros((1, 0), np.int64)
    values = np.broadcast_to(x, (len(coeffs), d)).copy()
    for j in range(free):
        values += np.outer(coeffs[:, j], pow_vec(x, 2 * (j + 1), d))
    values %= d
    ok = (np.sort(values, axis=1) == x).all(axis=1)
    return np.hstack([coeffs[ok], np.zeros((int(ok.sum()), half - free), np.int64)])


@njit(cache=True)
def _backtrack_kernel(d, weights, w_last_inv, out):
    """Count value vectors (u_1..u_h) passing the search; store the first len(out)."""
    half = (d - 1) // 2
    cap = out.shape[0]
    used = np.zeros(half + 1, dtype=np.int64)
    acc = np.zeros(half + 1, dtype=np.int64)
    nxt = np.zeros(half, dtype=np.int64)
    vals = np.zeros(half, dtype=np.int64)
    used[0] = 1  # the value 0 is taken by x = 0
    pos = 0
    n = 0
    while pos >= 0:
        i = pos + 1
        if pos == half - 1:
            u = (-acc[pos] * w_last_inv) % d
            bit = (1 << ((u + i) % d)) | (1 << ((u - i) % d))
            if used[pos] & bit == 0:
                vals[pos] = u
                if n < cap:
                    out[n, :] = vals
                n += 1
            pos -= 1
            continue
        u = nxt[pos]
        if u >= d:
            pos -= 1
            continue
        nxt[pos] = u + 1
        bit = (1 << ((u + i) % d)) | (1 << ((u - i) % d))
        if used[pos] & bit == 0:
            vals[pos] = u
            used[pos + 1] = used[pos] | bit
            acc[pos + 1] = (acc[pos] + weights[pos] * u) % d
            pos += 1
            nxt[pos] = 0
    return n


def _backtrack(d: int) -> np.ndarray:
    half = (d - 1) // 2
    # value u_i sits at the square i^2; the coefficient of x^half must vanish
    nodes = tuple([0] + [i * i % d for i in range(1, half + 1)])
    basis = _lagrange_basis(nodes, d)
    weights = np.array([int(w) for w in basis[1:, half]], dtype=np.int64)
    w_last_inv = pow(int(weights[-1]), d - 2, d)
    out = np.zeros((1 << 12, half), dtype=np.int64)
    n = _backtrack_kernel(d, weights, w_last_inv, out)
    if n > len(out):
        out = np.zeros((n, half), dtype=np.int64)
        _backtrack_kernel(d, weights, w_last_inv, out)
    vals = np.hstack([np.zeros((n, 1), np.int64), out[:n]])
    coeffs = (vals @ basis.astype(np.int64)) % d
    return coeffs[:, 1:]


def _odometer_order(coeffs: np.ndarray, d: int) -> np.ndarray:
    return coeffs[np.argsort(_lex_keys(coeffs[:, ::-1], d), kind="stable")]


def enumerate_valid_theta(d: int, method: str = "auto") -> ThetaAtlas:
    _check_d(d)
    if method == "auto":
        method = "odometer" if d <= ODOMETER_MAX_D else "backtrack"
    if method == "odometer":
        coeffs = _odometer(d)
    elif method == "backtrack":
        coeffs = _odometer_order(_backtrack(d), d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ThetaAtlas(d, coeffs)


def atlas_c_set_sides(families=C_SET_FAMILIES):
    """(functions induced by nonzero valid theta_hat for d = 11, functions in C)."""
    atlas = enumerate_valid_theta(11)
    induced = {
        tuple(theta(i * i % 11) for i in SQUARES_11)
        for theta in atlas.valid if not theta.is_zero
    }
    listed = {fam.values for fam in c_set_d11(families)}
    return induced, listed


def atlas_matches_c_set(families=C_SET_FAMILIES) -> bool:
    induced, listed = atlas_c_set_sides(families)
    return induced == listed


@dataclass(frozen=True)
class Realization:
    """A permutation polynomial with k = 2, t = e = 1 producing theta_hat = theta / n_lin."""

    theta_hat: ThetaMap
    q: int
    r: int
    v: int
    omega: int
    oracle_confirmed: bool | None = None


def _candidate_orders(d: int, q_max: int):
    """Prime powers q = 1 (mod d) in (d, q_max], as (q, p, n)."""
    for q in range(d + 1, q_max + 1, d):
        if isprime(q):
            yield q, q, 1
            continue
        pp = perfect_power(q)
        if pp and isprime(pp[0]):
            yield q, int(pp[0]), int(pp[1])


def find_realizations(d: int, q_max: int = 10**4, confirm: bool = True,
                      extension_q_max: int | None = None) -> dict[ThetaMap, Realization]:
    """Search q = 1 mod d, q <= q_max, for witnesses of every valid theta_hat.

    Every generator omega^c of mu_d is considered, since the choice of
    omega is free.  Replacing omega by omega^c turns psi(i) into
    psi(ci)/c and hence theta into orbit_action(theta, c), so one psi table
    per field suffices.  With ``confirm`` each witness is re-checked by the
    brute-force oracle (only for q within the oracle bound; larger witnesses
    keep None).  Non-prime q above ``extension_q_max`` are skipped, which
    keeps very long searches cheap.
    """
    atlas = enumerate_valid_theta(d)
    targets = set(atlas.valid)
    found: dict[ThetaMap, Realization] = {}
    for q, p, deg in _candidate_orders(d, q_max):
        s = (q - 1) // d
        if p == 2 or pow(2, s % (p - 1), p) != 1:
            continue  # condition (3) fails for k = 2
        if deg > 1 and extension_q_max is not None and q > extension_q_max:
            continue
        field = Field(p, deg)
        reps = {}
        for r in range(1, q):
            if math.gcd(r, s) == 1:
                n = (2 * r + s) % d
                if n and n not in reps:
                    reps[n] = r
            if len(reps) == d - 1:
                break
        base = field.roots_of_unity(d)
        any_params = FamilyParams(field, next(iter(reps.values())), s, 2, 1)
        psi = psi_table(any_params, derive(any_params), base)
        theta, strict = interpolate_theta(psi)
        for n, r in reps.items():
            params = FamilyParams(field, r, s, 2, 1)
            if not chi_decide(params, derive(params), psi):
                continue
            assert strict
            theta_hat = theta.scaled(pow(n, d - 2, d))
            for c in range(1, d):
                image = orbit_action(theta_hat, c)
                if image in targets and image not in found:
                    found[image] = Realization(image, q, r, s, base.power(c))
        if len(found) == len(targets):
            break
    if confirm:
        for key, w in found.items():
            if w.q > ORACLE_LIMIT:
                continue
            ok = family_is_permutation(FamilyParams(Field.of_order(w.q), w.r, w.v, 2, 1))
            found[key] = Realization(w.theta_hat, w.q, w.r, w.v, w.omega, ok)
    return found
