"""Compiled grid engine: the decision pipeline and the brute-force oracle in log coordinates.

Everything here works with discrete logarithms to the primitive root g of
F_q (m = q - 1).  A nonzero field element g^a is stored as a in [0, m), and
the only additive information needed is the table ``one_minus[b] =
log(1 - g^b)``.  In these coordinates

  * the oracle evaluates f(g^a) = g^(r a + t log h_k(g^(a v))) for every a and
    looks for a repeated value (or a zero, which collides with f(0) = 0);
  * the criteria are the same as in :mod:`permfam.criteria`, restated for
    log-coordinate inputs.

The two routes share nothing but the field tables.  Per-(v, k, t) data
that does not depend on r is prepared once and reused across the r-loop.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .criteria import c_set_d11
from .field import Field

PATH_EASY_D1, PATH_EASY_D2, PATH_CLOSED, PATH_CHI, PATH_GENERAL = range(5)
PATH_NAMES = ("EASY_D1", "EASY_D2", "PRIME_D_CLOSED_FORM", "PRIME_D_CHI", "GENERAL_PROP")

# indices into the statistics vector returned by grid_stats
STAT_NAMES = (
    "tuples",
    "oracle_true",
    "verdict_true",
    "mismatches",
    "path_easy_d1",
    "path_easy_d2",
    "path_closed_form",
    "path_chi",
    "path_general",
    "cond3_violations",         # oracle-true tuples failing condition (3)
    "closed_form_checked",      # d in {3,5,7,11} with (1)-(3) holding
    "closed_chi_prop_disagree",  # closed form, chi and (4)&(5) not all equal
    "star_implies_fail",        # (*) and (1)-(3) hold but oracle says no
    "d3_checked",
    "d3_counterexamples",       # d = 3, (1)-(3), oracle false
    "d5_checked",
    "d5_counterexamples",       # d = 5, (1)-(3), oracle != (*)
)
N_STATS = len(STAT_NAMES)
MAX_MISMATCH_RECORDS = 16


@njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _powmod(b, e, mod):
    result = 1 % mod
    b %= mod
    while e > 0:
        if e & 1:
            result = result * b % mod
        b = b * b % mod
        e >>= 1
    return result


@njit(cache=True)
def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# _prepare fills an int64 vector ``info``:
#   [0] s  [1] d  [2] e  [3] st  [4] k mod p  [5] k^st mod p  [6] gcd(d, k)
#   [7] h_k(x^v) vanishes at some x != 0  [8] d is an odd prime  [9] (*) holds
#   [10] vt(k-1) mod d


@njit(cache=True)
def _prepare(m, p, log, one_minus, v, k, t, info, hlog, oracle_c, psi, gam, need_oracle):
    s = _gcd(v, m)
    d = m // s
    e = v // s
    st = s * t
    kp = k % p
    info[0] = s
    info[1] = d
    info[2] = e
    info[3] = st
    info[4] = kp
    info[5] = 0 if kp == 0 else _powmod(kp, st % (p - 1), p)
    info[6] = _gcd(d, k)
    info[10] = (v % d) * (t % d) % d * ((k - 1) % d) % d

    if need_oracle:
        # log h_k(y) for y = g^(s j) = (g^s)^j, j in [0, d); -1 marks h = 0
        zero = False
        for j in range(d):
            b = s * j
            if b == 0:
                if kp == 0:
                    hlog[j] = -1
                    zero = True
                else:
                    hlog[j] = log[kp]
            else:
                bk = b * (k % m) % m
                if bk == 0:
                    hlog[j] = -1
                    zero = True
                else:
                    hlog[j] = (one_minus[bk] - one_minus[b]) % m
        info[7] = 1 if zero else 0
        if not zero:
            for a in range(m):
                oracle_c[a] = t * hlog[a * e % d] % m

    prime = d >= 3 and d % 2 == 1 and _is_prime(d)
    info[8] = 1 if prime else 0
    info[9] = 0
    if d < 3 or info[6] != 1:
        return
    if prime:
        # omega^psi(i) = ratio^(st) with omega = g^s, so psi(i) = t * log_g(ratio) mod d
        half = (d - 1) // 2
        for i in range(1, half + 1):
            a = i * (k % d) % d * e % d
            b = i * e % d
            two_a = 2 * a % d
            two_b = 2 * b % d
            ratio = s * ((b - a) % d) + one_minus[s * two_a] - one_minus[s * two_b]
            psi[i] = t * (ratio % m) % m % d
        psi[0] = 0
        star = True
        for j in range(1, d):
            a = j * (k % d) % d
            ratio = s * ((j - a) % d) + one_minus[s * (2 * a % d)] - one_minus[s * (2 * j % d)]
            if (st * (ratio % m)) % m != 0:
                star = False
                break
        info[9] = 1 if star else 0
    # g on mu_d minus 1: log g(g^(s j)) = r s j + gam[j]
    for j in range(1, d):
        b = s * (j * e % d)
        bk = s * (j * e % d * (k % d) % d)
        gam[j] = st * ((one_minus[bk] - one_minus[b]) % m) % m


@njit(cache=True)
def _oracle(m, r, oracle_c, stamp, gen):
    for a in range(m):
        val = (r * a + oracle_c[a]) % m
        if stamp[val] == gen:
            return False
        stamp[val] = gen
    return True


@njit(cache=True)
def _psi_at(psi, i, d):
    i %= d
    if 2 * i > d:
        i = d - i
    return psi[i]


@njit(cache=True)
def _chi(d, n, psi, stamp, gen):
    for i in range(d):
        val = (i * n + _psi_at(psi, i, d)) % d
        if stamp[val] == gen:
            return False
        stamp[val] = gen
    return True


@njit(cache=True)
def _prop45(m, p, r, info, gam, stamp, gen):
    s = info[0]
    d = info[1]
    sign_log = 0
    if (d + 1) * (r + 1) % 2 == 1 and p != 2:
        sign_log = m // 2
    for j in range(1, d):
        val = (r * s * j + gam[j]) % m
        if val == sign_log or stamp[val] == gen:
            return False
        stamp[val] = gen
    return True


@njit(cache=True)
def _closed_form(d, n, info, psi, cset):
    if d == 3:
        return True
    star = info[9] == 1
    if d == 5:
        return star
    if star:
        return True
    if d == 7:
        for eps in (1, -1):
            ok = True
            for i in (1, 2, 4):
                if _psi_at(psi, i, 7) != (2 * eps * n * i) % 7:
                    ok = False
                    break
            if ok:
                return True
        return False
    squares = (1, 3, 4, 5, 9)
    for row in range(cset.shape[0]):
        ok = True
        for c in range(5):
            if _psi_at(psi, squares[c], 11) != n * cset[row, c] % 11:
                ok = False
                break
        if ok:
            return True
    return False


@njit(cache=True)
def _decide(m, p, r, info, psi, gam, cset, stamp, gen, out):
    """(verdict, path code) for one r; out[0] receives conditions (1)-(3) as 0/1, or -1 when d <= 2."""
    s = info[0]
    d = info[1]
    kp = info[4]
    kpow = info[5]
    out[0] = -1
    out[1] = -1
    out[2] = -1
    if d == 1:
        return kp != 0 and _gcd(r, s) == 1, PATH_EASY_D1
    if d == 2:
        # gcd(k, 2p) = 1 iff gcd(2, k) = 1 and p does not divide k
        sign = 1 if (r + 1) % 2 == 0 else p - 1
        ok = info[6] == 1 and kp != 0 and _gcd(r, s) == 1 and kpow == sign % p
        return ok, PATH_EASY_D2
    c1 = _gcd(r, s) == 1 and info[6] == 1
    n = (2 * r + info[10]) % d
    c2 = _gcd(d, n) <= 2
    sign = 1 if (d + 1) * (r + 1) % 2 == 0 else p - 1
    c3 = kpow == sign % p
    c123 = c1 and c2 and c3
    out[0] = 1 if c123 else 0
    if not c123:
        return False, PATH_GENERAL
    if info[8] == 1:
        if d == 3 or d == 5 or d == 7 or d == 11:
            return _closed_form(d, n, info, psi, cset), PATH_CLOSED
        return _chi(d, n, psi, stamp, gen), PATH_CHI
    return _prop45(m, p, r, info, gam, stamp, gen), PATH_GENERAL


@njit(cache=True)
def _grid_stats(m, p, log, one_minus, vs, k_lo, k_hi, t_lo, t_hi, r_lo, r_hi, cset,
                stats, mismatches):
    info = np.zeros(11, dtype=np.int64)
    hlog = np.zeros(m + 1, dtype=np.int64)
    oracle_c = np.zeros(m, dtype=np.int64)
    psi = np.zeros(m + 1, dtype=np.int64)
    gam = np.zeros(m + 1, dtype=np.int64)
    stamp = np.zeros(m + 1, dtype=np.int64)
    flags = np.zeros(3, dtype=np.int64)
    gen = 0
    n_mis = 0
    for v in vs:
        for k in range(k_lo, k_hi + 1):
            for t in range(t_lo, t_hi + 1):
                _prepare(m, p, log, one_minus, v, k, t, info, hlog, oracle_c, psi, gam, True)
                d = info[1]
                for r in range(r_lo, r_hi + 1):
                    if info[7] == 1:
                        orc = False
                    else:
                        gen += 1
                        orc = _oracle(m, r, oracle_c, stamp, gen)
                    gen += 1
                    verdict, path = _decide(m, p, r, info, psi, gam, cset, stamp, gen, flags)
                    stats[0] += 1
                    if orc:
                        stats[1] += 1
                    if verdict:
                        stats[2] += 1
                    stats[4 + path] += 1
                    if verdict != orc:
                        stats[3] += 1
                        if n_mis < mismatches.shape[0]:
                            mismatches[n_mis, 0] = r
                            mismatches[n_mis, 1] = v
                            mismatches[n_mis, 2] = k
                            mismatches[n_mis, 3] = t
                            n_mis += 1
                    if orc:
                        sign = 1 if (d + 1) * (r + 1) % 2 == 0 else p - 1
                        if info[5] != sign % p:
                            stats[9] += 1
                    if flags[0] == 1 and info[8] == 1:
                        n = (2 * r + info[10]) % d
                        if info[9] == 1 and not orc:
                            stats[12] += 1
                        if d == 3 or d == 5 or d == 7 or d == 11:
                            stats[10] += 1
                            closed = _closed_form(d, n, info, psi, cset)
                            gen += 1
                            chi = _chi(d, n, psi, stamp, gen)
                            gen += 1
                            p45 = _prop45(m, p, r, info, gam, stamp, gen)
                            if closed != chi or chi != p45:
                                stats[11] += 1
                            if d == 3:
                                stats[13] += 1
                                if not orc:
                                    stats[14] += 1
                            if d == 5:
                                stats[15] += 1
                                if orc != (info[9] == 1):
                                    stats[16] += 1
    return n_mis


@njit(cache=True)
def _grid_verdicts(m, p, log, one_minus, vs, ks, ts, rs, cset, with_oracle,
                   verdict_out, path_out, oracle_out):
    info = np.zeros(11, dtype=np.int64)
    hlog = np.zeros(m + 1, dtype=np.int64)
    oracle_c = np.zeros(m, dtype=np.int64)
    psi = np.zeros(m + 1, dtype=np.int64)
    gam = np.zeros(m + 1, dtype=np.int64)
    stamp = np.zeros(m + 1, dtype=np.int64)
    flags = np.zeros(3, dtype=np.int64)
    gen = 0
    for iv in range(vs.shape[0]):
        for ik in range(ks.shape[0]):
            for it in range(ts.shape[0]):
                _prepare(m, p, log, one_minus, vs[iv], ks[ik], ts[it], info, hlog,
                         oracle_c, psi, gam, with_oracle)
                for ir in range(rs.shape[0]):
                    r = rs[ir]
                    gen += 1
                    verdict, path = _decide(m, p, r, info, psi, gam, cset, stamp, gen, flags)
                    verdict_out[ir, iv, ik, it] = 1 if verdict else 0
                    path_out[ir, iv, ik, it] = path
                    if with_oracle:
                        if info[7] == 1:
                            oracle_out[ir, iv, ik, it] = 0
                        else:
                            gen += 1
                            oracle_out[ir, iv, ik, it] = 1 if _oracle(m, r, oracle_c, stamp, gen) else 0


@njit(cache=True)
def _psi_tables(m, p, log, one_minus, vs, k_lo, k_hi, t_lo, t_hi, d_target, out):
    info = np.zeros(11, dtype=np.int64)
    hlog = np.zeros(1, dtype=np.int64)
    oracle_c = np.zeros(1, dtype=np.int64)
    psi = np.zeros(m + 1, dtype=np.int64)
    gam = np.zeros(m + 1, dtype=np.int64)
    half = (d_target - 1) // 2
    row = 0
    for v in vs:
        for k in range(k_lo, k_hi + 1):
            for t in range(t_lo, t_hi + 1):
                _prepare(m, p, log, one_minus, v, k, t, info, hlog, oracle_c, psi, gam, False)
                if info[1] != d_target or info[6] != 1:
                    continue
                for i in range(half):
                    out[row, i] = psi[i + 1]
                row += 1
    return row


def _cset_array(families=None) -> np.ndarray:
    fams = c_set_d11() if families is None else c_set_d11(families)
    return np.array([f.values for f in fams], dtype=np.int64).reshape(-1, 5)


def _tables(field: Field):
    exp, log, one_minus = field.log_tables()
    return field.q - 1, field.p, log, one_minus


def grid_stats(field: Field, vs=None, k_range=None, t_range=(1, 3), r_range=None,
               families=None) -> tuple[dict[str, int], list[tuple[int, int, int, int]]]:
    """Run decision pipeline and oracle over a grid; returns counters and mismatches.

    Defaults are the full grid r in [1, q-1], v in [1, q-1], k in [1, q].
    """
    m, p, log, one_minus = _tables(field)
    vs = np.arange(1, m + 1, dtype=np.int64) if vs is None else np.asarray(vs, dtype=np.int64)
    k_lo, k_hi = k_range or (1, field.q)
    r_lo, r_hi = r_range or (1, m)
    stats = np.zeros(N_STATS, dtype=np.int64)
    mism = np.zeros((MAX_MISMATCH_RECORDS, 4), dtype=np.int64)
    n_mis = _grid_stats(m, p, log, one_minus, vs, k_lo, k_hi, t_range[0], t_range[1],
                        r_lo, r_hi, _cset_array(families), stats, mism)
    return dict(zip(STAT_NAMES, map(int, stats))), [tuple(map(int, row)) for row in mism[:n_mis]]


def grid_verdicts(field: Field, vs, ks, ts, rs, with_oracle=False, families=None):
    """Verdict, path and (optionally) oracle arrays indexed [r, v, k, t]."""
    m, p, log, one_minus = _tables(field)
    vs, ks, ts, rs = (np.asarray(x, dtype=np.int64) for x in (vs, ks, ts, rs))
    shape = (len(rs), len(vs), len(ks), len(ts))
    verdict = np.zeros(shape, dtype=np.int8)
    path = np.zeros(shape, dtype=np.int8)
    oracle = np.full(shape, -1, dtype=np.int8)
    if all(shape):
        _grid_verdicts(m, p, log, one_minus, vs, ks, ts, rs, _cset_array(families),
                       with_oracle, verdict, path, oracle)
    return verdict, path, oracle


def grid_psi_tables(field: Field, d: int, t_range=(1, 3)) -> np.ndarray:
    """Distinct psi tables (rows psi(1..(d-1)/2)) over v in [1,q-1], k in [1,q], t in t_range, for this d."""
    m, p, log, one_minus = _tables(field)
    if m % d:
        return np.zeros((0, (d - 1) // 2), dtype=np.int64)
    s = m // d
    vs = np.array([v for v in range(1, m + 1) if np.gcd(v, m) == s], dtype=np.int64)
    rows = len(vs) * field.q * (t_range[1] - t_range[0] + 1)
    out = np.zeros((rows, (d - 1) // 2), dtype=np.int64)
    n = _psi_tables(m, p, log, one_minus, vs, 1, field.q, t_range[0], t_range[1], d, out)
    return np.unique(out[:n], axis=0)
