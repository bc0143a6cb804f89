"""Decide a few polynomials x^r h_k(x^v)^t and compare with brute force."""

from permfam import FamilyParams, Field, decide, family_is_permutation

cases = [
    (Field(7), 1, 2, 2, 3),
    (Field(5), 1, 2, 3, 1),
    (Field(197), 1, 28, 87, 1),
    (Field(3, 5), 1, 22, 2, 1),
]

for field, r, v, k, t in cases:
    params = FamilyParams(field, r, v, k, t)
    rep = decide(params)
    conds = " ".join(f"{cid}:{'y' if ok else 'n'}" for cid, ok in rep.conditions)
    print(f"q={field.q:<4} r={r} v={v:<3} k={k:<3} t={t}  {rep.path.value:<20} "
          f"{'permutes' if rep.verdict else 'no':<9} [{conds}]")
    assert rep.verdict == family_is_permutation(params)
