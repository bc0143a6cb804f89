"""Which theta_hat maps occur for k=2, t=e=1, and how large q has to be."""

import sys

from permfam.atlas import enumerate_valid_theta, find_realizations

q_max = int(sys.argv[1]) if len(sys.argv) > 1 else 3 * 10**5

for d in (7, 11):
    total = enumerate_valid_theta(d).count
    small = find_realizations(d, 10**4, confirm=False)
    deep = find_realizations(d, q_max, confirm=False, extension_q_max=10**4)
    print(f"d={d}: {len(small)}/{total} with q <= 10^4, {len(deep)}/{total} with q <= {q_max}")
    if deep:
        w = max(deep.values(), key=lambda w: w.q)
        print(f"   largest witness q={w.q} r={w.r} v={w.v} for {w.theta_hat}")
