"""Valid theta_hat maps and their classes for small odd primes d."""

import time

from permfam.atlas import atlas_matches_c_set, enumerate_valid_theta

for d in (3, 5, 7, 11, 13, 17):
    start = time.perf_counter()
    atlas = enumerate_valid_theta(d)
    print(f"d={d:<2} {atlas.count:>5} maps {atlas.class_count:>4} classes "
          f"({time.perf_counter() - start:.2f}s)")

for cls in enumerate_valid_theta(11).classes:
    print("  ", cls.representative, f"(orbit {len(cls.orbit)})")

print("d=11 maps match the C families:", atlas_matches_c_set())
