"""
When do two badges see each other?
==================================

Badges register a contact only within a limited distance and when both
face each other closely enough. Deterministic thresholds are the default;
passing a generator draws the thresholds per call instead.
"""

import numpy as np

from sociobadge.simgen import GeometryParams, detect_edge, reader_detects

for distance, a, b in [(1.0, 0, 0), (2.0, 0, 0), (1.0, 40, 0), (1.5, 30, 30)]:
    print(f"{distance} m, angles {a}/{b} deg -> {detect_edge(distance, a, b)}")

# %%
# With random thresholds the detection rate falls off smoothly around the
# nominal range instead of dropping from 1 to 0.
rng = np.random.default_rng(0)
for distance in np.arange(0.8, 2.61, 0.3):
    rate = np.mean([detect_edge(distance, 0, 0, rng=rng) for _ in range(2000)])
    print(f"{distance:.1f} m: detected {rate:5.1%}")

# %%
# A person between badge and reader shortens the reader's range.
for distance in (20, 30, 45):
    print(f"reader at {distance} m: clear {reader_detects(distance)}, "
          f"through a person {reader_detects(distance, occluded=True)}")

# Wider-angle antennas are a parameter change.
wide = GeometryParams(half_angle_deg=60, half_angle_sd_deg=10)
print(detect_edge(1.0, 40, 0), detect_edge(1.0, 40, 0, wide))
