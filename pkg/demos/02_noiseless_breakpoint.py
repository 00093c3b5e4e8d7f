"""The noiseless breakpoint: detection without noise in d1+1 samples.

With no noise, every sample lies in the clutter subspace (target absent) or
in the direct sum of clutter and target (target present).  Stack the
streamed samples next to the known target basis and watch two volumes:

  * sample-only volume  Vol([y_1 .. y_m])
  * stacked volume      Vol([y_1 .. y_m, Q_S])

Exactly at m = d1 + 1 one of them collapses, and which one collapses tells
you the hypothesis.

Run:  python demos/02_noiseless_breakpoint.py
"""

import numpy as np

from vcdetect import (
    ScenarioConfig,
    make_scenario,
    noiseless_breakpoint,
    sample_stream,
)

N, D1, D2 = 24, 5, 2

for present in (True, False):
    label = "target PRESENT" if present else "target ABSENT"
    print(f"--- {label}: n={N}, clutter dim d1={D1}, target dim d2={D2} ---")
    sc = make_scenario(ScenarioConfig(N, D1, D2, float("inf"), present, seed=11))
    samples = sample_stream(sc, np.random.default_rng(12), D1 + 2)
    m, decided_present = noiseless_breakpoint(sc.target_basis, samples)
    print(f"breakpoint at m = {m} (expected d1+1 = {D1 + 1})")
    print(f"classified as: {'target present' if decided_present else 'target absent'}")
    print()

print("Why it works:")
print("  absent:  samples span at most the d1-dim clutter, so the sample-only")
print("           volume itself hits zero at the (d1+1)-th sample.")
print("  present: samples wander through the (d1+d2)-dim joint span; the")
print("           sample volume survives, but stacking the d2 known target")
print("           directions overfills that span and the stacked volume")
print("           vanishes first.")
