"""Distributed ingestion: sensors sketch their own slices, a center merges.

The sketch is linear, so states built from disjoint parts of a stream add
up to the state of the whole stream.  Here four "sensors" each see a
random quarter of the updates; their merged sketch matches the single-pass
sketch to floating-point reassociation and yields the same spectrum.
"""

import numpy as np

from sksvd import (MatrixUpdate, SketchConfig, apply_update, merge, new_sketch,
                   sketched_svd, snapshot)

rng = np.random.default_rng(11)
config = SketchConfig(seed=99, m=64, N=1000, n=16, eps=0.5, delta=0.05)

updates = [MatrixUpdate(int(rng.integers(1000)), int(rng.integers(16)),
                        float(rng.standard_normal()))
           for _ in range(5000)]

# single central pass
central = new_sketch(config)
for u in updates:
    apply_update(central, u)

# four sensors, each handling a random share
owner = rng.integers(0, 4, size=len(updates))
sensors = [new_sketch(config) for _ in range(4)]
for u, s in zip(updates, owner):
    apply_update(sensors[s], u)

for i, s in enumerate(sensors):
    print(f"sensor {i}: {s.updates_applied} updates")

combined = sensors[0]
for s in sensors[1:]:
    combined = merge(combined, s)

gap = np.linalg.norm(snapshot(combined) - snapshot(central)) / np.linalg.norm(snapshot(central))
print(f"\nmerged vs single-pass relative Frobenius gap: {gap:.2e}")

est_central = sketched_svd(snapshot(central))
est_merged = sketched_svd(snapshot(combined))
print("central spectrum:", np.array2string(est_central.singular_values[:5], precision=5))
print("merged  spectrum:", np.array2string(est_merged.singular_values[:5], precision=5))
