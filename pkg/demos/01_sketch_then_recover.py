"""Sketch a tall data matrix from a turnstile stream, then recover its spectrum.

The data matrix is never materialized on the ingestion side: every update
(row, col, delta) touches one regenerated operator column.  At the end we
replay the same stream into a dense oracle and compare the recovered
singular values and right singular vectors.
"""

import numpy as np

from sksvd import (MatrixUpdate, SketchConfig, align_signs, apply_update,
                   exact_svd, materialize_X, new_sketch, required_measurements,
                   sketched_svd, snapshot)

rng = np.random.default_rng(7)

# A rank-3 ground truth, observed entry by entry in random order.
N, n = 400, 24
sigmas = np.array([10.0, 4.0, 1.5])
U, _ = np.linalg.qr(rng.standard_normal((N, 3)))
V, _ = np.linalg.qr(rng.standard_normal((n, 3)))
X = (U * sigmas) @ V.T

eps, delta, k = 0.5, 0.05, 3
m = required_measurements(k, eps, delta)
print(f"target distortion eps={eps}, failure probability delta={delta}")
print(f"sketch rows m = {m}  (vs N = {N} ambient rows)")

config = SketchConfig(seed=42, m=m, N=N, n=n, eps=eps, delta=delta, k_hint=k)
state = new_sketch(config)

updates = [MatrixUpdate(i, j, float(X[i, j])) for i in range(N) for j in range(n)]
rng.shuffle(updates)
for u in updates:
    apply_update(state, u)
print(f"applied {state.updates_applied} turnstile updates")

estimate = sketched_svd(snapshot(state))
oracle = exact_svd(materialize_X(updates, N, n))

print(f"\ndetected rank: {estimate.rank} (true rank {oracle.k})")
print("singular values  true -> estimated (ratio):")
for j in range(oracle.k):
    s_true, s_est = oracle.sigma[j], estimate.singular_values[j]
    print(f"  {s_true:8.4f} -> {s_est:8.4f}   ({s_est / s_true:.4f})")

aligned = align_signs(oracle.V, estimate.right_vectors[:, :oracle.k])
errs = np.linalg.norm(oracle.V - aligned, axis=0)
print("right singular vector errors:", np.array2string(errs, precision=4))
print(f"\nall ratios within [{np.sqrt(1 - eps):.4f}, {np.sqrt(1 + eps):.4f}]:",
      bool(np.all((estimate.singular_values[:3] / oracle.sigma >= np.sqrt(1 - eps))
                  & (estimate.singular_values[:3] / oracle.sigma <= np.sqrt(1 + eps)))))
