"""Stability of the minimizing frames and the regularity condition far out."""

import numpy as np

import rankeb as rk

inst = rk.Instance.dense(6, 6, 3, np.zeros((0, 36)), [])
X_bar = np.diag([3.0, 4.0, 1.0, 2.0, 5.0, 6.0])
rep = rk.probe_stability(inst, X_bar, samples=4, seed=0)
for s, h in zip(rep.scales, rep.h):
    print(f"  scale {s:.1e}  frame distance {h:.3e}")
print("Hoelder exponent estimate:", round(rep.alpha, 4))

print("degenerate base point:", rk.probe_stability(inst, np.eye(6), seed=0).mode)

free = rk.Instance.dense(5, 5, 2, np.zeros((0, 25)), [])
print("no affine constraint:", rk.probe_regularity(free, [10, 100, 1000], seed=0).verdict)
full, _ = rk.generate_planted(5, 4, 2, "mask", 1.0, seed=0)
rep = rk.probe_regularity(full, [10, 100, 1000], seed=0)
print("fully observed:", rep.verdict, "min slopes", np.round(rep.min_slope, 2))
