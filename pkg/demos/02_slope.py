"""Slope lower bounds and the gradient inequality for minimizing frames."""

import numpy as np

import rankeb as rk

inst = rk.Instance.dense(2, 2, 1, np.zeros((0, 4)), [])
X = np.diag([3.0, 4.0])
rep = rk.slope_mf(inst, X)
print("slope at diag(3,4):", rep.slope_lb, "method:", rep.method)   # 6 = 2 sqrt(9)

# ||grad_V g|| <= 2 f(X) for V in E(X); equality at this point.
V = rep.attaining_frame
print("||grad_V g|| =", np.linalg.norm(rk.grad_g_V(inst, X, V)), " 2 f =", 2 * rk.residual_f(inst, X).f_value)
print("multiplier Y =", rk.multiplier_Y(X, V))

# At a tie the frame is searched inside the tied subspace.
inst = rk.Instance.mask(2, 2, 1, [(0, 0)], [1.0])
rep = rk.slope_mf(inst, 2 * np.eye(2), degen_samples=64, seed=1)
print("degenerate point: slope", round(rep.slope_lb, 6), "with", rep.samples_used, "samples")
print("frame:", rep.attaining_frame.ravel().round(6))

# Without affine constraint the slope is exactly 2 sqrt(f) away from ties.
inst = rk.Instance.dense(8, 5, 2, np.zeros((0, 40)), [])
X = np.random.default_rng(3).standard_normal((8, 5))
print("slope / (2 sqrt f) =", rk.slope_mf(inst, X).slope_lb / (2 * np.sqrt(rk.residual_f(inst, X).f_value)))
