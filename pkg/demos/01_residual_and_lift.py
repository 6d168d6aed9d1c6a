"""The residual f, the lift g and the frames that make them agree."""

import numpy as np

import rankeb as rk

# A 2x2 problem with rank bound 1 and no affine constraint.
inst = rk.Instance.dense(2, 2, 1, np.zeros((0, 4)), [])
X = np.diag([3.0, 4.0])

rep = rk.residual_f(inst, X)
print("singular values:", rep.singular_values)   # [4, 3]
print("f(X) =", rep.f_value)                     # 9 = smallest singular value squared

# g(X, V) depends on a unit vector V; the minimum over unit vectors is f(X).
for v in ([1.0, 0.0], [0.0, 1.0], [0.6, 0.8]):
    print("g(X, %s) = %.3f" % (v, rk.lift_g(inst, X, np.array(v)[:, None])))

fam = rk.argmin_frames(inst, X)
print("minimizing frame:", fam.base_frame.ravel(), "gap:", fam.boundary_gap)

# Ties at the rank boundary make the minimizer non-unique.
print("3I degenerate?", rk.argmin_frames(inst, 3 * np.eye(2)).degenerate)

# With an affine constraint the residual adds half the squared violation.
inst, wit = rk.generate_planted(6, 6, 2, "dense", 10, seed=42)
g = np.random.default_rng(0)
for scale in (1e-1, 1e-3, 1e-5):
    X = wit.X_star + scale * g.standard_normal((6, 6))
    r = rk.residual_f(inst, X)
    print(f"scale {scale:.0e}: tail {r.tail_sq_sum:.3e}  affine {r.affine_sq_norm:.3e}  f {r.f_value:.3e}")
