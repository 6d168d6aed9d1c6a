"""Distance estimates by alternating projections."""

import numpy as np

import rankeb as rk

# Exact case: no affine constraint, the truncated SVD is the nearest point.
inst = rk.Instance.dense(2, 2, 1, np.zeros((0, 4)), [])
rep = rk.dist_estimate(inst, np.diag([3.0, 4.0]))
print("Eckart-Young distance:", rep.dist_estimate, rep.best_point.tolist())

# Planted instance: distances are certified upper bounds.
inst, wit = rk.generate_planted(6, 6, 2, "dense", 10, seed=42)
D = np.random.default_rng(1).standard_normal((6, 6))
D /= np.linalg.norm(D)
for t in (1e-1, 1e-3, 1e-5):
    X = wit.X_star + t * D
    rep = rk.dist_estimate(inst, X, witness=wit, restarts=20, seed=0)
    print(f"t={t:.0e}: dist {rep.dist_estimate:.4e}  certificate f {rep.feasibility_residual:.1e}  "
          f"iterations {rep.iterations_best}  converged {rep.converged}")

# Matrix completion: with every entry observed the set S is a single point.
inst, wit = rk.generate_planted(4, 3, 1, "mask", 1.0, seed=1)
X = wit.X_star + 0.5
print("full mask:", rk.dist_estimate(inst, X, restarts=3).dist_estimate, "vs", np.linalg.norm(X - wit.X_star))
