"""Empirical error-bound and slope exponents along random rays.

Writes one CSV per seed to ./sweeps and prints the fits and verdicts.
"""

import pathlib

import numpy as np

import rankeb as rk

out = pathlib.Path("sweeps")
out.mkdir(exist_ok=True)
tau = rk.tau(6, 6, 2)
print("theoretical exponent: log10 tau =", round(tau.log10, 2))

tables = []
for seed in range(5):
    inst, wit = rk.generate_planted(6, 6, 2, "dense", 10, seed=seed)
    tab = rk.sweep_local(inst, wit, points=30, seed=seed, n_jobs=-1)
    (out / f"sweep_seed{seed}.csv").write_text(tab.to_csv())
    eb = rk.fit_loglog(tab, "f", "dist", tau=tau)
    kl = rk.fit_loglog(tab, "f", "m_f", tau=tau)
    print(f"seed {seed}: dist ~ f^{eb.slope:.4f} (r2 {eb.r_squared:.6f})   m_f ~ f^{kl.slope:.4f}")
    tables.append(tab)

rep = rk.check_bounds(tables[0], tau)
print("verdicts:", rep.verdicts)
print(f"c*_EB = {rep.c_eb:.3f}  c*_KL = {rep.c_kl:.3f}  global constant = {rep.global_constant:.3e}")
print("median dist exponent over seeds:",
      np.median([rk.fit_loglog(t, "f", "dist").slope for t in tables]))
