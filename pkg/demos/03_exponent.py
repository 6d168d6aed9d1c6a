"""How small the explicit exponent is."""

import rankeb as rk

print(f"{'m':>3} {'n':>3} {'r':>3} {'vars':>6} {'log10 tau':>12} {'tau':>12}")
for m, n, r in [(1, 1, 0), (2, 2, 1), (3, 3, 1), (6, 6, 2), (10, 10, 2), (30, 30, 3), (100, 100, 5)]:
    t = rk.tau(m, n, r)
    print(f"{m:>3} {n:>3} {r:>3} {rk.num_variables(m, n, r):>6} {t.log10:>12.4f} {t.linear:>12.4e}")

R = rk.r_value(6, 4)
print("R(6, 4) =", R.exact_digits)
# f(X)**tau for a residual of 1e-12 on a 6x6 problem
t = rk.tau(6, 6, 2)
print("(1e-12)**tau =", 10 ** (-12 * t.linear), "  1 - tau =", t.complement)
