# The contraction semigroup exp(-tL): exact spectral route and truncated series.

# %%
import numpy as np

from itolift import builtin_symbol, compose_l, make_grid, semigroup_eig, semigroup_series

grid = make_grid(16, 1.0)
L = compose_l(builtin_symbol("bessel", {"m": 1}), grid)

# %%
for t in (0.01, 0.1, 1.0):
    P = semigroup_eig(L, t)
    print("t=%-5g |P_t|_2 = %.15f" % (t, np.linalg.norm(P.entries, 2)))

# semigroup law
s, t = 0.2, 0.3
gap = semigroup_eig(L, s).entries @ semigroup_eig(L, t).entries - semigroup_eig(L, s + t).entries
print("law defect:", np.linalg.norm(gap))

# %%
# scaling-and-squaring series; the returned bound covers the actual error
for K in (4, 8, 20):
    res = semigroup_series(L, 0.1, K)
    err = np.linalg.norm(res.operator.entries - semigroup_eig(L, 0.1).entries, 2)
    print("K=%2d squarings=%d error=%.2e bound=%.2e" % (K, res.squarings, err, res.bound))
