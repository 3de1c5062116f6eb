# Frequency cutoffs, their convergence, the auxiliary commutator and the variation-of-constants formula.

# %%
import numpy as np

from itolift import (
    LiftedField,
    ShearMap,
    auxiliary_commutator,
    builtin_symbol,
    compose_l,
    cutoff_convergence,
    duhamel_residual,
    ito_transform,
    make_grid,
)

base = make_grid(32, 1.0)
a = builtin_symbol("bessel", {"m": 1})
u = np.exp(-4 * np.sin(np.pi * base.nodes) ** 2) + 0j

# %%
lams = [1.0, 2.0, 4.0, 8.0, base.xi_max]
table = cutoff_convergence(a, base, lams, u, times=(0.01,))
for lam, row in table.items():
    print("lambda=%-5g |(L0-L0lam)u|=%.3e  |(P-Plam)u|=%.3e" % (lam, row.l0_l2, row.semigroup[0.01][0]))

# %%
small = make_grid(16, 1.0)
f = ShearMap.from_function(lambda x: 0.3 * np.sin(2 * np.pi * x), small, 8)
L = compose_l(a, small)
res = auxiliary_commutator(ito_transform(L, f), 1.0, f, L)
print("commutator %.2e  conjugation %.2e" % (res.comm_norm, res.conj_norm))

# %%
Y = f.fiber_grid.period
v = LiftedField.from_function(lambda x, y: (1 + np.cos(2 * np.pi * x)) * np.cos(2 * np.pi * y / Y), small, f.fiber_grid)
t = 8.0 / L.eigvalsh()[-1]
r = [duhamel_residual(a, f, v, t, small.xi_max / 2, n) for n in (8, 16, 32)]
print("trapezoid residuals", r, "ratios", r[0] / r[1], r[1] / r[2])
