# Evolving the trace on the base equals tracing the lifted evolution.

# %%
import numpy as np

from itolift import ItoCheck, LiftedField, SemigroupSpec, ShearMap, TrigPolynomial, builtin_symbol, ito_residual, make_grid

base = make_grid(32, 1.0)
rng = np.random.default_rng(0)
f = ShearMap.from_function(TrigPolynomial.random(rng, 2, 1.0, 0.3), base, 16)
v = LiftedField.separable(
    TrigPolynomial.random(rng, 2, 1.0), TrigPolynomial.random(rng, 2, f.fiber_grid.period), base, f.fiber_grid
)

# %%
for name, params in [("bessel", {"m": 1}), ("variable_bessel", {"m": 2, "beta0": 2, "beta1": 1})]:
    check = ItoCheck(builtin_symbol(name, params), f, v)
    for t in (0.0, 0.01, 0.1, 1.0):
        rmax, rl2 = check.residual(t)
        print("%-16s t=%-5g max %.2e  l2 %.2e" % (name, t, rmax, rl2))

# %%
# the same identity through the truncated series
a = builtin_symbol("bessel", {"m": 1})
print(ito_residual(a, f, v, 0.1, SemigroupSpec(0.1, "series", 20, base.xi_max)))
