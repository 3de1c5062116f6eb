# Symbols, their quantization on a periodic grid, and the positive generator L = L0^* L0.

# %%
import numpy as np

from itolift import (
    assemble_l0,
    builtin_symbol,
    compose_l,
    ellipticity_constant,
    make_grid,
    symbol_estimate_report,
)

grid = make_grid(16, 1.0)
print(grid.nodes[:4], grid.frequencies)

# %%
# a(x, xi) = 2 pi i xi is d/dx; applied to sin it returns 2 pi cos
D = assemble_l0(builtin_symbol("derivative"), grid)
u = np.sin(2 * np.pi * grid.nodes)
print(np.max(np.abs(D.apply(u) - 2 * np.pi * np.cos(2 * np.pi * grid.nodes))))

# %%
# a variable-coefficient symbol of order 2
a = builtin_symbol("variable_bessel", {"m": 2, "beta0": 2, "beta1": 1})
L0 = assemble_l0(a, grid)
e3 = grid.mode(3)
print("mode relation:", np.max(np.abs(L0.apply(e3) - a(grid.nodes, 3.0) * e3)))

L = compose_l(a, grid)
ev = L.eigvalsh()
print("spectrum of L: min %.3e  max %.3e" % (ev[0], ev[-1]))

# %%
# empirical symbol-class constants and the ellipticity constant
rep = symbol_estimate_report(a, grid, 2, 2)
for key in sorted(rep.constants):
    print(key, "%.4g" % rep[key])
print("ellipticity:", ellipticity_constant(a, grid, 1.0))
