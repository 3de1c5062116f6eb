# Shears of the product grid and the transform L_hat = S_{-f} (L x I) S_{+f}.

# %%
import numpy as np

from itolift import (
    LiftedField,
    ShearMap,
    builtin_symbol,
    compose_l,
    graph_trace,
    ito_transform,
    make_grid,
    shear_apply,
    shear_matrix,
)

base = make_grid(16, 1.0)
f = ShearMap.from_function(lambda x: 0.3 * np.sin(2 * np.pi * x), base, 8)
fiber = f.fiber_grid
print("fiber period", fiber.period)

# %%
v = LiftedField.from_function(lambda x, y: np.cos(2 * np.pi * x) * np.exp(np.sin(2 * np.pi * y / fiber.period)), base, fiber)
w = shear_apply(v, f, +1)
print("norm kept:", v.norm(), w.norm())
print("inverse:", np.max(np.abs(shear_apply(w, f, -1).values - v.values)))

S = shear_matrix(f, base).entries
print("unitarity defect:", np.linalg.norm(S.conj().T @ S - np.eye(S.shape[0])))

# %%
# the trace of v on the graph y = f(x)
print(graph_trace(v, f).values[:4])

# %%
L = compose_l(builtin_symbol("bessel", {"m": 1}), base)
L_hat = ito_transform(L, f)
ev, ev_hat = L.eigvalsh(), L_hat.eigvalsh()
print("spectrum repeated M times:", np.max(np.abs(ev_hat - np.repeat(ev, fiber.n_points))) / ev[-1])
