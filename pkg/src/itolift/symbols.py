"""
Symbols a(x, xi), the smooth frequency cutoff, and empirical checks of
the symbol-class and ellipticity bounds.

Symbols are evaluated at physical frequency ``xi`` (cycles per unit
length), so a derivative carries the factor ``2 pi i xi``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigurationError, NumericError
from .grid import PeriodicGrid
from .trig import TrigPolynomial


@dataclass(frozen=True, eq=False)
class Symbol:
    """An order-``m`` symbol with a vectorised evaluator ``eval(x, xi)``."""

    order: float
    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __call__(self, x, xi):
        x, xi = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
        return np.asarray(self.eval(x, xi), dtype=complex) * np.ones(x.shape)

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        """Values ``a(x_j, k/P)`` as an ``N x N`` array (rows: nodes, columns: frequencies)."""
        vals = self(grid.nodes[:, None], grid.physical_frequencies[None, :])
        bad = ~np.isfinite(vals)
        if bad.any():
            j, k = np.argwhere(bad)[0]
            raise NumericError(
                f"symbol {self.name!r} is not finite at x={grid.nodes[j]!r}, xi={grid.physical_frequencies[k]!r}"
            )
        return vals


def _bracket(xi, power):
    return (1.0 + (2 * np.pi * xi) ** 2) ** (power / 2.0)


_HARMONIC_KEY = re.compile(r"^(c0|[ab][1-9][0-9]*)$")


def _harmonic_coeffs(params: Mapping[str, float]) -> tuple:
    """Flatten ``c0, a1, b1, a2, ...`` keys into a coefficient tuple."""
    for key in params:
        if key != "period" and not _HARMONIC_KEY.match(key):
            raise ConfigurationError(f"unknown vector_field parameter {key!r}")
    degree = max([int(k[1:]) for k in params if k[0] in "ab" and k != "period"] or [0])
    coeffs = [params.get("c0", 0.0)]
    for h in range(1, degree + 1):
        coeffs += [params.get(f"a{h}", 0.0), params.get(f"b{h}", 0.0)]
    return tuple(coeffs)


def _require(params, name, keys, optional=()):
    unknown = set(params) - set(keys) - set(optional)
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) for {name!r}: {sorted(unknown)}")
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigurationError(f"symbol {name!r} requires parameter(s) {missing}")
    for k, v in params.items():
        if not np.isfinite(v):
            raise ConfigurationError(f"parameter {k}={v!r} of {name!r} is not finite")


def builtin_symbol(name: str, params: Mapping[str, float] | None = None) -> Symbol:
    """
    Construct one of the built-in symbol families.

    ``const``            a = c                                  (order 0)
    ``derivative``       a = 2 pi i xi                          (order 1)
    ``bessel``           a = (1 + (2 pi xi)^2)^{m/2}            (order m)
    ``variable_bessel``  a = b(x) (1 + (2 pi xi)^2)^{m/2},
                         b(x) = beta0 + beta1 sin(2 pi x / P), beta0 > |beta1|
    ``vector_field``     a = c(x) 2 pi i xi, c given by ``c0, a1, b1, ...``

    ``period`` (default 1) is accepted wherever the symbol depends on x.
    """
    params = dict(params or {})
    if name == "const":
        _require(params, name, ["c"])
        c = params["c"]
        return Symbol(0.0, lambda x, xi: np.full(np.shape(x), c, dtype=complex), name, params)
    if name == "derivative":
        _require(params, name, [], optional=["m"])
        if params.get("m", 1.0) != 1.0:
            raise ConfigurationError("the derivative symbol has order 1")
        return Symbol(1.0, lambda x, xi: 2j * np.pi * xi, name, params)
    if name == "bessel":
        _require(params, name, ["m"])
        m = params["m"]
        return Symbol(m, lambda x, xi: _bracket(xi, m), name, params)
    if name == "variable_bessel":
        _require(params, name, ["m", "beta0", "beta1"], optional=["period"])
        m, b0, b1 = params["m"], params["beta0"], params["beta1"]
        period = params.get("period", 1.0)
        if not b0 > abs(b1):
            raise ConfigurationError(f"variable_bessel needs beta0 > |beta1|, got beta0={b0}, beta1={b1}")
        if period <= 0:
            raise ConfigurationError("period must be positive")
        return Symbol(
            m,
            lambda x, xi: (b0 + b1 * np.sin(2 * np.pi * x / period)) * _bracket(xi, m),
            name,
            params,
        )
    if name == "vector_field":
        period = params.get("period", 1.0)
        if period <= 0:
            raise ConfigurationError("period must be positive")
        c = TrigPolynomial(_harmonic_coeffs(params), period)
        return Symbol(1.0, lambda x, xi: c(x) * 2j * np.pi * xi, name, params)
    raise ConfigurationError(f"unknown symbol family {name!r}; known: {', '.join(BUILTIN_SYMBOLS)}")


BUILTIN_SYMBOLS = {
    "const": "a = c (order 0); params: c",
    "derivative": "a = 2 pi i xi (order 1)",
    "bessel": "a = (1 + (2 pi xi)^2)^(m/2) (order m); params: m",
    "variable_bessel": "a = (beta0 + beta1 sin(2 pi x/P)) (1 + (2 pi xi)^2)^(m/2); params: m, beta0, beta1[, period]",
    "vector_field": "a = c(x) 2 pi i xi, c = c0 + sum a_h cos + b_h sin; params: c0, a1, b1, ...[, period]",
}


def _psi(u):
    u = np.asarray(u, dtype=float)
    pos = u > 0
    return np.where(pos, np.exp(-1.0 / np.where(pos, u, 1.0)), 0.0)


def bump_phi(s):
    """
    Smooth cutoff: 1 on ``|s| <= 1``, 0 on ``|s| >= 2``, non-increasing in ``|s|``.

    Built from ``psi(u) = exp(-1/u)`` as ``psi(2-|s|) / (psi(2-|s|) + psi(|s|-1))``.
    Accepts scalars or arrays.
    """
    a = np.abs(np.asarray(s, dtype=float))
    num = _psi(2.0 - a)
    den = num + _psi(a - 1.0)
    out = num / den
    return float(out) if out.ndim == 0 else out


def cutoff_symbol(a: Symbol, lam: float) -> Symbol:
    """``a_lam(x, xi) = phi(xi / lam) a(x, xi)``."""
    if not (np.isfinite(lam) and lam > 0):
        raise ConfigurationError(f"cutoff lambda must be positive, got {lam!r}")

    def ev(x, xi):
        return bump_phi(xi / lam) * a(x, xi)

    return Symbol(a.order, ev, f"{a.name}_cutoff", {**a.params, "lambda": float(lam)})


# ---------------------------------------------------------------------------
# empirical symbol-class estimates

_STENCILS = {
    0: ((0,), (1.0,), 0),
    1: ((-1, 1), (-0.5, 0.5), 1),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0), 2),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5), 3),
}


@dataclass(frozen=True)
class SymbolEstimateReport:
    """
    Estimated constants ``C[(k, k')]`` of the symbol-class bound.

    ``rounding_floor[(k, k')]`` bounds the finite-difference rounding noise
    in the same units; a constant below it is zero to working precision.
    """

    constants: Mapping
    max_order_checked: int
    sample: str
    rounding_floor: Mapping = field(default_factory=dict)

    def __getitem__(self, key):
        return self.constants[key]


def _fd_derivative(a: Symbol, x, xi, k, kp, hx, hxi):
    """Central-difference mixed derivative and its rounding-noise scale."""
    offs_x, w_x, px = _STENCILS[k]
    offs_xi, w_xi, pxi = _STENCILS[kp]
    acc = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
    noise = np.zeros(acc.shape)
    for ox, wx in zip(offs_x, w_x):
        for oxi, wxi in zip(offs_xi, w_xi):
            val = a(x + ox * hx, xi + oxi * hxi)
            acc += wx * wxi * val
            noise += abs(wx * wxi) * np.abs(val)
    scale = hx**px * hxi**pxi
    return acc / scale, np.finfo(float).eps * noise / scale


def symbol_estimate_report(
    a: Symbol, grid: PeriodicGrid, k_max: int, kp_max: int, oversample: int = 1
) -> SymbolEstimateReport:
    """
    Estimate ``C_{k,k'} = sup |D_x^k D_xi^k' a| / <xi>^{m-k'}`` on a sample.

    The weight is the bracket ``<xi> = (1 + xi^2)^{1/2}``. Derivatives use
    central differences with steps ``P/(8N)`` in x and ``1/4`` in xi.
    Samples are the grid nodes and grid frequencies; ``oversample > 1``
    refines both sample sets by that factor over the same ranges.
    """
    if not (0 <= k_max <= 3 and 0 <= kp_max <= 3):
        raise ConfigurationError("finite-difference depth is limited to orders 0..3")
    if int(oversample) != oversample or oversample < 1:
        raise ConfigurationError("oversample must be a positive integer")
    n = grid.n_points
    x = np.arange(n * oversample) * grid.period / (n * oversample)
    kk = grid.frequencies
    xi = np.arange(kk[0] * oversample, kk[-1] * oversample + 1) / (grid.period * oversample)
    X, XI = np.meshgrid(x, xi, indexing="ij")
    hx, hxi = grid.period / (8 * n), 0.25
    weight_base = 1.0 + XI**2
    constants, floors = {}, {}
    for k in range(k_max + 1):
        for kp in range(kp_max + 1):
            d, noise = _fd_derivative(a, X, XI, k, kp, hx, hxi)
            w = weight_base ** ((a.order - kp) / 2.0)
            ratio = np.abs(d) / w
            bad = ~np.isfinite(ratio)
            if bad.any():
                i, j = np.argwhere(bad)[0]
                raise NumericError(f"non-finite derivative (k={k}, k'={kp}) at x={X[i, j]!r}, xi={XI[i, j]!r}")
            constants[(k, kp)] = float(ratio.max())
            floors[(k, kp)] = float(16 * np.max(noise / w))
    desc = f"{x.size} x-samples on [0, {grid.period}), {xi.size} xi-samples in [{xi[0]}, {xi[-1]}]"
    return SymbolEstimateReport(
        MappingProxyType(constants), max(k_max, kp_max), desc, MappingProxyType(floors)
    )


def ellipticity_constant(a: Symbol, grid: PeriodicGrid, M: float) -> float:
    """
    Largest ``C`` with ``min_x |a(x, xi)| >= C |xi|^m`` for grid ``|xi| > M``.

    Returns ``inf`` when no grid frequency exceeds ``M``.
    """
    if M < 0:
        raise ConfigurationError("ellipticity threshold M must be >= 0")
    xi = grid.physical_frequencies
    sel = np.abs(xi) > M
    if not sel.any():
        return float("inf")
    vals = np.abs(a.sample(grid))[:, sel].min(axis=0)
    return float(np.min(vals / np.abs(xi[sel]) ** a.order))
