"""
The lifted space: base grid x fiber grid, shears ``(x, y) -> (x, y + f(x))``,
and the transform ``L_hat = S_{-f} (L (x) I) S_{+f}`` of a base operator.

The fiber line is a torus of period ``Y``. A shear is applied in fiber
Fourier space, where it multiplies mode ``eta`` of column ``x_j`` by
``exp(2 pi i eta f(x_j) / Y)``. This is the exact shift of the fiber
trigonometric interpolant, so every shear is unitary and the transform of
an operator is unitarily equivalent to ``L (x) I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, ShapeError
from .grid import PeriodicGrid, SpectralVector, derivative_matrix, fractional_laplacian, l2_norm
from .operator import OperatorMatrix
from .quantization import compose_l
from .semigroup import SemigroupSpec, SpectralPropagator, semigroup_series
from .symbols import Symbol, cutoff_symbol
from .trig import TrigPolynomial


@dataclass(frozen=True, eq=False)
class LiftedField:
    """Values ``v(x_j, y_k)`` as an ``N x M`` array."""

    values: np.ndarray
    base_grid: PeriodicGrid
    fiber_grid: PeriodicGrid

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        expected = (self.base_grid.n_points, self.fiber_grid.n_points)
        if v.shape != expected:
            raise ShapeError(f"field of shape {v.shape} does not match grids {expected}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, base_grid: PeriodicGrid, fiber_grid: PeriodicGrid) -> "LiftedField":
        x = base_grid.nodes[:, None]
        y = fiber_grid.nodes[None, :]
        return cls(np.broadcast_to(func(x, y), (len(base_grid.nodes), len(fiber_grid.nodes))), base_grid, fiber_grid)

    @classmethod
    def separable(cls, profile_x, profile_y, base_grid, fiber_grid) -> "LiftedField":
        """``v(x, y) = p(x) q(y)`` from two callables (e.g. TrigPolynomial)."""
        return cls(np.outer(profile_x(base_grid.nodes), profile_y(fiber_grid.nodes)), base_grid, fiber_grid)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def norm(self) -> float:
        return l2_norm(self.flat, self.base_grid.weight * self.fiber_grid.weight)


def default_fiber_period(f_values) -> float:
    """``4 max|f|`` so a shear wraps the fiber at most once; 1 for ``f == 0``."""
    amp = float(np.max(np.abs(f_values)))
    return 4.0 * amp if amp > 0 else 1.0


@dataclass(frozen=True, eq=False)
class ShearMap:
    """Samples of ``f`` at the base nodes together with the fiber they shear."""

    f_values: np.ndarray
    fiber_grid: PeriodicGrid

    def __post_init__(self):
        f = np.array(self.f_values, dtype=float)
        if f.ndim != 1:
            raise ShapeError("f_values must be one-dimensional")
        if not np.all(np.isfinite(f)):
            raise ConfigurationError("shear function has non-finite samples")
        f.setflags(write=False)
        object.__setattr__(self, "f_values", f)

    @classmethod
    def from_function(
        cls, f, base_grid: PeriodicGrid, fiber_n: int, fiber_period: Optional[float] = None
    ) -> "ShearMap":
        vals = np.asarray(f(base_grid.nodes), dtype=float)
        Y = default_fiber_period(vals) if fiber_period is None else fiber_period
        return cls(vals, PeriodicGrid(fiber_n, Y))

    @property
    def n_base(self) -> int:
        return self.f_values.shape[0]

    def modulation(self, sign: int = 1) -> np.ndarray:
        """``exp(2 pi i sign eta f(x_j) / Y)`` indexed ``[j, eta]`` in natural order."""
        fib = self.fiber_grid
        return np.exp(2j * np.pi * sign * np.outer(self.f_values, fib.frequencies) / fib.period)

    def derivative(self, base_grid: PeriodicGrid) -> np.ndarray:
        """Spectral derivative ``f'`` on the base grid."""
        return derivative_matrix(base_grid).apply(self.f_values).real


def _check_field(v: LiftedField, f: ShearMap):
    if v.values.shape[0] != f.n_base:
        raise ShapeError(f"field has {v.values.shape[0]} base nodes, shear has {f.n_base}")
    if v.fiber_grid != f.fiber_grid:
        raise ShapeError(f"fiber grids differ: {v.fiber_grid} vs {f.fiber_grid}")


def _fiber_coeffs(values: np.ndarray, fiber: PeriodicGrid) -> np.ndarray:
    """Fiber DFT along axis 1, natural frequency order."""
    return np.fft.fft(values, axis=1)[:, fiber.fft_index(fiber.frequencies)] / fiber.n_points


def _fiber_values(coeffs: np.ndarray, fiber: PeriodicGrid) -> np.ndarray:
    buf = np.zeros_like(coeffs)
    buf[:, fiber.fft_index(fiber.frequencies)] = coeffs
    return np.fft.ifft(buf, axis=1) * fiber.n_points


def shear_apply(v: LiftedField, f: ShearMap, sign: int = 1) -> LiftedField:
    """``(S_{sign f} v)(x, y) = v(x, y + sign f(x))`` on the fiber interpolant."""
    if sign not in (1, -1):
        raise ConfigurationError("sign must be +1 or -1")
    _check_field(v, f)
    coeffs = _fiber_coeffs(v.values, v.fiber_grid) * f.modulation(sign)
    return LiftedField(_fiber_values(coeffs, v.fiber_grid), v.base_grid, v.fiber_grid)


def shear_matrix(f: ShearMap, base_grid: PeriodicGrid, sign: int = 1) -> OperatorMatrix:
    """Point-basis matrix of ``S_{sign f}`` (block diagonal over base nodes)."""
    if base_grid.n_points != f.n_base:
        raise ShapeError("base grid does not match shear samples")
    fib = f.fiber_grid
    N, M = f.n_base, fib.n_points
    mod = f.modulation(sign)
    blocks = np.einsum("ye,je,ez->jyz", fib.inverse_matrix, mod, fib.forward_matrix)
    S = np.zeros((N, M, N, M), dtype=complex)
    idx = np.arange(N)
    S[idx, :, idx, :] = blocks
    return OperatorMatrix(S.reshape(N * M, N * M), (base_grid, fib))


def graph_trace(v: LiftedField, f: ShearMap) -> SpectralVector:
    """``v(x_j, f(x_j))`` via the fiber trigonometric interpolant."""
    _check_field(v, f)
    coeffs = _fiber_coeffs(v.values, v.fiber_grid)
    return SpectralVector(np.sum(coeffs * f.modulation(1), axis=1), "point")


def _lift_entries(A: np.ndarray, f: ShearMap) -> np.ndarray:
    # block eta in fiber-Fourier coordinates is D_eta^† A D_eta
    fib = f.fiber_grid
    N, M = f.n_base, fib.n_points
    if not np.any(f.f_values):
        return np.kron(A, np.eye(M))
    d = f.modulation(1)  # [j, eta]
    blocks = np.einsum("je,jl,le->ejl", d.conj(), A, d)
    out = np.einsum("ye,ejl,ez->jylz", fib.inverse_matrix, blocks, fib.forward_matrix)
    return out.reshape(N * M, N * M)


def ito_transform(L: OperatorMatrix, f: ShearMap, fiber: Optional[PeriodicGrid] = None) -> OperatorMatrix:
    """
    Transform of a base operator under the shear: ``S_{-f} (L (x) I) S_{+f}``.

    Assembled block-wise in fiber frequency. If ``L`` carries a factor
    ``F`` with ``L = F^† F``, the result carries the transform of ``F``.
    """
    if fiber is not None and fiber != f.fiber_grid:
        raise ShapeError("fiber grid does not match the shear map")
    if len(L.grids) != 1 or L.size != f.n_base:
        raise ShapeError("ito_transform expects an operator on the base grid matching the shear")
    base = L.grids[0]
    entries = _lift_entries(L.entries, f)
    factor = None
    if L.factor is not None:
        factor = OperatorMatrix(_lift_entries(L.factor.entries, f), (base, f.fiber_grid))
    if L.hermitian:
        entries = 0.5 * (entries + entries.conj().T)
    return OperatorMatrix(entries, (base, f.fiber_grid), hermitian=L.hermitian, factor=factor)


def fiber_block(L_hat: OperatorMatrix, eta_index: int) -> np.ndarray:
    """Restriction of a product operator to fiber frequency ``eta`` (index in natural order)."""
    base, fib = L_hat.grids
    N, M = base.n_points, fib.n_points
    T = L_hat.entries.reshape(N, M, N, M)
    blocks = np.einsum("ey,jylz,zf->ejlf", fib.forward_matrix, T, fib.inverse_matrix)
    return blocks[eta_index, :, :, eta_index]


def tensor_base(A: OperatorMatrix, fiber: PeriodicGrid) -> OperatorMatrix:
    """``A (x) I`` on the product grid."""
    return OperatorMatrix(np.kron(A.entries, np.eye(fiber.n_points)), (A.grids[0], fiber), hermitian=A.hermitian)


def tensor_fiber(base: PeriodicGrid, B: OperatorMatrix) -> OperatorMatrix:
    """``I (x) B`` on the product grid."""
    return OperatorMatrix(np.kron(np.eye(base.n_points), B.entries), (base, B.grids[0]), hermitian=B.hermitian)


def conjugate_by_shear(A: OperatorMatrix, f: ShearMap) -> np.ndarray:
    """``S_{-f} A S_{+f}`` by explicit matrix products."""
    base = A.grids[0]
    Sp = shear_matrix(f, base, 1).entries
    Sm = shear_matrix(f, base, -1).entries
    return Sm @ A.entries @ Sp


# ---------------------------------------------------------------------------
# intertwining check


class ItoCheck:
    """
    Both sides of ``P_t(v o graph f) = (P_hat_t v) o graph f`` for one symbol,
    shear and field, with decompositions cached across times.

    The left side is evolved on the base grid and the right side on the
    product grid, each with its own decomposition.
    """

    def __init__(self, a: Symbol, f: ShearMap, v: LiftedField, method: str = "eig",
                 lam: Optional[float] = None, series_terms: int = 20):
        _check_field(v, f)
        base = v.base_grid
        if method not in ("eig", "series"):
            raise ConfigurationError(f"unknown method {method!r}")
        self.method = method
        self.series_terms = series_terms
        symbol = a if lam is None else cutoff_symbol(a, lam)
        self.L = compose_l(symbol, base)
        self.L_hat = ito_transform(self.L, f)
        self.f = f
        self.v = v
        self.trace = graph_trace(v, f).values
        if method == "eig":
            self._base = SpectralPropagator(self.L)
            self._lift = SpectralPropagator(self.L_hat)

    def sides(self, t: float):
        if self.method == "eig":
            left = self._base.apply(t, self.trace)
            evolved = self._lift.apply(t, self.v.flat)
        else:
            K = self.series_terms
            left = semigroup_series(self.L, t, K).operator.apply(self.trace)
            evolved = semigroup_series(self.L_hat, t, K).operator.apply(self.v.flat)
        w = LiftedField(evolved.reshape(self.v.values.shape), self.v.base_grid, self.v.fiber_grid)
        right = graph_trace(w, self.f).values
        return left, right

    def residual(self, t: float):
        """``(max, L2)`` norms of the difference of the two sides."""
        if not (np.isfinite(t) and t >= 0):
            raise ConfigurationError("time must be finite and >= 0")
        left, right = self.sides(t)
        d = left - right
        return float(np.max(np.abs(d))), l2_norm(d, self.v.base_grid.weight)


def ito_residual(a: Symbol, f: ShearMap, v: LiftedField, t: float, method="eig"):
    """
    Residual of the intertwining identity at time ``t``.

    ``method`` is ``"eig"``, ``"series"``, or a :class:`SemigroupSpec`
    (whose ``lam`` applies the cutoff to the symbol and ``series_terms``
    sets the truncation).
    """
    if isinstance(method, SemigroupSpec):
        check = ItoCheck(a, f, v, method.method, method.lam, method.series_terms)
    else:
        check = ItoCheck(a, f, v, method)
    return check.residual(t)


# ---------------------------------------------------------------------------
# vector fields


def lift_vector_field(c, f: ShearMap, base_grid: PeriodicGrid):
    """
    ``X = c d/dx`` on the base and its lift
    ``X_hat = X (x) I + diag(c f') (x) d/dy``.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (base_grid.n_points,) or f.n_base != base_grid.n_points:
        raise ShapeError("coefficient, shear and base grid sizes differ")
    if not np.all(np.isfinite(c)):
        raise ConfigurationError("vector-field coefficient has non-finite samples")
    fib = f.fiber_grid
    Dx = derivative_matrix(base_grid).entries
    Dy = derivative_matrix(fib).entries
    X = np.diag(c) @ Dx
    cf = c * f.derivative(base_grid)
    X_hat = np.kron(X, np.eye(fib.n_points)) + np.kron(np.diag(cf), Dy)
    return OperatorMatrix(X, (base_grid,)), OperatorMatrix(X_hat, (base_grid, fib))


def band_projector(grid: PeriodicGrid, max_index: int) -> np.ndarray:
    """Point-basis projector onto integer frequencies ``|k| <= max_index``."""
    keep = (np.abs(grid.frequencies) <= max_index).astype(float)
    return (grid.inverse_matrix * keep) @ grid.forward_matrix


def vector_field_defect(cs: Sequence, f: ShearMap, base_grid: PeriodicGrid, band=None) -> float:
    """
    Frobenius norm of ``S_{-f} (sum X_i^2 (x) I) S_{+f} - sum X_hat_i^2``.

    With ``band=(kx, ky)`` the defect is restricted to inputs whose base and
    fiber frequency indices satisfy ``|k| <= kx`` and ``|eta| <= ky``.
    """
    fib = f.fiber_grid
    sq = np.zeros((base_grid.n_points,) * 2, dtype=complex)
    sq_hat = 0
    for c in cs:
        X, X_hat = lift_vector_field(c, f, base_grid)
        sq = sq + X.entries @ X.entries
        sq_hat = sq_hat + X_hat.entries @ X_hat.entries
    lhs = conjugate_by_shear(OperatorMatrix(np.kron(sq, np.eye(fib.n_points)), (base_grid, fib)), f)
    D = lhs - sq_hat
    if band is not None:
        D = D @ np.kron(band_projector(base_grid, band[0]), band_projector(fib, band[1]))
    return float(np.linalg.norm(D))


# ---------------------------------------------------------------------------
# auxiliary operators


class AuxiliaryResult(NamedTuple):
    L_bar: OperatorMatrix
    L_tilde: OperatorMatrix
    comm_norm: float
    conj_norm: float


def auxiliary_commutator(L_hat: OperatorMatrix, m: float, f: ShearMap, L: OperatorMatrix) -> AuxiliaryResult:
    """
    ``L_bar = L_hat + I (x) (-d^2/dy^2)^{m/2}`` and
    ``L_tilde = L (x) I + I (x) (-d^2/dy^2)^{m/2}``, with the norms of
    ``[L_bar, L_hat]`` and of ``L_bar - S_{-f} L_tilde S_{+f}``.
    """
    if len(L_hat.grids) != 2 or L_hat.grids[1] != f.fiber_grid or L_hat.grids[0] != L.grids[0]:
        raise ShapeError("operator grids are inconsistent with the shear")
    base, fib = L_hat.grids
    fiber_term = tensor_fiber(base, fractional_laplacian(fib, m)).entries
    L_bar = L_hat.entries + fiber_term
    L_tilde = np.kron(L.entries, np.eye(fib.n_points)) + fiber_term
    # [L_bar, L_hat] = [I (x) T, L_hat]; the second form avoids cancelling two O(|L_hat|^2) products
    comm = fiber_term @ L_hat.entries - L_hat.entries @ fiber_term
    tilde_op = OperatorMatrix(L_tilde, (base, fib))
    conj = L_bar - conjugate_by_shear(tilde_op, f)
    herm = L_hat.hermitian and L.hermitian
    return AuxiliaryResult(
        OperatorMatrix(L_bar, (base, fib), hermitian=herm),
        OperatorMatrix(L_tilde, (base, fib), hermitian=herm),
        float(np.linalg.norm(comm)),
        float(np.linalg.norm(conj)),
    )


# ---------------------------------------------------------------------------
# variation of constants


def duhamel_residual(a: Symbol, f: ShearMap, v: LiftedField, t: float, lam: float, n_steps: int) -> float:
    """
    Relative error of the trapezoid rule applied to

        (P_hat_t - P_hat_lam,t) v = int_0^t P_hat_lam,t-s (L_hat_lam - L_hat) P_hat_s v ds.

    Returns ``||lhs - quadrature|| / ||v||``.
    """
    if int(n_steps) != n_steps or n_steps < 2:
        raise ConfigurationError("n_steps must be an integer >= 2")
    if not (np.isfinite(t) and t >= 0):
        raise ConfigurationError("time must be finite and >= 0")
    _check_field(v, f)
    base = v.base_grid
    L_hat = ito_transform(compose_l(a, base), f)
    L_hat_lam = ito_transform(compose_l(cutoff_symbol(a, lam), base), f)
    full = SpectralPropagator(L_hat)
    cut = SpectralPropagator(L_hat_lam)
    diff = L_hat_lam.entries - L_hat.entries
    x = v.flat
    lhs = full.apply(t, x) - cut.apply(t, x)
    s = np.linspace(0.0, t, n_steps + 1)
    vals = [cut.apply(t - si, diff @ full.apply(si, x)) for si in s]
    h = t / n_steps
    quad = h * (np.sum(vals, axis=0) - 0.5 * (vals[0] + vals[-1]))
    w = base.weight * v.fiber_grid.weight
    vn = l2_norm(x, w)
    if vn == 0:
        return 0.0
    return l2_norm(lhs - quad, w) / vn
