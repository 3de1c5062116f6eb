"""
Left (Kohn-Nirenberg) quantization of symbols on a periodic grid.

The operator of a symbol ``a`` acts as

    (L0 u)(x_j) = sum_k a(x_j, k/P) u_hat(k) exp(2 pi i k x_j / P),

so a single Fourier mode ``e_k`` is mapped to ``a(., k/P) * e_k``.
"""

from __future__ import annotations

import numpy as np

from .grid import PeriodicGrid
from .operator import OperatorMatrix, is_hermitian
from .symbols import Symbol


def _kernel_sum(a: Symbol, grid: PeriodicGrid) -> np.ndarray:
    """``sum_k a(x_j, k/P) exp(2 pi i k (x_j - x_l) / P)``."""
    A = a.sample(grid)
    E = grid.inverse_matrix  # E[j, k] = exp(2 pi i k x_j / P)
    return (A * E) @ E.conj().T


def assemble_l0(a: Symbol, grid: PeriodicGrid) -> OperatorMatrix:
    entries = _kernel_sum(a, grid) / grid.n_points
    return OperatorMatrix(entries, (grid,), hermitian=is_hermitian(entries))


def adjoint_op(A: OperatorMatrix) -> OperatorMatrix:
    """
    L2 adjoint. Weights are uniform, so this is the conjugate transpose.
    """
    factor = None
    if A.hermitian and A.factor is not None:
        factor = A.factor
    return OperatorMatrix(A.entries.conj().T, A.grids, hermitian=A.hermitian, factor=factor)


def compose_l(a: Symbol, grid: PeriodicGrid) -> OperatorMatrix:
    """The positive operator ``L = L0^* L0``; keeps ``L0`` as its factor."""
    L0 = assemble_l0(a, grid)
    L = adjoint_op(L0).entries @ L0.entries
    L = 0.5 * (L + L.conj().T)
    return OperatorMatrix(L, (grid,), hermitian=True, factor=L0)


def kernel_pair(a_lam: Symbol, grid: PeriodicGrid):
    """
    Integral kernels of the operator and of its adjoint.

    ``K[j, l]`` is normalised so that the quadrature ``(P/N) K @ u``
    reproduces ``assemble_l0(a_lam) @ u``; ``K_adj[j, l] = conj(K[l, j])``.
    """
    K = _kernel_sum(a_lam, grid) / grid.period
    return K, K.conj().T.copy()
