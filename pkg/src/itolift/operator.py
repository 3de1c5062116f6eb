"""Dense operator matrices acting on (product) periodic grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError, ShapeError
from .grid import PeriodicGrid

HERMITIAN_RTOL = 1e-10


def hermitian_defect(entries: np.ndarray) -> float:
    return float(np.linalg.norm(entries - entries.conj().T))


def is_hermitian(entries: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermitian_defect(entries) <= rtol * (1.0 + np.linalg.norm(entries))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Operator in the point basis of one grid or a product of grids.

    Point ordering on a product grid is row-major: index ``j * M + k`` for
    base node ``j`` and fiber node ``k``.

    Parameters
    ----------
    entries : ndarray
        Square complex matrix.
    grids : tuple of PeriodicGrid
        Factor grids; the matrix size must equal the product of their sizes.
    hermitian : bool
        Validated on construction.
    factor : OperatorMatrix, optional
        When set, the operator equals ``factor^† factor``. Spectral routines
        use it to avoid squaring the condition number.
    """

    entries: np.ndarray
    grids: tuple
    hermitian: bool = False
    factor: Optional["OperatorMatrix"] = field(default=None, repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        grids = tuple(self.grids) if not isinstance(self.grids, PeriodicGrid) else (self.grids,)
        n = int(np.prod([g.n_points for g in grids]))
        if a.shape != (n, n):
            raise ShapeError(f"operator of shape {a.shape} does not match grids of total size {n}")
        if self.hermitian and not is_hermitian(a):
            raise ContractError(
                f"matrix flagged Hermitian has defect {hermitian_defect(a):.3e}"
            )
        if self.factor is not None and self.factor.shape != a.shape:
            raise ShapeError("factor shape does not match operator shape")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "grids", grids)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def weight(self) -> float:
        """Quadrature weight of the underlying inner product."""
        return float(np.prod([g.weight for g in self.grids]))

    @property
    def H(self) -> np.ndarray:
        return self.entries.conj().T

    def apply(self, u) -> np.ndarray:
        u = np.asarray(getattr(u, "values", u))
        flat = u.reshape(-1)
        if flat.shape[0] != self.size:
            raise ShapeError(f"vector of size {flat.shape[0]} does not match operator size {self.size}")
        return (self.entries @ flat).reshape(u.shape)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.shape != self.shape:
                raise ShapeError("operator shapes differ")
            return OperatorMatrix(self.entries @ other.entries, self.grids)
        return self.apply(other)

    def norm(self, ord="fro") -> float:
        return float(np.linalg.norm(self.entries, ord))

    def eigvalsh(self) -> np.ndarray:
        """Ascending eigenvalues of a Hermitian operator."""
        if not self.hermitian:
            raise ContractError("eigvalsh requires a Hermitian operator")
        if self.factor is not None:
            s = np.linalg.svd(self.factor.entries, compute_uv=False)
            return np.sort(s**2)
        return np.linalg.eigvalsh(self.entries)

    @classmethod
    def identity(cls, grids) -> "OperatorMatrix":
        grids = (grids,) if isinstance(grids, PeriodicGrid) else tuple(grids)
        n = int(np.prod([g.n_points for g in grids]))
        return cls(np.eye(n), grids, hermitian=True)
