"""
Periodic grids and discrete Fourier analysis.

The real line is modelled by a circle of period ``P`` sampled at ``N``
equispaced nodes. Frequencies are stored in natural order
``-N//2, ..., N - N//2 - 1`` (never in FFT wrap-around order), and the
physical frequency of integer index ``k`` is ``k / P``.

Conventions
-----------
forward:  u_hat(k) = (1/N) sum_j u(x_j) exp(-2 pi i k x_j / P)
inverse:  u(x_j)   = sum_k u_hat(k) exp(2 pi i k x_j / P)

so ``u_hat(0)`` is the mean of ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np

from .errors import ConfigurationError, NumericError, ShapeError

Representation = Literal["point", "fourier"]


@dataclass(frozen=True)
class PeriodicGrid:
    """Equispaced nodes on a circle of length ``period``."""

    n_points: int
    period: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigurationError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not np.isfinite(self.period) or self.period <= 0:
            raise ConfigurationError(f"period must be positive and finite, got {self.period!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "period", float(self.period))

    @property
    def spacing(self) -> float:
        return self.period / self.n_points

    @property
    def weight(self) -> float:
        """Quadrature weight of the discrete L2 inner product."""
        return self.period / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.arange(self.n_points) * self.spacing
        x.setflags(write=False)
        return x

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Integer frequency indices in natural (ascending) order."""
        n = self.n_points
        k = np.arange(-(n // 2), n - n // 2)
        k.setflags(write=False)
        return k

    @cached_property
    def physical_frequencies(self) -> np.ndarray:
        xi = self.frequencies / self.period
        xi.setflags(write=False)
        return xi

    @property
    def xi_max(self) -> float:
        """Largest physical frequency magnitude on the grid."""
        return float(np.max(np.abs(self.physical_frequencies)))

    def fft_index(self, k) -> np.ndarray:
        """Position of integer frequency ``k`` in numpy's FFT output ordering."""
        return np.mod(k, self.n_points)

    @cached_property
    def forward_matrix(self) -> np.ndarray:
        """Dense DFT matrix ``F`` with ``u_hat = F @ u`` (rows indexed by natural frequency order)."""
        phase = np.outer(self.frequencies, self.nodes) / self.period
        F = np.exp(-2j * np.pi * phase) / self.n_points
        F.setflags(write=False)
        return F

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        phase = np.outer(self.nodes, self.frequencies) / self.period
        Finv = np.exp(2j * np.pi * phase)
        Finv.setflags(write=False)
        return Finv

    def mode(self, k: int) -> np.ndarray:
        """Sampled Fourier mode exp(2 pi i k x / P)."""
        return np.exp(2j * np.pi * k * self.nodes / self.period)


def make_grid(n_points: int, period: float = 1.0) -> PeriodicGrid:
    return PeriodicGrid(n_points, period)


@dataclass(frozen=True)
class SpectralVector:
    """Grid function in either point or Fourier representation."""

    values: np.ndarray
    representation: Representation = "point"

    def __post_init__(self):
        if self.representation not in ("point", "fourier"):
            raise ConfigurationError(f"unknown representation {self.representation!r}")
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1:
            raise ShapeError(f"SpectralVector must be one-dimensional, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def _check_length(values, grid: PeriodicGrid):
    if len(values) != grid.n_points:
        raise ShapeError(f"vector of length {len(values)} does not match grid with N={grid.n_points}")


def transform(u: SpectralVector, direction: Literal["forward", "inverse"], grid: PeriodicGrid) -> SpectralVector:
    """Forward (point -> Fourier) or inverse (Fourier -> point) DFT."""
    _check_length(u.values, grid)
    k = grid.frequencies
    if direction == "forward":
        if u.representation != "point":
            raise ShapeError("forward transform expects a point-representation vector")
        coeffs = np.fft.fft(u.values)[grid.fft_index(k)] / grid.n_points
        return SpectralVector(coeffs, "fourier")
    if direction == "inverse":
        if u.representation != "fourier":
            raise ShapeError("inverse transform expects a Fourier-representation vector")
        buf = np.zeros(grid.n_points, dtype=complex)
        buf[grid.fft_index(k)] = u.values
        return SpectralVector(np.fft.ifft(buf) * grid.n_points, "point")
    raise ConfigurationError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def forward(values, grid: PeriodicGrid) -> np.ndarray:
    """Array-level shortcut for ``transform(..., "forward", grid).values``."""
    return transform(SpectralVector(values, "point"), "forward", grid).values


def inverse(coeffs, grid: PeriodicGrid) -> np.ndarray:
    return transform(SpectralVector(coeffs, "fourier"), "inverse", grid).values


def inner_product(u: SpectralVector, w: SpectralVector, grid: PeriodicGrid) -> complex:
    """Discrete L2 inner product ``(P/N) sum_j u_j conj(w_j)``, linear in ``u``."""
    if u.representation != "point" or w.representation != "point":
        raise ShapeError("inner_product expects point-representation vectors")
    _check_length(u.values, grid)
    _check_length(w.values, grid)
    return complex(grid.weight * np.vdot(w.values, u.values))


def l2_norm(values, weight: float) -> float:
    values = np.asarray(values)
    return float(np.sqrt(weight * np.vdot(values, values).real))


def multiplier_matrix(g: Callable[[np.ndarray], np.ndarray], grid: PeriodicGrid):
    """
    Dense point-basis matrix of the Fourier multiplier ``g``.

    ``g`` receives the array of physical frequencies ``k / P`` and must
    return one finite value per frequency. The result is
    ``F^{-1} diag(g) F``; it is flagged Hermitian when ``g`` is real.
    """
    from .operator import OperatorMatrix

    xi = grid.physical_frequencies
    gv = np.broadcast_to(np.asarray(g(xi), dtype=complex), xi.shape)
    bad = ~np.isfinite(gv)
    if bad.any():
        raise NumericError(f"multiplier is not finite at frequency xi={xi[np.argmax(bad)]!r}")
    entries = (grid.inverse_matrix * gv) @ grid.forward_matrix
    hermitian = bool(np.all(gv.imag == 0))
    if hermitian:
        entries = 0.5 * (entries + entries.conj().T)
    return OperatorMatrix(entries, (grid,), hermitian=hermitian)


def derivative_matrix(grid: PeriodicGrid):
    """Spectral first derivative d/dx."""
    return multiplier_matrix(lambda xi: 2j * np.pi * xi, grid)


def fractional_laplacian(grid: PeriodicGrid, order: float):
    """``(-d^2/dx^2)^{order/2}``, multiplier ``(2 pi |xi|)^order``."""
    return multiplier_matrix(lambda xi: (2 * np.pi * np.abs(xi)) ** order, grid)
