"""
Heat semigroups ``P_t = exp(-t L)`` of positive operators.

Two routes are provided: an exact spectral route (Hermitian
eigendecomposition, or an SVD of the square-root factor when the operator
carries one) and a truncated exponential series with scaling and squaring.
The sign is fixed by positivity of ``L``: ``exp(-tL)`` is the contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, ContractError
from .grid import PeriodicGrid, SpectralVector, l2_norm
from .operator import OperatorMatrix
from .quantization import adjoint_op, assemble_l0, compose_l
from .symbols import Symbol, cutoff_symbol

# eigenvalues of a PSD matrix below this fraction of the largest are treated as rounding
_ZERO_CLIP = 1e-10


@dataclass(frozen=True)
class SemigroupSpec:
    t: float
    method: Literal["eig", "series"] = "eig"
    series_terms: int = 20
    lam: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t >= 0):
            raise ConfigurationError(f"time must be finite and >= 0, got {self.t!r}")
        if self.method not in ("eig", "series"):
            raise ConfigurationError(f"method must be 'eig' or 'series', got {self.method!r}")
        if self.method == "series" and self.series_terms < 1:
            raise ConfigurationError("series needs at least one term")
        if self.lam is not None and not self.lam > 0:
            raise ConfigurationError("cutoff lambda must be positive")


class SpectralPropagator:
    """
    Cached decomposition ``L = U diag(w) U^†`` for evaluating ``exp(-tL)``
    at many times.
    """

    def __init__(self, L: OperatorMatrix):
        if not L.hermitian:
            raise ContractError("the spectral semigroup requires a Hermitian generator")
        if L.factor is not None:
            # L = F^† F = V^† diag(s^2) V, with V the right singular vectors of F
            _, s, Vh = np.linalg.svd(L.factor.entries)
            w, U = s**2, Vh.conj().T
        else:
            w, U = np.linalg.eigh(L.entries)
            scale = np.max(np.abs(w)) if w.size else 0.0
            w = np.where((w < 0) & (w >= -_ZERO_CLIP * scale), 0.0, w)
        self.eigenvalues = w
        self.eigenvectors = U
        self.grids = L.grids

    def matrix(self, t: float) -> np.ndarray:
        U = self.eigenvectors
        if t == 0:
            return np.eye(U.shape[0], dtype=complex)
        P = (U * np.exp(-t * self.eigenvalues)) @ U.conj().T
        return 0.5 * (P + P.conj().T)

    def operator(self, t: float) -> OperatorMatrix:
        return OperatorMatrix(self.matrix(t), self.grids, hermitian=True)

    def apply(self, t: float, v) -> np.ndarray:
        v = np.asarray(v)
        if t == 0:
            return v.astype(complex)
        U = self.eigenvectors
        out = U @ (np.exp(-t * self.eigenvalues) * (U.conj().T @ v.reshape(-1)))
        return out.reshape(v.shape)


def semigroup_eig(L: OperatorMatrix, t: float) -> OperatorMatrix:
    if t < 0:
        raise ConfigurationError("time must be >= 0")
    return SpectralPropagator(L).operator(t)


class SeriesResult(NamedTuple):
    operator: OperatorMatrix
    bound: float
    squarings: int
    truncation_bound: float


def semigroup_series(L: OperatorMatrix, t: float, K: int) -> SeriesResult:
    """
    ``exp(-tL)`` from the degree-``K`` exponential series with scaling and squaring.

    The step is halved until ``t_s ||L||_2 <= 1``. The series part is kept
    as ``X = exp(-t_s L) - I`` and squared through ``X <- 2X + X^2`` so the
    small low-mode increments keep their relative precision.

    ``bound`` adds to the truncation bound
    ``2^s (t_s||L||)^{K+1}/(K+1)! e^{t_s||L||}`` a first-order rounding
    allowance ``u (n + K + s) max(1, t||L||)``, since the float
    representation of ``L`` alone perturbs its spectrum by ``u ||L||``.
    """
    if int(K) != K or K < 1:
        raise ConfigurationError(f"series needs K >= 1 terms, got {K!r}")
    if not (np.isfinite(t) and t >= 0):
        raise ConfigurationError(f"time must be finite and >= 0, got {t!r}")
    n = L.size
    norm = float(np.linalg.norm(L.entries, 2))
    squarings = 0
    if t * norm > 1.0:
        squarings = int(math.ceil(math.log2(t * norm)))
        while t * norm / 2.0**squarings > 1.0:
            squarings += 1
    ts = t / 2.0**squarings
    A = -ts * L.entries
    terms = [A]
    for k in range(2, K + 1):
        terms.append(terms[-1] @ A / k)
    X = np.zeros_like(A)
    for term in reversed(terms):
        X = X + term
    for _ in range(squarings):
        X = 2.0 * X + X @ X
        if L.hermitian:
            X = 0.5 * (X + X.conj().T)
    R = np.eye(n) + X

    tsn = ts * norm
    truncation = 2.0**squarings * tsn ** (K + 1) / math.factorial(K + 1) * math.exp(tsn)
    rounding = np.finfo(float).eps * (n + K + squarings) * max(1.0, t * norm)
    op = OperatorMatrix(R, L.grids, hermitian=L.hermitian)
    return SeriesResult(op, truncation + rounding, squarings, truncation)


def semigroup(L: OperatorMatrix, spec: SemigroupSpec) -> OperatorMatrix:
    """Dispatch on ``spec.method``; the cutoff in ``spec`` is the caller's concern."""
    if spec.method == "eig":
        return semigroup_eig(L, spec.t)
    return semigroup_series(L, spec.t, spec.series_terms).operator


@dataclass(frozen=True)
class CutoffRow:
    lam: float
    l0_l2: float
    l0_max: float
    adjoint_l2: float
    adjoint_max: float
    # t -> (l2, max) of (P_t - P_{lam,t}) u
    semigroup: dict


def cutoff_convergence(
    a: Symbol,
    grid: PeriodicGrid,
    lambdas: Sequence[float],
    u,
    times: Sequence[float] = (),
) -> dict:
    """
    Measure how the cutoff operators approach the full ones as lambda grows.

    Returns ``{lam: CutoffRow}`` with L2 and max norms of
    ``(L0 - L0_lam) u``, ``(L0^* - L0_lam^*) u`` and ``(P_t - P_lam,t) u``.
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas:
        raise ConfigurationError("lambda list must not be empty")
    if any(v <= 0 for v in lambdas) or lambdas != sorted(lambdas):
        raise ConfigurationError("lambda list must be positive and ascending")
    u = np.asarray(u.values if isinstance(u, SpectralVector) else u, dtype=complex)
    w = grid.weight

    L0 = assemble_l0(a, grid)
    L0_adj = adjoint_op(L0)
    full = SpectralPropagator(compose_l(a, grid)) if times else None
    out = {}
    for lam in lambdas:
        a_lam = cutoff_symbol(a, lam)
        L0_lam = assemble_l0(a_lam, grid)
        d0 = L0.apply(u) - L0_lam.apply(u)
        d1 = L0_adj.apply(u) - adjoint_op(L0_lam).apply(u)
        sg = {}
        if times:
            cut = SpectralPropagator(compose_l(a_lam, grid))
            for t in times:
                d = full.apply(t, u) - cut.apply(t, u)
                sg[float(t)] = (l2_norm(d, w), float(np.max(np.abs(d))))
        out[lam] = CutoffRow(
            lam, l2_norm(d0, w), float(np.max(np.abs(d0))), l2_norm(d1, w), float(np.max(np.abs(d1))), sg
        )
    return out
