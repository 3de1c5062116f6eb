"""Real trigonometric polynomials given by cos/sin coefficient lists."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class TrigPolynomial:
    """
    ``c0 + sum_h a_h cos(2 pi h x / P) + b_h sin(2 pi h x / P)``.

    ``coeffs`` is the flat list ``[c0, a1, b1, a2, b2, ...]``; a trailing
    unpaired cosine coefficient is allowed.
    """

    coeffs: tuple
    period: float = 1.0

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            raise ConfigurationError("trigonometric polynomial needs at least one coefficient")
        if not all(np.isfinite(c)):
            raise ConfigurationError(f"non-finite trigonometric coefficient in {c}")
        if not (np.isfinite(self.period) and self.period > 0):
            raise ConfigurationError(f"period must be positive, got {self.period}")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "period", float(self.period))

    @property
    def degree(self) -> int:
        return len(self.coeffs) // 2

    def _pairs(self):
        c = list(self.coeffs[1:])
        if len(c) % 2:
            c.append(0.0)
        return [(h + 1, c[2 * h], c[2 * h + 1]) for h in range(len(c) // 2)]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.coeffs[0])
        for h, a, b in self._pairs():
            w = 2 * np.pi * h * x / self.period
            out = out + a * np.cos(w) + b * np.sin(w)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for h, a, b in self._pairs():
            k = 2 * np.pi * h / self.period
            out = out + k * (-a * np.sin(k * x) + b * np.cos(k * x))
        return out

    def sup_norm_bound(self) -> float:
        """Crude upper bound on ``max |p|``."""
        return float(np.sum(np.abs(self.coeffs)))

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int, period: float = 1.0, scale: float = 1.0):
        """Coefficients decaying like ``2**-h`` so the polynomial is smooth."""
        c = [scale * rng.standard_normal()]
        for h in range(1, degree + 1):
            c.extend(scale * 2.0**-h * rng.standard_normal(2))
        return cls(tuple(c), period)
