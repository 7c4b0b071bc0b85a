"""Generalized Hermite functions with a scaling factor.

``H_n^alpha(x) = sqrt(alpha) * psi_n(alpha * x)`` where ``psi_n`` are the
orthonormal Hermite functions. All evaluation goes through the normalized
three-term recurrence, so ``2**n * n!`` is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PI_QUARTER = np.pi ** -0.25


@dataclass(frozen=True)
class BasisSpec:
    """Scaling factor ``alpha`` and highest retained mode ``n_max``."""

    alpha: float
    n_max: int

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a nonnegative integer, got {self.n_max}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def size(self) -> int:
        return self.n_max + 1

    def with_n_max(self, n_max: int) -> "BasisSpec":
        return BasisSpec(self.alpha, n_max)

    def eigenvalues(self, n_max: int | None = None) -> np.ndarray:
        """All eigenvalues ``lambda_0 .. lambda_{n_max}``."""
        n = self.n_max if n_max is None else n_max
        return 2.0 * self.alpha**2 * np.arange(n + 1, dtype=float)


def eigenvalue(spec: BasisSpec, n: int) -> float:
    """Sturm-Liouville eigenvalue ``lambda_n = 2 alpha^2 n``."""
    if n < 0:
        raise ValueError(f"mode index must be nonnegative, got {n}")
    return 2.0 * spec.alpha**2 * n


def hermite_functions(n_max: int, y) -> np.ndarray:
    """Orthonormal Hermite functions ``psi_0 .. psi_{n_max}`` at ``y``.

    Returns an array of shape ``(n_max + 1,) + np.shape(y)``. Far in the
    tail the values underflow to zero.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((n_max + 1,) + y.shape)
    out[0] = _PI_QUARTER * np.exp(-0.5 * y * y)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * y * out[0]
    for n in range(1, n_max):
        out[n + 1] = y * np.sqrt(2.0 / (n + 1)) * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def eval_basis(spec: BasisSpec, x) -> np.ndarray:
    """Values ``H_0^alpha(x) .. H_{n_max}^alpha(x)``.

    Parameters
    ----------
    spec : BasisSpec
    x : float or array_like
        Evaluation points; must be finite.

    Returns
    -------
    numpy.ndarray
        Shape ``(spec.n_max + 1,) + np.shape(x)``.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    return np.sqrt(spec.alpha) * hermite_functions(spec.n_max, spec.alpha * x)


def eval_series(coeffs, x):
    """Synthesize ``sum_n c_n H_n^alpha(x)`` from a :class:`CoeffVec`."""
    values = np.asarray(coeffs.values, dtype=float)
    return np.tensordot(values, eval_basis(coeffs.spec, x), axes=(0, 0))
