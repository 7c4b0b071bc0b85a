"""Fourier-Hermite analysis and banded coefficient-space operators.

Coefficient vectors are plain numpy arrays wrapped in :class:`CoeffVec`. The
operators below never assemble matrices; each one is a two-diagonal map
applied in O(N).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import BasisSpec, eval_basis, hermite_functions


@dataclass(frozen=True, eq=False)
class CoeffVec:
    """Coefficients ``c_0 .. c_{n_max}`` of a series in the basis ``spec``."""

    spec: BasisSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.spec.size:
            raise ValueError(
                f"expected {self.spec.size} coefficients for n_max={self.spec.n_max}, "
                f"got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, spec: BasisSpec) -> "CoeffVec":
        return cls(spec, np.zeros(spec.size))

    @classmethod
    def unit(cls, spec: BasisSpec, k: int) -> "CoeffVec":
        v = np.zeros(spec.size)
        v[k] = 1.0
        return cls(spec, v)

    @property
    def n_max(self) -> int:
        return self.spec.n_max

    def __len__(self):
        return self.spec.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def _aligned(self, other: "CoeffVec"):
        if other.spec.alpha != self.spec.alpha:
            raise ValueError("coefficient vectors use different scaling factors")
        n = max(self.n_max, other.n_max)
        a = np.zeros(n + 1)
        b = np.zeros(n + 1)
        a[: self.spec.size] = self.values
        b[: other.spec.size] = other.values
        return self.spec.with_n_max(n), a, b

    def __add__(self, other):
        spec, a, b = self._aligned(other)
        return CoeffVec(spec, a + b)

    def __sub__(self, other):
        spec, a, b = self._aligned(other)
        return CoeffVec(spec, a - b)

    def __neg__(self):
        return CoeffVec(self.spec, -self.values)

    def __mul__(self, scalar):
        return CoeffVec(self.spec, float(scalar) * self.values)

    __rmul__ = __mul__

    def dot(self, other: "CoeffVec") -> float:
        """L2 inner product, computed exactly through orthonormality."""
        _, a, b = self._aligned(other)
        return float(a @ b)


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Gauss-Hermite rule for integrals ``int g(x) exp(-c x^2) dx``.

    ``nodes`` are the standard abscissae ``y_j`` for the weight ``exp(-y^2)``;
    ``folded_weights`` hold ``w_j * exp(y_j^2)`` so that a caller integrating
    an already-decaying function ``h`` uses ``sum_j W_j h(x_j) / sqrt(c)``
    with ``x_j = y_j / sqrt(c)``.
    """

    nodes: np.ndarray
    folded_weights: np.ndarray
    gauss_exponent: float

    @property
    def node_count(self) -> int:
        return self.nodes.size

    @property
    def points(self) -> np.ndarray:
        return self.nodes / np.sqrt(self.gauss_exponent)

    @property
    def point_weights(self) -> np.ndarray:
        """Weights applied to decaying integrands sampled at :attr:`points`."""
        return self.folded_weights / np.sqrt(self.gauss_exponent)

    @property
    def weights(self) -> np.ndarray:
        """Classical weights ``w_j`` (for polynomial integrands times the Gaussian)."""
        return self.folded_weights * np.exp(-self.nodes**2)

    def integrate(self, h: Callable) -> float:
        """Approximate ``int h(x) dx`` for a Gaussian-decaying ``h``."""
        return float(self.point_weights @ np.asarray(h(self.points), dtype=float))


def gauss_hermite(node_count: int, gauss_exponent: float = 1.0) -> QuadRule:
    """Golub-Welsch nodes with overflow-free folded weights.

    Nodes come from the symmetric Jacobi matrix of the Hermite weight. The
    folded weights use the Christoffel function of the orthonormal Hermite
    functions, ``1 / sum_k psi_k(y_j)^2``, which stays O(1) at every node.
    """
    if node_count < 1:
        raise ValueError("node_count must be at least 1")
    if gauss_exponent <= 0:
        raise ValueError("gauss_exponent must be positive")
    m = int(node_count)
    if m == 1:
        y = np.zeros(1)
    else:
        off = np.sqrt(np.arange(1, m) / 2.0)
        y = eigh_tridiagonal(np.zeros(m), off, eigvals_only=True)
        y = 0.5 * (y - y[::-1])
    folded = 1.0 / np.sum(hermite_functions(m - 1, y) ** 2, axis=0)
    y.setflags(write=False)
    folded.setflags(write=False)
    return QuadRule(y, folded, float(gauss_exponent))


def make_quadrature(spec: BasisSpec, flux_degree: int) -> QuadRule:
    """Rule that integrates ``H_m^alpha * f(u)`` exactly for ``u`` in R_N.

    For a homogeneous polynomial flux of degree ``d`` the integrand is a
    polynomial of degree ``(d + 1) N + 1`` times ``exp(-(d + 1) alpha^2 x^2 / 2)``,
    for every ``m <= N + 1``.
    """
    if flux_degree < 1:
        raise ValueError(f"flux_degree must be >= 1, got {flux_degree}")
    c = (flux_degree + 1) * spec.alpha**2 / 2.0
    m = -(-((flux_degree + 1) * spec.n_max + 2) // 2) + 2
    return gauss_hermite(m, c)


def oversampled_quadrature(spec: BasisSpec, oversample: float = 2.0) -> QuadRule:
    """Fallback rule for non-polynomial fluxes: ``M = oversample (N + 1)``, ``c = alpha^2``."""
    m = max(1, int(np.ceil(oversample * spec.size)))
    return gauss_hermite(m, spec.alpha**2)


def analyze(f: Callable, spec: BasisSpec, rule: QuadRule) -> CoeffVec:
    """Fourier-Hermite coefficients ``int f H_n^alpha dx`` for ``n <= n_max``."""
    x = rule.points
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise ValueError(f"non-finite function value {fx[j]} at quadrature node x[{j}]={x[j]!r}")
    return CoeffVec(spec, eval_basis(spec, x) @ (rule.point_weights * fx))


def project(coeffs: CoeffVec, n: int) -> CoeffVec:
    """Orthogonal projection onto R_n (zero-extended when ``n`` exceeds ``n_max``)."""
    if n < 0:
        raise ValueError("projection degree must be nonnegative")
    out = np.zeros(n + 1)
    k = min(n, coeffs.n_max) + 1
    out[:k] = coeffs.values[:k]
    return CoeffVec(coeffs.spec.with_n_max(n), out)


# Array kernels. ``root_lam`` must hold sqrt(lambda_k) for k up to len(c).

def _root_lambda(alpha: float, n_max: int) -> np.ndarray:
    return np.sqrt(2.0 * alpha**2 * np.arange(n_max + 1, dtype=float))


def dx_array(c: np.ndarray, root_lam: np.ndarray) -> np.ndarray:
    n = c.shape[-1]
    out = np.zeros(c.shape[:-1] + (n + 1,))
    out[..., 1:] -= 0.5 * root_lam[1 : n + 1] * c
    out[..., : n - 1] += 0.5 * root_lam[1:n] * c[..., 1:]
    return out


def Dx_array(c: np.ndarray, root_lam: np.ndarray) -> np.ndarray:
    n = c.shape[-1]
    return root_lam[1:n] * c[..., 1:]


def x_array(c: np.ndarray, root_lam: np.ndarray, alpha: float) -> np.ndarray:
    n = c.shape[-1]
    s = 0.5 / alpha**2
    out = np.zeros(c.shape[:-1] + (n + 1,))
    out[..., 1:] += s * root_lam[1 : n + 1] * c
    out[..., : n - 1] += s * root_lam[1:n] * c[..., 1:]
    return out


def op_dx(coeffs: CoeffVec) -> CoeffVec:
    """Coefficients of ``d/dx u``; the result lives in R_{N+1}."""
    spec = coeffs.spec
    out = dx_array(coeffs.values, _root_lambda(spec.alpha, spec.n_max + 1))
    return CoeffVec(spec.with_n_max(spec.n_max + 1), out)


def op_Dx(coeffs: CoeffVec) -> CoeffVec:
    """Lowering operator ``d/dx + alpha^2 x``; the result lives in R_{N-1}.

    For N = 0 the result is the zero vector of R_0.
    """
    spec = coeffs.spec
    if spec.n_max == 0:
        return CoeffVec.zeros(spec)
    out = Dx_array(coeffs.values, _root_lambda(spec.alpha, spec.n_max))
    return CoeffVec(spec.with_n_max(spec.n_max - 1), out)


def op_x(coeffs: CoeffVec) -> CoeffVec:
    """Multiplication by ``x``; the result lives in R_{N+1}."""
    spec = coeffs.spec
    out = x_array(coeffs.values, _root_lambda(spec.alpha, spec.n_max + 1), spec.alpha)
    return CoeffVec(spec.with_n_max(spec.n_max + 1), out)


def op_Lalpha(coeffs: CoeffVec) -> CoeffVec:
    """Sturm-Liouville operator, diagonal with the eigenvalues ``lambda_n``."""
    return CoeffVec(coeffs.spec, coeffs.spec.eigenvalues() * coeffs.values)


def commutator_defect(coeffs: CoeffVec, n: int) -> CoeffVec:
    """``P_n d/dx phi - d/dx P_n phi`` for ``phi`` with modes through ``n + 1``.

    Only two entries survive: ``sqrt(lambda_{n+1}) / 2`` times ``phi_n`` at
    mode ``n + 1`` and times ``phi_{n+1}`` at mode ``n``.
    """
    if coeffs.n_max < n + 1:
        raise ValueError(f"need modes through {n + 1}, got n_max={coeffs.n_max}")
    phi = coeffs.values
    half = 0.5 * np.sqrt(2.0 * coeffs.spec.alpha**2 * (n + 1))
    out = np.zeros(n + 2)
    out[n + 1] = half * phi[n]
    out[n] = half * phi[n + 1]
    return CoeffVec(coeffs.spec.with_n_max(n + 1), out)
