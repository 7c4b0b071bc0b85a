"""Spectral viscosity operators and their N-dependent parameter laws."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .transform import CoeffVec, Dx_array, _root_lambda, dx_array


class ViscosityKind(str, enum.Enum):
    NONE = "none"
    HIGH_MODE_Q = "high_mode_q"
    STURM_LIOUVILLE = "sturm_liouville"


class MultiplierFamily(str, enum.Enum):
    RATIONAL = "rational"


@dataclass(frozen=True)
class ViscositySpec:
    """Scheme selector plus the power laws ``eps_N`` and ``m_N``.

    ``eps_N = eps_coeff * N**eps_exp`` and
    ``m_N = floor(m_coeff * N**m_exp)`` clamped to ``[1, N - 1]``.
    """

    kind: ViscosityKind = ViscosityKind.STURM_LIOUVILLE
    eps_coeff: float = 0.05
    eps_exp: float = -0.33
    m_coeff: float = 5.0
    m_exp: float = 0.16
    multiplier_family: MultiplierFamily = MultiplierFamily.RATIONAL

    def __post_init__(self):
        object.__setattr__(self, "kind", ViscosityKind(self.kind))
        object.__setattr__(self, "multiplier_family", MultiplierFamily(self.multiplier_family))
        if self.kind is not ViscosityKind.NONE and not self.eps_coeff > 0:
            raise ValueError(f"eps_coeff must be positive, got {self.eps_coeff}")
        if self.kind is ViscosityKind.HIGH_MODE_Q and not self.m_coeff > 0:
            raise ValueError(f"m_coeff must be positive, got {self.m_coeff}")

    @classmethod
    def none(cls) -> "ViscositySpec":
        return cls(kind=ViscosityKind.NONE)

    @classmethod
    def high_mode(cls, eps_coeff=0.5, eps_exp=-0.33, m_coeff=5.0, m_exp=0.16) -> "ViscositySpec":
        return cls(ViscosityKind.HIGH_MODE_Q, eps_coeff, eps_exp, m_coeff, m_exp)

    @classmethod
    def sturm_liouville(cls, eps_coeff=0.05, eps_exp=-0.33) -> "ViscositySpec":
        return cls(ViscosityKind.STURM_LIOUVILLE, eps_coeff, eps_exp)

    def eps(self, n: int) -> float:
        if self.kind is ViscosityKind.NONE:
            return 0.0
        return self.eps_coeff * float(n) ** self.eps_exp

    def m(self, n: int) -> int:
        if n < 2:
            raise ValueError(f"the high-mode operator needs N >= 2, got {n}")
        raw = math.floor(self.m_coeff * float(n) ** self.m_exp)
        return int(min(max(raw, 1), n - 1))


@dataclass(frozen=True, eq=False)
class MultiplierSet:
    q: np.ndarray
    m: int

    @property
    def n_max(self) -> int:
        return self.q.size - 1


def make_multipliers(
    n: int, m: int, family: MultiplierFamily | str = MultiplierFamily.RATIONAL
) -> MultiplierSet:
    """Multipliers ``q_k = N / (N - m) * (1 - m / k)`` for ``k > m``, zero below.

    ``q_N`` comes out as exactly 1.
    """
    MultiplierFamily(family)
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m_N < N, got m_N={m}, N={n}")
    k = np.arange(n + 1, dtype=float)
    q = np.zeros(n + 1)
    hi = k > m
    q[hi] = n / (n - m) * (1.0 - m / k[hi])
    q[n] = 1.0
    q.setflags(write=False)
    return MultiplierSet(q, int(m))


def apply_Q(coeffs: CoeffVec, mult: MultiplierSet) -> CoeffVec:
    if mult.q.size != coeffs.spec.size:
        raise ValueError(f"{mult.q.size} multipliers for {coeffs.spec.size} coefficients")
    return CoeffVec(coeffs.spec, mult.q * coeffs.values)


def apply_R(coeffs: CoeffVec, mult: MultiplierSet) -> CoeffVec:
    """Complement ``I - Q``."""
    return coeffs - apply_Q(coeffs, mult)


def scheme1_viscosity(coeffs: CoeffVec, mult: MultiplierSet, eps: float) -> CoeffVec:
    """``eps * d/dx D_x Q u``, which lands back in R_N without truncation."""
    spec = coeffs.spec
    if spec.n_max == 0:
        return CoeffVec.zeros(spec)
    root_lam = _root_lambda(spec.alpha, spec.n_max + 1)
    qu = mult.q * coeffs.values
    return CoeffVec(spec, eps * dx_array(Dx_array(qu, root_lam), root_lam))


def scheme2_viscosity(coeffs: CoeffVec, eps: float) -> CoeffVec:
    """Right-hand-side contribution ``-eps * L_alpha u``."""
    return CoeffVec(coeffs.spec, -eps * coeffs.spec.eigenvalues() * coeffs.values)
