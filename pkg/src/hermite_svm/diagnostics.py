"""Norms of Hermite series, their time integrals, and growth-rate fits."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .basis import eval_basis
from .transform import CoeffVec, _root_lambda, op_x, x_array

DEFAULT_GRID_L = 10.0
DEFAULT_GRID_DX = 0.01


class NormLabel(str, enum.Enum):
    L2 = "L2"
    DxL2 = "DxL2"
    xL2 = "xL2"
    x2L1 = "x2L1"


def norm_L2(u: CoeffVec) -> float:
    return float(np.sqrt(np.sum(np.square(u.values))))


def norm_Dx(u: CoeffVec) -> float:
    """``||D_x u||``; the images ``D_x H_n`` are orthogonal with norms ``lambda_n``."""
    return float(np.sqrt(np.sum(u.spec.eigenvalues() * np.square(u.values))))


def norm_xweighted(u: CoeffVec) -> float:
    """``||x u||`` via the exact coefficients of ``x u`` in R_{N+1}."""
    return norm_L2(op_x(u))


def equidistant_grid(L: float = DEFAULT_GRID_L, dx: float = DEFAULT_GRID_DX) -> np.ndarray:
    if L <= 0 or dx <= 0:
        raise ValueError("grid half-width and spacing must be positive")
    n = int(round(2 * L / dx))
    return np.linspace(-L, L, n + 1)


def norm_x2_L1(u: CoeffVec, L: float = DEFAULT_GRID_L, dx: float = DEFAULT_GRID_DX) -> float:
    """Trapezoid approximation of ``int |x^2 u(x)| dx`` over ``[-L, L]``."""
    x = equidistant_grid(L, dx)
    vals = np.asarray(u.values) @ eval_basis(u.spec, x)
    return float(np.trapezoid(np.abs(x * x * vals), x))


@dataclass(frozen=True, eq=False)
class NormSeries:
    times: np.ndarray
    values: np.ndarray
    label: NormLabel

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-D of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("norm values must be nonnegative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "label", NormLabel(self.label))


def time_integrate(series: NormSeries) -> float:
    """Trapezoid rule over the series' own time grid.

    L2-type labels are squared first, giving ``||.||^2_{L^2(0,T;L^2)}``;
    the ``x2L1`` label is integrated as is, giving a space-time L1 norm.
    """
    if series.times.size < 2:
        raise ValueError("need at least two samples to integrate in time")
    v = series.values if series.label is NormLabel.x2L1 else series.values**2
    return float(np.trapezoid(v, series.times))


def norm_series(record, label: NormLabel | str, L: float = DEFAULT_GRID_L,
                dx: float = DEFAULT_GRID_DX) -> NormSeries:
    """Norm of every accepted state of a :class:`~hermite_svm.solver.RunRecord`."""
    label = NormLabel(label)
    spec = record.spec
    states = np.asarray(record.states)
    if label is NormLabel.L2:
        vals = np.sqrt(np.sum(states**2, axis=1))
    elif label is NormLabel.DxL2:
        vals = np.sqrt(np.sum(spec.eigenvalues() * states**2, axis=1))
    elif label is NormLabel.xL2:
        xu = x_array(states, _root_lambda(spec.alpha, spec.n_max + 1), spec.alpha)
        vals = np.sqrt(np.sum(xu**2, axis=1))
    else:
        x = equidistant_grid(L, dx)
        u = states @ eval_basis(spec, x)
        vals = np.trapezoid(np.abs(x * x * u), x, axis=1)
    return NormSeries(record.times, vals, label)


def integrated_norms(record, L: float = DEFAULT_GRID_L, dx: float = DEFAULT_GRID_DX) -> dict:
    """Time-integrated value of every norm label for one run."""
    if len(record.times) < 2:
        return {lab.value: 0.0 for lab in NormLabel}
    return {lab.value: time_integrate(norm_series(record, lab, L, dx)) for lab in NormLabel}


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    prefactor: float
    residual: float

    def __call__(self, n):
        return self.prefactor * np.asarray(n, dtype=float) ** self.exponent


def fit_growth(points: Iterable[tuple[float, float]]) -> GrowthFit:
    """Least-squares line through ``(log N, log value)``; returns ``value ~ c N^p``."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (N, value) points")
    n, v = pts[:, 0], pts[:, 1]
    if np.any(n <= 0) or np.any(v <= 0):
        raise ValueError("growth fits need positive N and positive values")
    ln, lv = np.log(n), np.log(v)
    (p, b), res, *_ = np.polyfit(ln, lv, 1, full=True)
    resid = float(res[0]) if len(res) else 0.0
    return GrowthFit(float(p), float(np.exp(b)), resid)


def total_variation(values) -> float:
    return float(np.sum(np.abs(np.diff(np.asarray(values, dtype=float)))))


def profile_errors(x, u, u_ref, front: float | None = None, front_halfwidth: float = 0.25) -> dict:
    """L1/L2 distances, the oscillation indicator, and the front-region L1 error.

    The oscillation indicator is ``TV(u) - TV(u_ref)``; the front region is
    ``|x - front| <= front_halfwidth``.
    """
    x = np.asarray(x, dtype=float)
    err = np.abs(np.asarray(u) - np.asarray(u_ref))
    out = {
        "L1": float(np.trapezoid(err, x)),
        "L2": float(np.sqrt(np.trapezoid(err**2, x))),
        "Linf": float(err.max()),
        "oscillation_indicator": total_variation(u) - total_variation(u_ref),
    }
    if front is not None:
        mask = np.abs(x - front) <= front_halfwidth
        out["front"] = float(front)
        out["front_L1"] = float(np.trapezoid(np.where(mask, err, 0.0), x))
        out["smooth_L1"] = out["L1"] - out["front_L1"]
    return out
