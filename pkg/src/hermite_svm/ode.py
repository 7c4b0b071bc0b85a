"""Dormand-Prince 5(4) integrator with PI step-size control.

The error test follows the mixed absolute/relative max-norm used by common
``ode45`` implementations: a step is accepted when
``h * max_i |err_i| / max(|y_i|, |y_new_i|, atol / rtol) <= rtol``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# fifth-order minus embedded fourth-order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_ORDER = 5
_SAFETY = 0.9
_BETA1 = 0.7 / _ORDER
_BETA2 = 0.4 / _ORDER
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class StepSizeUnderflow(RuntimeError):
    pass


@dataclass
class ODEResult:
    t: list = field(default_factory=list)
    y: list = field(default_factory=list)
    h: list = field(default_factory=list)
    nfev: int = 0
    n_rejected: int = 0
    success: bool = True
    message: str = ""


def initial_step(y0, f0, rtol, atol, span, max_step):
    """Step-size guess from the scaled size of the initial slope."""
    threshold = atol / rtol
    h = min(max_step, span)
    rh = np.max(np.abs(f0) / np.maximum(np.abs(y0), threshold)) / (0.8 * rtol ** (1 / _ORDER))
    if h * rh > 1:
        h = 1.0 / rh
    return h


def dopri45(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0,
    rtol: float = 1e-3,
    atol: float = 1e-6,
    max_step: float | None = None,
    first_step: float | None = None,
    min_step_fraction: float = 1e-12,
    check_finite: bool = True,
) -> ODEResult:
    """Integrate ``y' = fun(t, y)`` over ``t_span``, recording every accepted step.

    Exceptions raised by ``fun`` propagate after the partial history has been
    attached to them as ``exc.partial``. A step size below
    ``min_step_fraction * (t1 - t0)`` raises :class:`StepSizeUnderflow`.
    """
    t0, t1 = map(float, t_span)
    y = np.array(y0, dtype=float)
    res = ODEResult(t=[t0], y=[y.copy()], h=[])
    span = t1 - t0
    if span <= 0:
        return res
    if max_step is None:
        max_step = 0.1 * span
    h_min = min_step_fraction * span
    threshold = atol / rtol

    def call(t, yy):
        res.nfev += 1
        return np.asarray(fun(t, yy), dtype=float)

    try:
        f = call(t0, y)
        h = first_step if first_step is not None else initial_step(y, f, rtol, atol, span, max_step)
        h = min(h, max_step)
        t = t0
        err_prev = 1.0
        k = np.empty((7,) + y.shape)
        while t < t1:
            if h < h_min:
                raise StepSizeUnderflow(f"step size {h:.3e} below {h_min:.3e} at t={t:.6g}")
            if t + 1.1 * h >= t1:
                h = t1 - t
            rejected_here = False
            while True:
                k[0] = f
                for s in range(1, 7):
                    ys = y + h * np.tensordot(_A[s], k[:s], axes=(0, 0))
                    k[s] = call(t + _C[s] * h, ys)
                y_new = ys  # FSAL: the last stage is the fifth-order solution
                scale = np.maximum(np.maximum(np.abs(y), np.abs(y_new)), threshold)
                err = h * np.max(np.abs(np.tensordot(_E, k, axes=(0, 0))) / scale) / rtol
                if check_finite and not np.all(np.isfinite(y_new)):
                    err = np.inf
                if err <= 1.0:
                    break
                res.n_rejected += 1
                if not np.isfinite(err):
                    h *= _MIN_FACTOR
                else:
                    h *= max(_MIN_FACTOR / 2, _SAFETY * err ** (-1 / _ORDER))
                rejected_here = True
                if h < h_min:
                    raise StepSizeUnderflow(f"step size {h:.3e} below {h_min:.3e} at t={t:.6g}")
            t_new = t1 if t + h >= t1 else t + h
            res.h.append(t_new - t)
            t, y, f = t_new, y_new, k[6].copy()
            res.t.append(t)
            res.y.append(y.copy())
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_BETA1) * err_prev ** _BETA2
            fac = min(_MAX_FACTOR, max(_MIN_FACTOR, fac))
            if rejected_here:
                fac = min(fac, 1.0)
            err_prev = err
            h = min(h * fac, max_step)
    except Exception as exc:
        res.success = False
        res.message = str(exc)
        exc.partial = res
        raise
    return res
