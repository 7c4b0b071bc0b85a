"""Reference solutions for inviscid Burgers with ``u_0(x) = exp(-x^2)``.

Before the shock the solution follows from characteristics,
``u(eta + t exp(-eta^2), t) = exp(-eta^2)``. After it a fine first-order
Godunov solution serves as ground truth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def shock_time() -> float:
    """Breaking time ``sqrt(e / 2)`` of the Gaussian initial profile."""
    return math.sqrt(math.e / 2.0)


@dataclass(frozen=True)
class CharacteristicSolution:
    t: float = 0.0
    newton_tol: float = 1e-14
    max_iter: int = 200

    def __post_init__(self):
        if not 0 <= self.t < shock_time():
            raise ValueError(f"characteristics are single-valued only for 0 <= t < {shock_time():.6f}")

    def __call__(self, x):
        return exact_pre_shock(x, self.t, self)


def foot_points(x, t: float, newton_tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
    """Solve ``eta + t exp(-eta^2) = x`` by Newton safeguarded with bisection.

    The root is bracketed by ``[x - t, x]`` because ``0 < exp(-eta^2) <= 1``.
    """
    x = np.asarray(x, dtype=float)
    lo = x - t
    hi = x.copy()
    eta = x - t * np.exp(-x * x)
    eta = np.clip(eta, lo, hi)
    for _ in range(max_iter):
        g = eta + t * np.exp(-eta * eta) - x
        done = np.abs(g) <= newton_tol * np.maximum(1.0, np.abs(x))
        if np.all(done):
            return eta
        # g is increasing pre-shock, so the sign of g updates the bracket
        neg = g < 0
        lo = np.where(neg, eta, lo)
        hi = np.where(neg, hi, eta)
        dg = 1.0 - 2.0 * t * eta * np.exp(-eta * eta)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = eta - g / dg
        ok = np.isfinite(step) & (step > lo) & (step < hi)
        eta = np.where(done, eta, np.where(ok, step, 0.5 * (lo + hi)))
    g = eta + t * np.exp(-eta * eta) - x
    worst = float(np.max(np.abs(g)))
    raise RuntimeError(f"characteristic solve did not converge in {max_iter} iterations, residual {worst:.3e}")


def exact_pre_shock(x, t: float, sol: CharacteristicSolution | None = None):
    """Exact solution at time ``t < T*`` evaluated at ``x``."""
    if sol is None:
        sol = CharacteristicSolution(t)
    if not 0 <= t < shock_time():
        raise ValueError(f"t={t} is not before the shock time {shock_time():.6f}")
    eta = foot_points(x, t, sol.newton_tol, sol.max_iter)
    out = np.exp(-eta * eta)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class FVOracle:
    half_width: float = 10.0
    cell_count: int = 20001
    cfl: float = 0.45

    def __post_init__(self):
        if self.cell_count < 3 or self.cell_count % 2 == 0:
            raise ValueError(f"cell_count must be odd and >= 3, got {self.cell_count}")
        if not 0 < self.cfl <= 0.9:
            raise ValueError(f"cfl must lie in (0, 0.9], got {self.cfl}")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.cell_count

    @property
    def centers(self) -> np.ndarray:
        return -self.half_width + self.dx * (np.arange(self.cell_count) + 0.5)


@dataclass(frozen=True, eq=False)
class FVProfile:
    grid: np.ndarray
    values: np.ndarray
    t: float
    mass_history: np.ndarray | None = None

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)


def godunov_flux(ul, ur):
    """Exact Riemann-solver flux for ``f(u) = u^2 / 2``."""
    fl = 0.5 * ul * ul
    fr = 0.5 * ur * ur
    shock = np.where(ul + ur > 0, fl, fr)
    fan = np.where(ul > 0, fl, np.where(ur < 0, fr, 0.0))
    return np.where(ul > ur, shock, fan)


def fv_reference(t: float, oracle: FVOracle = FVOracle(), track_mass: bool = False) -> FVProfile:
    """First-order Godunov solution on ``[-L, L]`` with outflow boundaries."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = oracle.centers
    dx = oracle.dx
    u = np.exp(-x * x)
    masses = [u.sum() * dx] if track_mass else None
    now = 0.0
    while now < t:
        speed = max(float(np.max(np.abs(u))), 1e-12)
        dt = min(oracle.cfl * dx / speed, t - now)
        ue = np.concatenate(([u[0]], u, [u[-1]]))
        flux = godunov_flux(ue[:-1], ue[1:])
        u = u - (dt / dx) * (flux[1:] - flux[:-1])
        now = t if dt == t - now else now + dt
        if track_mass:
            masses.append(u.sum() * dx)
    return FVProfile(x, u, t, None if masses is None else np.asarray(masses))


def front_location(grid, values) -> float:
    """Midpoint of the steepest downward jump of a sampled profile."""
    values = np.asarray(values)
    i = int(np.argmin(np.diff(values)))
    return 0.5 * (grid[i] + grid[i + 1])
