"""Semi-discrete Hermite-Galerkin schemes for ``u_t + f(u)_x = 0`` on the line.

The state is the coefficient vector of ``u_N`` in R_N. The flux term is
``P_{N+1} f(u_N)`` computed by quadrature, differentiated into R_{N+2} and
tested against ``H_0 .. H_N``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .basis import BasisSpec, eval_basis
from .ode import StepSizeUnderflow, dopri45
from .transform import (
    CoeffVec,
    QuadRule,
    _root_lambda,
    analyze,
    dx_array,
    make_quadrature,
    oversampled_quadrature,
)
from .viscosity import (
    MultiplierSet,
    ViscosityKind,
    ViscositySpec,
    make_multipliers,
    scheme1_viscosity,
    scheme2_viscosity,
)


class NonFiniteError(FloatingPointError):
    """A right-hand-side stage produced NaN or inf."""

    def __init__(self, stage: str, t: float | None = None):
        self.stage = stage
        self.t = t
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(f"non-finite values in the {stage} stage{where}")


class IntegrationAborted(RuntimeError):
    """Integration stopped early; ``record`` holds every accepted step so far."""

    def __init__(self, message: str, record: "RunRecord"):
        super().__init__(message)
        self.record = record


@dataclass(frozen=True)
class PolynomialFlux:
    """``f(u) = sum_k coefficients[k] * u**k`` with ``f(0) = 0``."""

    coefficients: tuple = (0.0, 0.0, 0.5)

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.coefficients)
        if coeffs and coeffs[0] != 0.0:
            raise ValueError("flux must vanish at u = 0")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def terms(self) -> list[tuple[int, float]]:
        return [(k, a) for k, a in enumerate(self.coefficients) if k >= 1 and a != 0.0]

    @property
    def degree(self) -> int:
        return max((k for k, _ in self.terms), default=0)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for k, a in self.terms:
            out += a * u**k
        return out


BURGERS = PolynomialFlux((0.0, 0.0, 0.5))
ZERO_FLUX = PolynomialFlux(())

Flux = Union[PolynomialFlux, Callable[[np.ndarray], np.ndarray]]


def gaussian_profile(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2)


NAMED_PROFILES = {"gaussian": gaussian_profile}


@dataclass(frozen=True)
class SchemeConfig:
    basis: BasisSpec
    viscosity: ViscositySpec = field(default_factory=ViscositySpec)
    flux: Flux = BURGERS
    t_final: float = 1.5
    rel_tol: float = 1e-3
    abs_tol: float = 1e-6
    initial: Union[str, Callable, CoeffVec] = "gaussian"
    max_step: float | None = None
    oversample: float = 2.0

    def __post_init__(self):
        if not self.t_final >= 0:
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if isinstance(self.initial, str) and self.initial not in NAMED_PROFILES:
            raise ValueError(f"unknown initial profile {self.initial!r}")
        if self.viscosity.kind is ViscosityKind.HIGH_MODE_Q:
            self.viscosity.m(self.basis.n_max)

    @property
    def n(self) -> int:
        return self.basis.n_max

    @property
    def eps(self) -> float:
        return self.viscosity.eps(self.n)


@dataclass
class SolverState:
    t: float
    u: CoeffVec
    step_history: list = field(default_factory=list)


@dataclass
class RunRecord:
    """Accepted states of one integration run."""

    config: SchemeConfig
    times: np.ndarray
    states: np.ndarray
    step_sizes: np.ndarray
    wall_clock: float = 0.0
    nfev: int = 0
    n_rejected: int = 0
    status: str = "ok"
    message: str = ""

    @property
    def spec(self) -> BasisSpec:
        return self.config.basis

    @property
    def initial(self) -> CoeffVec:
        return CoeffVec(self.spec, self.states[0])

    @property
    def final(self) -> CoeffVec:
        return CoeffVec(self.spec, self.states[-1])

    def state(self, i: int) -> SolverState:
        return SolverState(float(self.times[i]), CoeffVec(self.spec, self.states[i]),
                           list(zip(self.times[1 : i + 1], self.step_sizes[:i])))


class _FluxQuadrature:
    """Basis values and weights at the nodes of one quadrature rule."""

    def __init__(self, spec: BasisSpec, rule: QuadRule):
        self.rule = rule
        self.weights = rule.point_weights
        # rows 0..N+1: P_{N+1} needs one mode beyond the state
        self.basis = eval_basis(spec.with_n_max(spec.n_max + 1), rule.points)
        self.synth = self.basis[: spec.size]


class GalerkinRHS:
    """Callable ``du/dt = F(t, u)`` for a fixed scheme configuration."""

    def __init__(self, cfg: SchemeConfig):
        self.cfg = cfg
        spec = cfg.basis
        self.spec = spec
        self.n = spec.n_max
        self._root_lam = _root_lambda(spec.alpha, self.n + 2)
        self._lam = spec.eigenvalues()
        self.eps = cfg.eps
        self.multipliers: MultiplierSet | None = None
        if cfg.viscosity.kind is ViscosityKind.HIGH_MODE_Q:
            self.multipliers = make_multipliers(
                self.n, cfg.viscosity.m(self.n), cfg.viscosity.multiplier_family
            )
        flux = cfg.flux
        if isinstance(flux, PolynomialFlux):
            # one exact rule per monomial, since each degree decays at its own rate
            self._terms = [(k, a, _FluxQuadrature(spec, make_quadrature(spec, k))) for k, a in flux.terms]
            self._generic = None
        else:
            self._terms = []
            self._generic = _FluxQuadrature(spec, oversampled_quadrature(spec, cfg.oversample))

    def initial_rule(self) -> QuadRule:
        flux = self.cfg.flux
        if isinstance(flux, PolynomialFlux):
            return make_quadrature(self.spec, max(flux.degree, 1))
        return self._generic.rule

    def flux_coefficients(self, u: np.ndarray, t: float | None = None) -> np.ndarray:
        """Coefficients of ``P_{N+1} f(u_N)``, modes ``0 .. N+1``."""
        # overflow is reported through NonFiniteError instead of a warning
        with np.errstate(over="ignore", invalid="ignore"):
            return self._flux_coefficients(u, t)

    def _flux_coefficients(self, u: np.ndarray, t: float | None) -> np.ndarray:
        out = np.zeros(self.n + 2)
        if self._generic is not None:
            q = self._generic
            un = u @ q.synth
            if not np.all(np.isfinite(un)):
                raise NonFiniteError("synthesis", t)
            fu = np.asarray(self.cfg.flux(un), dtype=float)
            if not np.all(np.isfinite(fu)):
                raise NonFiniteError("flux", t)
            out += q.basis @ (q.weights * fu)
        for k, a, q in self._terms:
            un = u @ q.synth
            if not np.all(np.isfinite(un)):
                raise NonFiniteError("synthesis", t)
            fu = a * un**k
            if not np.all(np.isfinite(fu)):
                raise NonFiniteError("flux", t)
            out += q.basis @ (q.weights * fu)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("analysis", t)
        return out

    def flux_term(self, u: np.ndarray, t: float | None = None) -> np.ndarray:
        """``-d/dx P_{N+1} f(u_N)`` tested against ``H_0 .. H_N``."""
        if not self._terms and self._generic is None:
            return np.zeros(self.n + 1)
        fh = self.flux_coefficients(u, t)
        return -dx_array(fh, self._root_lam)[: self.n + 1]

    def viscosity_term(self, u: np.ndarray) -> np.ndarray:
        kind = self.cfg.viscosity.kind
        if kind is ViscosityKind.STURM_LIOUVILLE:
            return -self.eps * self._lam * u
        if kind is ViscosityKind.HIGH_MODE_Q:
            return scheme1_viscosity(CoeffVec(self.spec, u), self.multipliers, self.eps).values
        return np.zeros_like(u)

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        du = self.flux_term(u, t)
        du = du + self.viscosity_term(u)
        if not np.all(np.isfinite(du)):
            raise NonFiniteError("viscosity", t)
        return du


def initial_coefficients(cfg: SchemeConfig, rhs: GalerkinRHS | None = None) -> CoeffVec:
    """``P_N u_0`` using the run's own flux quadrature rule."""
    init = cfg.initial
    if isinstance(init, CoeffVec):
        if init.spec.alpha != cfg.basis.alpha:
            raise ValueError("initial coefficients use a different scaling factor")
        vals = np.zeros(cfg.basis.size)
        k = min(init.spec.size, cfg.basis.size)
        vals[:k] = init.values[:k]
        return CoeffVec(cfg.basis, vals)
    f = NAMED_PROFILES[init] if isinstance(init, str) else init
    rhs = rhs or GalerkinRHS(cfg)
    return analyze(f, cfg.basis, rhs.initial_rule())


def rhs(state: SolverState, cfg: SchemeConfig) -> CoeffVec:
    """Time derivative of the coefficients for the given configuration."""
    return CoeffVec(cfg.basis, GalerkinRHS(cfg)(state.t, np.asarray(state.u.values)))


def integrate(cfg: SchemeConfig) -> RunRecord:
    """Advance ``P_N u_0`` to ``cfg.t_final`` and record every accepted step.

    Raises
    ------
    IntegrationAborted
        On step-size underflow or non-finite values; ``exc.record`` keeps the
        states accepted before the failure.
    """
    start = time.perf_counter()
    f = GalerkinRHS(cfg)
    u0 = initial_coefficients(cfg, f).values

    def make_record(res, status="ok", message=""):
        return RunRecord(
            config=cfg,
            times=np.asarray(res.t, dtype=float),
            states=np.asarray(res.y, dtype=float),
            step_sizes=np.asarray(res.h, dtype=float),
            wall_clock=time.perf_counter() - start,
            nfev=res.nfev,
            n_rejected=res.n_rejected,
            status=status,
            message=message,
        )

    try:
        res = dopri45(f, (0.0, cfg.t_final), u0, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                      max_step=cfg.max_step)
    except (StepSizeUnderflow, NonFiniteError) as exc:
        record = make_record(exc.partial, "aborted", str(exc))
        raise IntegrationAborted(str(exc), record) from exc
    return make_record(res)


def sweep_configs(base: SchemeConfig, ns: Sequence[int]) -> list[SchemeConfig]:
    return [replace(base, basis=base.basis.with_n_max(n)) for n in ns]
