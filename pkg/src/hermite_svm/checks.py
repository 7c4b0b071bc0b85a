"""Standalone property checks for the basis, quadrature and operators."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, eval_basis
from .transform import (
    CoeffVec,
    QuadRule,
    analyze,
    commutator_defect,
    gauss_hermite,
    make_quadrature,
    op_Dx,
    op_dx,
    op_Lalpha,
    op_x,
    project,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}){extra}"


def orthonormality_defect(spec: BasisSpec, rule: QuadRule) -> tuple[float, tuple[int, int]]:
    """Largest ``|<H_m, H_n> - delta_mn|`` under ``rule`` and where it occurs."""
    h = eval_basis(spec, rule.points)
    gram = (h * rule.point_weights) @ h.T
    dev = np.abs(gram - np.eye(spec.size))
    m, n = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[m, n]), (int(m), int(n))


def dx_orthogonality_defect(spec: BasisSpec, rule: QuadRule) -> tuple[float, tuple[int, int]]:
    """Largest ``|<D_x H_m, D_x H_n> - lambda_n delta_mn|`` from pointwise values."""
    x = rule.points
    h = eval_basis(spec.with_n_max(spec.n_max + 1), x)
    n = np.arange(spec.size)
    lam = spec.eigenvalues(spec.n_max + 1)
    # pointwise derivative from the ladder relation, then add alpha^2 x
    d = np.zeros((spec.size, x.size))
    d += 0.5 * np.sqrt(lam[n + 1])[:, None] * -h[n + 1]
    d[1:] += 0.5 * np.sqrt(lam[1 : spec.size])[:, None] * h[: spec.n_max]
    dd = d + spec.alpha**2 * x * h[: spec.size]
    gram = (dd * rule.point_weights) @ dd.T
    dev = np.abs(gram - np.diag(lam[: spec.size])) / np.maximum(1.0, lam[: spec.size].max())
    m, k = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[m, k]), (int(m), int(k))


def operator_identity_defect(spec: BasisSpec, rng: np.random.Generator) -> float:
    """Worst violation of the exact coefficient-space identities for random input."""
    u = CoeffVec(spec, rng.standard_normal(spec.size))
    a2 = spec.alpha**2
    worst = 0.0
    lhs = project(op_Dx(u), spec.n_max + 1).values
    rhs = (op_dx(u) + a2 * op_x(u)).values
    worst = max(worst, np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))
    lam = spec.eigenvalues()
    worst = max(worst, np.max(np.abs(op_Lalpha(u).values - lam * u.values)))
    if spec.n_max >= 1:
        n = spec.n_max - 1
        direct = (project(op_dx(u), n) - op_dx(project(u, n))).values
        formula = commutator_defect(u, n).values
        worst = max(worst, np.max(np.abs(direct - formula)) / max(1.0, np.max(np.abs(formula))))
    v = CoeffVec(spec, rng.standard_normal(spec.size))
    lhs_ip = op_Lalpha(u).dot(v)
    rhs_ip = op_Dx(u).dot(op_Dx(v))
    worst = max(worst, abs(lhs_ip - rhs_ip) / max(1.0, abs(rhs_ip)))
    return float(worst)


def projection_tail(u_fn, spec: BasisSpec, rule: QuadRule, ns) -> dict:
    """``||u - P_N u||`` for each ``N`` in ``ns`` from coefficients through ``spec.n_max``."""
    c = analyze(u_fn, spec, rule).values
    sq = np.square(c)
    return {n: float(np.sqrt(np.sum(sq[n + 1 :]))) for n in ns}


def projection_decay_slope(ns=(8, 16, 32, 64)) -> float:
    """Log-log slope of the projection error of ``exp(-x^2/2) sin x`` with alpha = 1."""
    spec = BasisSpec(1.0, 2 * max(ns))
    rule = gauss_hermite(4 * max(ns), 0.5)
    tails = projection_tail(lambda x: np.exp(-x * x / 2) * np.sin(x), spec, rule, ns)
    y = np.log(np.maximum([tails[n] for n in ns], 1e-300))
    return float(np.polyfit(np.log(ns), y, 1)[0])


@dataclass
class BasisCheckConfig:
    alphas: tuple = (1.0, math.sqrt(2.0), 3.0)
    n_values: tuple = (10, 40, 80)
    tolerance: float = 1e-10
    identity_tolerance: float = 1e-12
    node_deficit: int = 0
    seed: int = 0


def run_basis_checks(cfg: BasisCheckConfig | None = None) -> list[CheckResult]:
    """Run every check; ``node_deficit`` removes nodes to provoke failures."""
    cfg = cfg or BasisCheckConfig()
    rng = np.random.default_rng(cfg.seed)
    results = []
    for alpha in cfg.alphas:
        for n in cfg.n_values:
            spec = BasisSpec(alpha, n)
            rule = make_quadrature(spec, 1)
            if cfg.node_deficit:
                rule = gauss_hermite(max(1, rule.node_count - cfg.node_deficit), rule.gauss_exponent)
            tag = f"alpha={alpha:.4g}, N={n}"
            d, (i, j) = orthonormality_defect(spec, rule)
            results.append(CheckResult(f"orthonormality [{tag}]", d < cfg.tolerance, d,
                                       cfg.tolerance, f"worst pair (m, n)=({i}, {j})"))
            d, (i, j) = dx_orthogonality_defect(spec, rule)
            results.append(CheckResult(f"D_x orthogonality [{tag}]", d < cfg.tolerance, d,
                                       cfg.tolerance, f"worst pair (m, n)=({i}, {j})"))
            d = operator_identity_defect(spec, rng)
            results.append(CheckResult(f"operator identities [{tag}]", d < cfg.identity_tolerance,
                                       d, cfg.identity_tolerance))
    slope = projection_decay_slope()
    results.append(CheckResult("projection decay slope", slope < -2.0, slope, -2.0,
                               "must be steeper than N^(-m/2) for m <= 4"))
    return results
