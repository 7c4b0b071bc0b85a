"""Acceptance criteria, one test and one PASS/FAIL line each.

Tolerances are fixed here and never adjusted to make a run pass. The table
criteria retry once at rel_tol=1e-6, abs_tol=1e-9 when the default integrator
tolerances miss the bands.
"""
import math
import time
from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from conftest import ACCEPTANCE_LINES
from hermite_svm.basis import BasisSpec
from hermite_svm.checks import BasisCheckConfig, run_basis_checks
from hermite_svm.cli import RunConfig, compare_errors, sweep_rows
from hermite_svm.diagnostics import fit_growth, norm_Dx, norm_L2
from hermite_svm.reference import exact_pre_shock, fv_reference, shock_time
from hermite_svm.solver import ZERO_FLUX, SchemeConfig, integrate
from hermite_svm.transform import CoeffVec
from hermite_svm.viscosity import ViscositySpec

NS = [40, 45, 50, 55, 60, 65, 70]
RETRY_TOLS = (1e-6, 1e-9)

TABLE1 = {
    "DxL2": [3.0621, 3.1076, 3.1504, 3.1926, 3.2350, 3.2766, 3.3145],
    "xL2": [0.9690, 0.9682, 0.9676, 0.9671, 0.9667, 0.9665, 0.9664],
    "L2": [1.8756, 1.8757, 1.8758, 1.8759, 1.8760, 1.8762, 1.8763],
}
TABLE1_BANDS = {"DxL2": 0.08, "xL2": 0.03, "L2": 0.02}
TABLE2 = {
    "DxL2": [4.4442, 4.5220, 4.5099, 4.4977, 4.6272, 4.9252, 5.1875],
    "L2": [1.8829, 1.8824, 1.8814, 1.8805, 1.8804, 1.8812, 1.8819],
    "x2L1": [1.9499, 1.9153, 1.8911, 1.8671, 1.8657, 1.8844, 1.8791],
}
TABLE2_BANDS = {"DxL2": 0.10, "L2": 0.02, "x2L1": 0.05}
EXPONENTS = {
    "high_mode_q": {"DxL2": 0.1420, "xL2": -0.0049, "L2": 0.0007},
    "sturm_liouville": {"DxL2": 0.2431, "L2": -0.0014, "x2L1": -0.0639},
}
EXPONENT_BAND = 0.08


def report(name: str, passed: bool, detail: str):
    line = f"{'PASS' if passed else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@lru_cache(maxsize=None)
def table(scheme: str, tols: tuple | None = None) -> dict:
    kw = {} if tols is None else {"rel_tol": tols[0], "abs_tol": tols[1]}
    rows = sweep_rows(RunConfig(scheme=scheme, sweep_Ns=NS, **kw))
    assert all(r["status"] == "ok" for r in rows)
    return {col: [r[col] for r in rows] for col in ("DxL2", "xL2", "L2", "x2L1")}


def band_failures(got: dict, want: dict, bands: dict) -> list[str]:
    bad = []
    for col, ref in want.items():
        for n, g, w in zip(NS, got[col], ref):
            rel = (g - w) / w
            if abs(rel) > bands[col]:
                bad.append(f"{col}@N={n} {g:.4f} vs {w:.4f} ({rel:+.1%})")
    return bad


def table_criterion(name, scheme, want, bands):
    t0 = time.perf_counter()
    first = band_failures(table(scheme), want, bands)
    bad, tols = first, None
    if first:
        tols = RETRY_TOLS
        bad = band_failures(table(scheme, tols), want, bands)
    label = "default tolerances" if tols is None else (
        f"default tolerances miss {len(first)}, retry rel_tol={tols[0]:g}, abs_tol={tols[1]:g}")
    detail = (f"{label}; {len(bad)} of {len(want) * len(NS)} entries outside bands"
              + (f" [{'; '.join(bad)}]" if bad else "")
              + f" ({time.perf_counter() - t0:.1f}s)")
    return report(name, not bad, detail)


def test_criterion_1_table_scheme_high_mode():
    assert table_criterion("1 high-mode viscosity table", "high_mode_q", TABLE1, TABLE1_BANDS)


def test_criterion_2_table_scheme_sturm_liouville():
    assert table_criterion("2 Sturm-Liouville viscosity table", "sturm_liouville", TABLE2, TABLE2_BANDS)


def exponent_failures(scheme, tols):
    got = table(scheme, tols)
    bad, parts = [], []
    for col, ref in EXPONENTS[scheme].items():
        p = fit_growth(zip(NS, got[col])).exponent
        parts.append(f"{col} {p:+.4f} vs {ref:+.4f}")
        if abs(p - ref) > EXPONENT_BAND:
            bad.append(col)
    return bad, parts


def test_criterion_3_growth_exponents():
    details, all_ok = [], True
    for scheme in EXPONENTS:
        for tols in (None, RETRY_TOLS):
            bad, parts = exponent_failures(scheme, tols)
            if not bad:
                break
        all_ok &= not bad
        label = "default" if tols is None else "retry"
        details.append(f"{scheme} ({label}): " + ", ".join(parts))
    assert report("3 growth exponents within 0.08", all_ok, "; ".join(details))


def test_criterion_4_shock_time():
    res = minimize_scalar(lambda x: -2 * x * math.exp(-x * x), bounds=(0.0, 3.0), method="bounded",
                          options={"xatol": 1e-12})
    numeric = -1.0 / res.fun
    diff = abs(shock_time() - numeric)
    ok = abs(shock_time() - math.sqrt(math.e / 2)) == 0.0 and diff < 1e-10
    assert report("4 shock time", ok, f"T*={shock_time():.12f}, |T* - numeric|={diff:.1e}")


def test_criterion_5_basis_property_suite():
    t0 = time.perf_counter()
    cfg = BasisCheckConfig(alphas=(1.0, math.sqrt(2.0), 3.0), n_values=(1, 5, 10, 20, 40, 60, 80),
                           tolerance=1e-10, identity_tolerance=1e-12)
    results = run_basis_checks(cfg)
    elapsed = time.perf_counter() - t0
    failed = [r.name for r in results if not r.passed]
    worst = max(r.value for r in results if "orthogonality" in r.name or "orthonormality" in r.name)
    ok = not failed and elapsed < 10.0
    assert report("5 basis property suite", ok,
                  f"{len(results) - len(failed)}/{len(results)} checks, worst Gram defect {worst:.1e},"
                  f" {elapsed:.1f}s" + (f" failed: {failed}" if failed else ""))


def test_criterion_6_energy_laws():
    spec = BasisSpec(math.sqrt(2.0), 40)
    visc = ViscositySpec.sturm_liouville()
    # zero-flux decay of a single mode
    n = 7
    cfg = SchemeConfig(spec, visc, flux=ZERO_FLUX, rel_tol=1e-6, abs_tol=1e-9, initial=CoeffVec.unit(spec, n))
    rec = integrate(cfg)
    decay_err = float(np.abs(rec.states[:, n] - np.exp(-cfg.eps * spec.eigenvalues()[n] * rec.times)).max())
    # monotone norm at the default integrator settings
    rec = integrate(SchemeConfig(spec, visc))
    norms = np.sqrt(np.sum(rec.states**2, axis=1))
    max_rise = float(np.max(np.diff(norms)))
    # energy inequality; the trapezoid rule needs a fine time grid to resolve 1e-6
    rec = integrate(SchemeConfig(spec, visc, rel_tol=1e-9, abs_tol=1e-12))
    d2 = np.array([norm_Dx(CoeffVec(spec, u)) ** 2 for u in rec.states])
    u0_sq = math.sqrt(math.pi / 2)
    slack = u0_sq - (norm_L2(rec.final) ** 2 + 2 * rec.config.eps * trapezoid(d2, rec.times))
    ok = decay_err < 1e-6 and max_rise <= 1e-8 and slack >= -1e-6
    assert report("6 energy laws", ok,
                  f"decay error {decay_err:.1e}, max norm increase {max_rise:.1e},"
                  f" energy slack {slack:+.2e} (rel_tol=1e-9)")


def test_criterion_7_oracle_self_validation():
    errs = {}
    for t in (0.25, 0.5, 1.0):
        prof = fv_reference(t)
        errs[t] = float(np.abs(prof.values - exact_pre_shock(prof.grid, t)).max())
    ok = all(e < 5e-3 for e in errs.values())
    assert report("7 FV oracle vs characteristics", ok,
                  ", ".join(f"t={t}: {e:.1e}" for t, e in errs.items()))


def test_criterion_8_qualitative_figures():
    osc_none = [compare_errors(cfg, integrate(cfg.scheme_config()))["oscillation_indicator"]
                for cfg in (RunConfig(scheme="none", N=n) for n in (15, 40, 60))]
    a_ok = not all(b < a for a, b in zip(osc_none, osc_none[1:]))
    osc, front = [], []
    for exp in (-0.45, -0.33, -0.2):
        cfg = RunConfig(scheme="sturm_liouville", N=40, eps_exp=exp)
        err = compare_errors(cfg, integrate(cfg.scheme_config()))
        osc.append(err["oscillation_indicator"])
        front.append(err["front_L1"])
    b_ok = all(b < a for a, b in zip(osc, osc[1:])) and all(b > a for a, b in zip(front, front[1:]))
    fmt = lambda v: "/".join(f"{x:.3f}" for x in v)
    assert report("8 qualitative figure properties", a_ok and b_ok,
                  f"(a) no-viscosity TV excess N=15/40/60: {fmt(osc_none)};"
                  f" (b) eps exponent -0.45/-0.33/-0.2: TV excess {fmt(osc)}, front L1 {fmt(front)}")
