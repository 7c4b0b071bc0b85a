import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from hermite_svm.basis import BasisSpec, eval_series
from hermite_svm.diagnostics import norm_Dx, norm_L2
from hermite_svm.reference import exact_pre_shock
from hermite_svm.solver import (
    BURGERS,
    ZERO_FLUX,
    GalerkinRHS,
    IntegrationAborted,
    NonFiniteError,
    PolynomialFlux,
    SchemeConfig,
    SolverState,
    initial_coefficients,
    integrate,
    rhs,
    sweep_configs,
)
from hermite_svm.transform import CoeffVec, analyze, dx_array, gauss_hermite, _root_lambda
from hermite_svm.viscosity import ViscositySpec

SQRT2 = math.sqrt(2.0)


def state(spec, values, t=0.0):
    return SolverState(t, CoeffVec(spec, values))


def oversampled_flux_term(u: CoeffVec, flux):
    """-d/dx P_{N+1} f(u_N) tested on modes 0..N with a 10x oversampled rule."""
    spec = u.spec
    n = spec.n_max
    big = spec.with_n_max(n + 1)
    rule = gauss_hermite(10 * (n + 2), spec.alpha**2)
    fh = analyze(lambda x: flux(eval_series(u, x)), big, rule).values
    return -dx_array(fh, _root_lambda(spec.alpha, n + 2))[: n + 1]


def test_config_validation():
    spec = BasisSpec(SQRT2, 10)
    with pytest.raises(ValueError):
        SchemeConfig(spec, t_final=-1.0)
    with pytest.raises(ValueError):
        SchemeConfig(spec, rel_tol=0.0)
    with pytest.raises(ValueError):
        SchemeConfig(spec, abs_tol=1.0)
    with pytest.raises(ValueError):
        SchemeConfig(spec, initial="square")
    with pytest.raises(ValueError):
        SchemeConfig(BasisSpec(1.0, 1), viscosity=ViscositySpec.high_mode())
    with pytest.raises(ValueError):
        PolynomialFlux((1.0, 1.0))


def test_zero_flux_scheme2_is_diagonal(rng):
    spec = BasisSpec(SQRT2, 20)
    cfg = SchemeConfig(spec, ViscositySpec.sturm_liouville(), flux=ZERO_FLUX)
    u = rng.standard_normal(21)
    np.testing.assert_allclose(rhs(state(spec, u), cfg).values, -cfg.eps * spec.eigenvalues() * u, rtol=1e-15)


def test_zero_flux_scheme1_kills_low_modes(rng):
    spec = BasisSpec(SQRT2, 40)
    cfg = SchemeConfig(spec, ViscositySpec.high_mode(), flux=ZERO_FLUX)
    m = cfg.viscosity.m(40)
    u = np.zeros(41)
    u[: m + 1] = rng.standard_normal(m + 1)
    assert np.all(rhs(state(spec, u), cfg).values == 0)


def test_burgers_single_mode_against_oversampled_oracle():
    spec = BasisSpec(SQRT2, 12)
    cfg = SchemeConfig(spec, ViscositySpec.none())
    u = CoeffVec.unit(spec, 0) * 1.3
    np.testing.assert_allclose(rhs(SolverState(0.0, u), cfg).values, oversampled_flux_term(u, BURGERS), atol=1e-13)


@pytest.mark.parametrize("flux", [BURGERS, PolynomialFlux((0.0, 0.4, 0.0, -0.2))])
def test_polynomial_flux_against_oversampled_oracle(rng, flux):
    spec = BasisSpec(1.1, 25)
    u = CoeffVec(spec, rng.standard_normal(26) / np.arange(1, 27))
    f = GalerkinRHS(SchemeConfig(spec, ViscositySpec.none(), flux=flux))
    want = oversampled_flux_term(u, flux)
    np.testing.assert_allclose(f.flux_term(u.values), want, atol=1e-12 * np.abs(want).max())


def test_callable_flux_uses_oversampled_rule(rng):
    spec = BasisSpec(SQRT2, 15)
    u = CoeffVec(spec, rng.standard_normal(16) * 0.3)
    want = oversampled_flux_term(u, BURGERS)
    errs = {}
    for factor in (2.0, 4.0):
        cfg = SchemeConfig(spec, ViscositySpec.none(), flux=lambda v: 0.5 * v * v, oversample=factor)
        errs[factor] = np.abs(GalerkinRHS(cfg).flux_term(u.values) - want).max()
    # the default factor is only roughly accurate for a quadratic flux
    assert errs[2.0] < 0.1 * np.abs(want).max()
    assert errs[4.0] < 1e-12


@pytest.mark.parametrize("n", [5, 40, 70])
def test_flux_neutrality(rng, n):
    spec = BasisSpec(SQRT2, n)
    f = GalerkinRHS(SchemeConfig(spec, ViscositySpec.none()))
    for _ in range(5):
        u = rng.standard_normal(n + 1)
        assert abs(f.flux_term(u) @ u) <= 1e-10 * max(1.0, np.abs(f.flux_term(u)).max())


def test_flux_neutrality_along_trajectory():
    rec = integrate(SchemeConfig(BasisSpec(SQRT2, 40), ViscositySpec.sturm_liouville()))
    f = GalerkinRHS(rec.config)
    for u in rec.states:
        assert abs(f.flux_term(u) @ u) < 1e-10


def test_nonfinite_state_names_stage():
    spec = BasisSpec(SQRT2, 4)
    f = GalerkinRHS(SchemeConfig(spec))
    with pytest.raises(NonFiniteError, match="synthesis"):
        f(0.0, np.array([np.nan, 0, 0, 0, 0]))
    with pytest.raises(NonFiniteError, match="flux"):
        f(0.0, np.array([1e200, 0, 0, 0, 0]))


def test_initial_coefficients_gaussian():
    spec = BasisSpec(SQRT2, 40)
    c = initial_coefficients(SchemeConfig(spec)).values
    assert c[0] == pytest.approx((math.pi / 2) ** 0.25, abs=1e-13)
    assert np.abs(c[1:]).max() < 1e-13


def test_initial_coefficients_from_vector():
    spec = BasisSpec(SQRT2, 3)
    init = CoeffVec(BasisSpec(SQRT2, 5), np.arange(6.0))
    got = initial_coefficients(SchemeConfig(spec, initial=init)).values
    np.testing.assert_array_equal(got, [0, 1, 2, 3])
    with pytest.raises(ValueError):
        initial_coefficients(SchemeConfig(spec, initial=CoeffVec.unit(BasisSpec(1.0, 3), 0)))


def test_zero_flux_single_mode_decay():
    spec = BasisSpec(SQRT2, 10)
    n = 6
    cfg = SchemeConfig(spec, ViscositySpec.sturm_liouville(), flux=ZERO_FLUX, t_final=1.5,
                       rel_tol=1e-6, abs_tol=1e-9, initial=CoeffVec.unit(spec, n))
    rec = integrate(cfg)
    exact = np.exp(-cfg.eps * spec.eigenvalues()[n] * rec.times)
    assert np.abs(rec.states[:, n] - exact).max() < 1e-6
    assert np.all(np.delete(rec.states, n, axis=1) == 0)


def test_t_final_zero_returns_projection():
    cfg = SchemeConfig(BasisSpec(SQRT2, 8), t_final=0.0)
    rec = integrate(cfg)
    assert rec.times.tolist() == [0.0]
    np.testing.assert_array_equal(rec.final.values, initial_coefficients(cfg).values)


def test_record_bookkeeping():
    rec = integrate(SchemeConfig(BasisSpec(SQRT2, 20)))
    assert rec.status == "ok"
    assert rec.times[0] == 0.0 and rec.times[-1] == 1.5
    assert np.all(np.diff(rec.times) > 0)
    assert rec.states.shape == (rec.times.size, 21)
    assert np.all(np.isfinite(rec.states))
    st = rec.state(3)
    assert st.t == rec.times[3]
    assert len(st.step_history) == 3
    assert st.step_history[-1][0] == rec.times[3]


def test_scheme2_norm_nonincreasing():
    spec = BasisSpec(SQRT2, 40)
    rec = integrate(SchemeConfig(spec, ViscositySpec.sturm_liouville()))
    norms = np.array([norm_L2(CoeffVec(spec, u)) for u in rec.states])
    assert np.max(np.diff(norms)) <= 1e-8
    assert norms[-1] <= norm_L2(rec.initial) + 1e-8


def test_scheme2_energy_law():
    # the trapezoid bias on the default adaptive grid is ~6e-5, so the
    # 1e-6 slack needs a fine time grid
    spec = BasisSpec(SQRT2, 40)
    rec = integrate(SchemeConfig(spec, ViscositySpec.sturm_liouville(), rel_tol=1e-9, abs_tol=1e-12))
    eps = rec.config.eps
    d2 = np.array([norm_Dx(CoeffVec(spec, u)) ** 2 for u in rec.states])
    integral = trapezoid(d2, rec.times)
    u0 = math.sqrt(math.pi / 2)  # ||e^{-x^2}||^2
    slack = u0 - (norm_L2(rec.final) ** 2 + 2 * eps * integral)
    assert slack >= -1e-6


@pytest.mark.parametrize("visc", [ViscositySpec.sturm_liouville(), ViscositySpec.high_mode()])
def test_step_halving_consistency(visc):
    spec = BasisSpec(SQRT2, 40)
    coarse = integrate(SchemeConfig(spec, visc, rel_tol=2e-4, abs_tol=2e-7))
    fine = integrate(SchemeConfig(spec, visc, rel_tol=1e-4, abs_tol=1e-7))
    assert abs(norm_L2(coarse.final) - norm_L2(fine.final)) < 10 * 2e-4


@pytest.mark.parametrize("visc", [ViscositySpec.none(), ViscositySpec.sturm_liouville(), ViscositySpec.high_mode()])
def test_pre_shock_convergence(visc):
    x = np.linspace(-6, 6, 1201)
    ref = exact_pre_shock(x, 1.0)
    errs = []
    for n in (20, 30, 40, 60):
        rec = integrate(SchemeConfig(BasisSpec(SQRT2, n), visc, t_final=1.0))
        e = eval_series(rec.final, x) - ref
        errs.append(math.sqrt(np.sum(e * e) * (x[1] - x[0])))
    assert all(b < a for a, b in zip(errs, errs[1:])), errs


def test_no_viscosity_overshoot_at_n15():
    rec = integrate(SchemeConfig(BasisSpec(SQRT2, 15), ViscositySpec.none()))
    x = np.linspace(-4, 4, 801)
    u = eval_series(rec.final, x)
    # the exact entropy solution stays within [0, 1]
    assert u.max() > 1.05
    assert u.min() < -0.05
    assert 0.5 < x[np.argmax(u)] < 2.0


def test_abort_wraps_partial_record():
    spec = BasisSpec(SQRT2, 6)
    cfg = SchemeConfig(spec, ViscositySpec.none(), flux=PolynomialFlux((0, 0, 0, 0, 0, 1.0)),
                       initial=CoeffVec(spec, np.full(7, 1e70)), t_final=1.0)
    with pytest.raises(IntegrationAborted, match="flux") as info:
        integrate(cfg)
    rec = info.value.record
    assert rec.status == "aborted"
    assert rec.times.tolist() == [0.0]
    assert np.all(np.isfinite(rec.states))


def test_sweep_configs():
    base = SchemeConfig(BasisSpec(SQRT2, 10), ViscositySpec.high_mode())
    cfgs = sweep_configs(base, [20, 30])
    assert [c.n for c in cfgs] == [20, 30]
    assert all(c.viscosity == base.viscosity for c in cfgs)
