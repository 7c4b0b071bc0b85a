"""Hermite spectral viscosity solvers for scalar conservation laws on the line."""
from .basis import BasisSpec, eigenvalue, eval_basis, eval_series
from .diagnostics import (
    GrowthFit,
    NormLabel,
    NormSeries,
    fit_growth,
    integrated_norms,
    norm_Dx,
    norm_L2,
    norm_series,
    norm_x2_L1,
    norm_xweighted,
    time_integrate,
)
from .reference import (
    CharacteristicSolution,
    FVOracle,
    exact_pre_shock,
    fv_reference,
    shock_time,
)
from .solver import (
    BURGERS,
    ZERO_FLUX,
    GalerkinRHS,
    IntegrationAborted,
    PolynomialFlux,
    RunRecord,
    SchemeConfig,
    SolverState,
    integrate,
    rhs,
)
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
from .viscosity import (
    MultiplierSet,
    ViscosityKind,
    ViscositySpec,
    apply_Q,
    make_multipliers,
    scheme1_viscosity,
    scheme2_viscosity,
)

__version__ = "0.1.0"
