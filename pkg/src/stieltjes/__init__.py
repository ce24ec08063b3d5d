"""Stieltjes electrostatics and quantum Hamilton-Jacobi nodes for classical orthogonal polynomials."""
from .crossval import CrossReport, TolerancePolicy, verify_family, verify_model
from .electrostatics import (
    ChargeConfiguration,
    EquilibriumResult,
    FieldSpec,
    certify_stability,
    energy,
    field_for_family,
    gradient,
    hessian,
    solve_equilibrium,
)
from .orthopoly import Family, PolynomialFamily, ZeroSet, evaluate, ode_residual, zeros
from .qhj import (
    ModelKind,
    QuantumModel,
    build_model,
    qmf_eval,
    quantize_contour,
    riccati_residual,
    spectrum,
    wavefunction_nodes,
)

__version__ = "0.1.0"
