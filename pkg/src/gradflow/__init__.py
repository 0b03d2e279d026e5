"""Pseudospectral simulator for surface gradient flows of density energies.

The package integrates the coupled evolution of a periodic graph surface
``z = h(x, y, t)`` and a conserved scalar density ``psi`` carried on it,
driven by steepest descent of ``U = integral f(psi) dS``: the surface by
L2 descent, the density by H^-1 descent.  Everything is spectral on a
uniform periodic grid; time stepping is first order (explicit or
stabilized semi-implicit).

Quick start::

    from gradflow import parse_config, simulate

    config = parse_config(open("configs/relaxation_128.cfg").read())
    result = simulate(config)
    print(result.records[-1].energy)
"""

from .config import (
    ConfigError,
    InitialDensity,
    InitialHeight,
    RunConfig,
    build_grid,
    build_mobilities,
    build_stepper,
    format_config,
    initial_state,
    parse_config,
)
from .diagnostics import (
    CompareResult,
    ConvergenceRow,
    DiagnosticsRecord,
    compare_variants,
    convergence_sweep,
    record,
)
from .energy import (
    CLAMP_EPS,
    ClampTally,
    Constant,
    EnergyModel,
    FloryHuggins,
    Linear,
    Quadratic,
    eval_f,
    eval_sigma,
    functional_derivatives,
    total_energy,
)
from .flow import (
    FlowState,
    Mobilities,
    ModelVariant,
    Scheme,
    SolverAbort,
    StepperConfig,
    flux_vector,
    height_rhs,
    psi_rhs,
    stabilization_coefficients,
    step,
    tangential_velocity,
)
from .geometry import (
    GeometryCache,
    build_cache,
    covariant_grad_sq,
    covariant_norm_sq,
    div_comp_material,
    laplace_beltrami,
    material_derivative,
    normal_speed,
    reconstruct_velocity,
    surface_integral,
    truesdell_rate,
)
from .runner import RunResult, compare, run, simulate, sweep
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .spectral import (
    Grid,
    ScalarField,
    VectorField2,
    dealias,
    derivatives,
    get_fft_workers,
    gradient,
    integrate,
    partial,
    partial2,
    set_fft_workers,
    solve_helmholtz,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # spectral
    "Grid",
    "ScalarField",
    "VectorField2",
    "partial",
    "gradient",
    "partial2",
    "derivatives",
    "dealias",
    "integrate",
    "solve_helmholtz",
    "set_fft_workers",
    "get_fft_workers",
    # geometry
    "GeometryCache",
    "build_cache",
    "laplace_beltrami",
    "covariant_grad_sq",
    "covariant_norm_sq",
    "div_comp_material",
    "material_derivative",
    "truesdell_rate",
    "reconstruct_velocity",
    "normal_speed",
    "surface_integral",
    # energy
    "CLAMP_EPS",
    "ClampTally",
    "EnergyModel",
    "Constant",
    "Linear",
    "Quadratic",
    "FloryHuggins",
    "eval_f",
    "eval_sigma",
    "total_energy",
    "functional_derivatives",
    # flow
    "ModelVariant",
    "Scheme",
    "Mobilities",
    "StepperConfig",
    "FlowState",
    "SolverAbort",
    "tangential_velocity",
    "height_rhs",
    "psi_rhs",
    "flux_vector",
    "stabilization_coefficients",
    "step",
    # diagnostics
    "DiagnosticsRecord",
    "record",
    "ConvergenceRow",
    "convergence_sweep",
    "CompareResult",
    "compare_variants",
    # config
    "ConfigError",
    "InitialHeight",
    "InitialDensity",
    "RunConfig",
    "parse_config",
    "format_config",
    "build_grid",
    "build_mobilities",
    "build_stepper",
    "initial_state",
    # snapshot
    "SnapshotError",
    "read_snapshot",
    "write_snapshot",
    # runner
    "RunResult",
    "simulate",
    "run",
    "compare",
    "sweep",
]
