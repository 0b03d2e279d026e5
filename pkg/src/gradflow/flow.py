"""Evolution equations and time stepping for the coupled (h, psi) flow.

The continuous model is the steepest-descent flow of the surface energy
``U = integral f(psi) dS`` in which the surface position moves by L2
descent (mobility ``1/m_x``) and the conserved density by H^-1 descent
(mobility ``1/m_psi``).  In height-observer variables the system reads

* tangential velocity:  ``m_x v = -psi f''(psi) grad psi``,
* height equation:      ``m_x dh/dt = |g| sigma(psi) hfrak``,
* density equation:     Truesdell rate of psi balanced by the surface
  diffusion ``(f'' lap psi + f''' |grad psi|^2) / m_psi``.

Four variants are provided:

``FULL_COUPLED``
    The complete system above; the density equation is solved for
    ``d psi/dt`` with the transport terms moved to the right-hand side.
``VELOCITY_SUBSTITUTED``
    The same flow with the height rate substituted into the density
    equation, leaving a single scalar equation (algebraically identical in
    continuous time; a useful cross-check discretely).
``NORMAL_ONLY``
    Tangential velocity constrained to zero; only normal motion and
    transport remain.
``MATERIAL_GAUGE_QUADRATIC``
    The quadratic-energy flow derived in the material gauge of surface
    independence: the spatial force terms flip sign relative to the
    Truesdell gauge.  Not a descent direction for U; with ``m_x << m_psi``
    it can raise the energy, which is exactly what the gauge-comparison
    diagnostics exercise.  Requires the Quadratic energy preset.

Time stepping is first-order: plain explicit Euler, or a stabilized
semi-implicit variant (IMEX1) in which the update increment is damped by
``1/(1 + dt * a * |k|^2)`` mode-by-mode.  The damping coefficients default
to the per-step grid maxima of the linearized diffusion coefficients and
leave any zero right-hand side exactly zero, so static states stay frozen
to the bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .energy import ClampTally, EnergyModel, Quadratic
from .geometry import GeometryCache, build_cache
from .spectral import (
    Grid,
    ScalarField,
    VectorField2,
    derivatives,
    get_fft_workers,
    gradient,
)

__all__ = [
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
]


class ModelVariant(enum.Enum):
    FULL_COUPLED = "full"
    VELOCITY_SUBSTITUTED = "velocity_substituted"
    NORMAL_ONLY = "normal_only"
    MATERIAL_GAUGE_QUADRATIC = "material_gauge_quadratic"


class Scheme(enum.Enum):
    EXPLICIT_EULER = "explicit_euler"
    IMEX1 = "imex1"


@dataclass(frozen=True)
class Mobilities:
    """Immobility coefficients scaling the two descent directions."""

    m_x: float
    m_psi: float

    def __post_init__(self) -> None:
        if not (self.m_x > 0.0):
            raise ValueError(f"m_x must be > 0, got {self.m_x}")
        if not (self.m_psi > 0.0):
            raise ValueError(f"m_psi must be > 0, got {self.m_psi}")


@dataclass(frozen=True)
class StepperConfig:
    """Time-step size, scheme selection, and stabilization coefficients.

    ``stab_h``/``stab_psi`` equal to 0 select the automatic per-step
    coefficients; positive values override them.  Explicit Euler ignores
    both.
    """

    dt: float
    scheme: Scheme = Scheme.IMEX1
    stab_h: float = 0.0
    stab_psi: float = 0.0

    def __post_init__(self) -> None:
        if not (self.dt > 0.0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.stab_h < 0.0 or self.stab_psi < 0.0:
            raise ValueError("stabilization coefficients must be >= 0")


@dataclass
class FlowState:
    """Instantaneous simulation state."""

    t: float
    h: ScalarField
    psi: ScalarField
    step_index: int = 0

    @property
    def grid(self) -> Grid:
        return self.h.grid


class SolverAbort(RuntimeError):
    """Raised when a step produces non-finite fields.

    Carries the last valid state so callers can dump it for post-mortem
    inspection.
    """

    def __init__(self, message: str, last_valid: FlowState):
        super().__init__(message)
        self.last_valid = last_valid


def _require_quadratic(variant: ModelVariant, energy: EnergyModel) -> None:
    if variant is ModelVariant.MATERIAL_GAUGE_QUADRATIC and not isinstance(
        energy, Quadratic
    ):
        raise ValueError(
            "the material-gauge variant is defined for the Quadratic energy only"
        )


# ---------------------------------------------------------------------------
# Right-hand sides


def tangential_velocity(
    state: FlowState,
    variant: ModelVariant,
    mobilities: Mobilities,
    energy: EnergyModel,
    tally: ClampTally | None = None,
) -> VectorField2:
    """Flat components of the tangential material velocity.

    ``-psi f''(psi) grad psi / m_x`` in the Truesdell gauge (the sign flips
    for the material-gauge variant); identically zero for NORMAL_ONLY.  The
    VELOCITY_SUBSTITUTED variant does not evolve this field explicitly but
    shares the same underlying velocity, which diagnostics rely on.
    """
    _require_quadratic(variant, energy)
    grid = state.grid
    if variant is ModelVariant.NORMAL_ONLY:
        return VectorField2(grid.zeros(), grid.zeros())
    psi = state.psi
    values, n = energy.clamp(psi.values)
    if tally is not None and n:
        tally.add(n)
    fpp = energy.density(values, 2)
    px, py = gradient(psi)
    sign = -1.0 if variant is not ModelVariant.MATERIAL_GAUGE_QUADRATIC else 1.0
    factor = sign * psi.values * fpp / mobilities.m_x
    return VectorField2(
        ScalarField(grid, factor * px.values),
        ScalarField(grid, factor * py.values),
    )


def height_rhs(
    state: FlowState,
    variant: ModelVariant,
    mobilities: Mobilities,
    cache: GeometryCache,
    energy: EnergyModel,
    tally: ClampTally | None = None,
) -> ScalarField:
    """Time derivative of the height field, ``|g| sigma(psi) hfrak / m_x``
    (opposite sign for the material-gauge variant)."""
    _require_quadratic(variant, energy)
    values, n = energy.clamp(state.psi.values)
    if tally is not None and n:
        tally.add(n)
    sigma = energy.density(values, 0) - values * energy.density(values, 1)
    sign = -1.0 if variant is ModelVariant.MATERIAL_GAUGE_QUADRATIC else 1.0
    out = sign * cache.g_det.values * sigma * cache.hfrak.values / mobilities.m_x
    return ScalarField(state.grid, out)


def _psi_rhs_values(
    variant: ModelVariant,
    mobilities: Mobilities,
    energy: EnergyModel,
    cache: GeometryCache,
    psi: np.ndarray,
    psi_derivs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    dth: np.ndarray,
    v: tuple[np.ndarray, np.ndarray] | None,
    v_derivs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None,
) -> np.ndarray:
    """Shared density-equation assembly on raw arrays.

    ``v_derivs`` is ``(vx_x, vx_y, vy_x, vy_y)`` and may be None exactly
    when the variant carries no tangential velocity.
    """
    px, py, pxx, pxy, pyy = psi_derivs
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    hfrak = cache.hfrak.values
    m_psi = mobilities.m_psi

    clamped, _ = energy.clamp(psi)
    fpp = energy.density(clamped, 2)
    fppp = energy.density(clamped, 3)

    p_dh = px * hx + py * hy
    grad_sq = px * px + py * py - p_dh * p_dh / g
    dh_d2p_dh = hx * hx * pxx + 2.0 * hx * hy * pxy + hy * hy * pyy

    if variant is ModelVariant.VELOCITY_SUBSTITUTED:
        sigma = energy.density(clamped, 0) - clamped * energy.density(clamped, 1)
        r = m_psi / mobilities.m_x
        amp = 1.0 + psi * psi * r
        out = (
            amp * fpp * (pxx + pyy - dh_d2p_dh / g)
            + (amp * fppp + 2.0 * psi * r * fpp) * grad_sq
            + (r * (sigma - psi * psi * fpp) - fpp) * p_dh * hfrak
            + g * psi * r * sigma * hfrak * hfrak
        )
        return out / m_psi

    lap_psi = pxx + pyy - dh_d2p_dh / g - p_dh * hfrak
    diffusive = (fpp * lap_psi + fppp * grad_sq) / m_psi
    transport = psi * hfrak + p_dh / g
    out = transport * dth + diffusive

    if variant is not ModelVariant.NORMAL_ONLY:
        vx, vy = v
        vx_x, vx_y, vy_x, vy_y = v_derivs
        dh_dv_dh = hx * vx_x * hx + hx * vy_x * hy + hy * vx_y * hx + hy * vy_y * hy
        out = out - psi * (vx_x + vy_y - dh_dv_dh / g)
        out = out - (vx * (px - transport * hx) + vy * (py - transport * hy))
    return out


def psi_rhs(
    state: FlowState,
    variant: ModelVariant,
    mobilities: Mobilities,
    cache: GeometryCache,
    energy: EnergyModel,
    dth: ScalarField,
    vflat: VectorField2,
    tally: ClampTally | None = None,
) -> ScalarField:
    """Time derivative of the density field for the selected variant."""
    _require_quadratic(variant, energy)
    if tally is not None:
        tally.add(energy.count_violations(state.psi.values))
    psi_derivs = tuple(f.values for f in derivatives(state.psi))
    if variant in (ModelVariant.NORMAL_ONLY, ModelVariant.VELOCITY_SUBSTITUTED):
        v = v_derivs = None
    else:
        vx_x, vx_y = (f.values for f in gradient(vflat.x))
        vy_x, vy_y = (f.values for f in gradient(vflat.y))
        v = (vflat.x.values, vflat.y.values)
        v_derivs = (vx_x, vx_y, vy_x, vy_y)
    out = _psi_rhs_values(
        variant,
        mobilities,
        energy,
        cache,
        state.psi.values,
        psi_derivs,
        dth.values,
        v,
        v_derivs,
    )
    return ScalarField(state.grid, out)


def flux_vector(
    state: FlowState,
    energy: EnergyModel,
    cache: GeometryCache,
    mobilities: Mobilities,
    tally: ClampTally | None = None,
) -> VectorField2:
    """Covariant proxy of the conserved-density flux, ``-f'' grad psi / m_psi``."""
    values, n = energy.clamp(state.psi.values)
    if tally is not None and n:
        tally.add(n)
    fpp = energy.density(values, 2)
    px, py = gradient(state.psi)
    factor = -fpp / mobilities.m_psi
    return VectorField2(
        ScalarField(state.grid, factor * px.values),
        ScalarField(state.grid, factor * py.values),
    )


# ---------------------------------------------------------------------------
# Time stepping


def stabilization_coefficients(
    state: FlowState,
    mobilities: Mobilities,
    energy: EnergyModel,
    stepper: StepperConfig,
) -> tuple[float, float]:
    """Damping coefficients (a_h, a_psi) actually used for a step.

    Automatic mode takes the grid maxima of the linearized diffusion
    coefficients: ``max |sigma(psi)| / m_x`` for the height equation and
    ``max (1 + psi^2 m_psi/m_x) f''(psi) / m_psi`` for the density
    equation, floored at zero.
    """
    if stepper.scheme is Scheme.EXPLICIT_EULER:
        return 0.0, 0.0
    a_h, a_psi = stepper.stab_h, stepper.stab_psi
    if a_h == 0.0 or a_psi == 0.0:
        values, _ = energy.clamp(state.psi.values)
        if a_h == 0.0:
            sigma = energy.density(values, 0) - values * energy.density(values, 1)
            a_h = float(np.max(np.abs(sigma))) / mobilities.m_x
        if a_psi == 0.0:
            amp = 1.0 + state.psi.values**2 * (mobilities.m_psi / mobilities.m_x)
            coeff = amp * energy.density(values, 2)
            a_psi = max(0.0, float(np.max(coeff))) / mobilities.m_psi
    return a_h, a_psi


def _increment(grid: Grid, rhs: np.ndarray, dt: float, a: float) -> np.ndarray:
    """Dealiased, optionally damped update increment ``dt * rhs``.

    The damped form is the stabilized semi-implicit update: solving
    ``(I - dt a lap)(u_new - u_old) = dt * rhs`` mode-by-mode.  A zero
    right-hand side yields an exactly zero increment.
    """
    spec = _fft.rfft2(rhs, axes=(-2, -1), workers=get_fft_workers())
    spec *= grid.dealias_mask
    if a != 0.0:
        spec /= 1.0 + (dt * a) * grid.k2
    return dt * _fft.irfft2(spec, s=(grid.nx, grid.ny), axes=(-2, -1), workers=get_fft_workers())


def step(
    state: FlowState,
    variant: ModelVariant,
    mobilities: Mobilities,
    energy: EnergyModel,
    stepper: StepperConfig,
    tally: ClampTally | None = None,
) -> FlowState:
    """Advance the state by one time step.

    Evaluation order within the step: geometry cache, height rate,
    tangential velocity, density rate, all at the old time level; then both
    fields are updated.  Domain-clamp events are counted once per step.

    Raises
    ------
    SolverAbort
        If the updated fields contain NaN/Inf; the exception carries the
        last valid state.
    """
    _require_quadratic(variant, energy)
    if tally is not None:
        tally.add(energy.count_violations(state.psi.values))

    grid = state.grid
    cache = build_cache(state.h)
    dth = height_rhs(state, variant, mobilities, cache, energy)

    psi_derivs = tuple(f.values for f in derivatives(state.psi))
    if variant in (ModelVariant.NORMAL_ONLY, ModelVariant.VELOCITY_SUBSTITUTED):
        v = v_derivs = None
        vflat = None
    else:
        vflat = tangential_velocity(state, variant, mobilities, energy)
        vx_x, vx_y = (f.values for f in gradient(vflat.x))
        vy_x, vy_y = (f.values for f in gradient(vflat.y))
        v = (vflat.x.values, vflat.y.values)
        v_derivs = (vx_x, vx_y, vy_x, vy_y)

    rhs_psi = _psi_rhs_values(
        variant,
        mobilities,
        energy,
        cache,
        state.psi.values,
        psi_derivs,
        dth.values,
        v,
        v_derivs,
    )

    a_h, a_psi = stabilization_coefficients(state, mobilities, energy, stepper)
    dt = stepper.dt
    h_new = state.h.values + _increment(grid, dth.values, dt, a_h)
    psi_new = state.psi.values + _increment(grid, rhs_psi, dt, a_psi)

    if not (np.all(np.isfinite(h_new)) and np.all(np.isfinite(psi_new))):
        raise SolverAbort(
            f"non-finite fields after step {state.step_index + 1} "
            f"(t = {state.t + dt:.6g}); aborting",
            last_valid=state,
        )
    return FlowState(
        t=state.t + dt,
        h=ScalarField(grid, h_new),
        psi=ScalarField(grid, psi_new),
        step_index=state.step_index + 1,
    )
