"""Differential geometry of graph surfaces z = h(x, y) over a periodic base.

Every surface quantity is expressed through flat partial derivatives of the
height field and of scalars carried on the surface, so all operators reduce
to pointwise algebra on spectrally computed derivatives.  The conventions:

* metric determinant ``|g| = 1 + |dh|^2``,
* scaled mean curvature ``hfrak = (div dh - dh.d2h.dh / |g|) / |g|``,
  which is also the Laplace-Beltrami image of ``h`` itself,
* mean curvature ``H = sqrt(|g|) * hfrak``,
* upward unit normal ``nu = (-h_x, -h_y, 1) / sqrt(|g|)``.

Vector fields on the surface are handled through their flat (component)
representation ``v = (v_x, v_y)``; the corresponding ambient tangent vector
is recovered by :func:`reconstruct_velocity`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    Grid,
    ScalarField,
    VectorField2,
    derivatives,
    gradient,
    integrate,
)

__all__ = [
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
]


@dataclass
class GeometryCache:
    """Derivatives of the height field and derived metric quantities.

    Built once per height field (typically once per time step) and shared by
    every geometric operator evaluated against that surface.
    """

    h: ScalarField
    dh: VectorField2
    d2h: tuple[ScalarField, ScalarField, ScalarField]
    g_det: ScalarField
    sqrt_g: ScalarField
    hfrak: ScalarField
    mean_curv: ScalarField
    normal: tuple[ScalarField, ScalarField, ScalarField]

    @property
    def grid(self) -> Grid:
        return self.h.grid


def build_cache(h: ScalarField) -> GeometryCache:
    """Assemble the :class:`GeometryCache` for a height field.

    Raises
    ------
    FloatingPointError
        If the height field or any derived quantity is non-finite.
    """
    h.check_finite("height field")
    grid = h.grid
    hx, hy, hxx, hxy, hyy = (f.values for f in derivatives(h))

    g_det = 1.0 + hx * hx + hy * hy
    sqrt_g = np.sqrt(g_det)
    dh_d2h_dh = hx * hx * hxx + 2.0 * hx * hy * hxy + hy * hy * hyy
    hfrak = (hxx + hyy - dh_d2h_dh / g_det) / g_det
    mean_curv = sqrt_g * hfrak
    if not np.all(np.isfinite(hfrak)):
        raise FloatingPointError("curvature evaluation produced non-finite values")

    wrap = lambda v: ScalarField(grid, v)
    return GeometryCache(
        h=h,
        dh=VectorField2(wrap(hx), wrap(hy)),
        d2h=(wrap(hxx), wrap(hxy), wrap(hyy)),
        g_det=wrap(g_det),
        sqrt_g=wrap(sqrt_g),
        hfrak=wrap(hfrak),
        mean_curv=wrap(mean_curv),
        normal=(wrap(-hx / sqrt_g), wrap(-hy / sqrt_g), wrap(1.0 / sqrt_g)),
    )


def laplace_beltrami(f: ScalarField, cache: GeometryCache) -> ScalarField:
    """Surface Laplacian of a scalar on the cached surface."""
    fx, fy, fxx, fxy, fyy = (s.values for s in derivatives(f))
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    dh_d2f_dh = hx * hx * fxx + 2.0 * hx * hy * fxy + hy * hy * fyy
    df_dh = fx * hx + fy * hy
    out = fxx + fyy - dh_d2f_dh / g - df_dh * cache.hfrak.values
    return ScalarField(f.grid, out)


def covariant_grad_sq(f: ScalarField, cache: GeometryCache) -> ScalarField:
    """Squared norm of the covariant surface gradient of a scalar."""
    fx, fy = (s.values for s in gradient(f))
    hx, hy = cache.dh.x.values, cache.dh.y.values
    df_dh = fx * hx + fy * hy
    out = fx * fx + fy * fy - df_dh * df_dh / cache.g_det.values
    return ScalarField(f.grid, out)


def covariant_norm_sq(v: VectorField2, cache: GeometryCache) -> ScalarField:
    """Squared surface norm of a tangent vector given by flat components."""
    vx, vy = v.x.values, v.y.values
    hx, hy = cache.dh.x.values, cache.dh.y.values
    v_dh = vx * hx + vy * hy
    out = vx * vx + vy * vy - v_dh * v_dh / cache.g_det.values
    return ScalarField(v.x.grid, out)


def div_comp_material(
    v: VectorField2, dth: ScalarField, cache: GeometryCache
) -> ScalarField:
    """Surface divergence of the material velocity with flat part ``v`` and
    height rate ``dth``."""
    vx_x, vx_y = (s.values for s in gradient(v.x))
    vy_x, vy_y = (s.values for s in gradient(v.y))
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    dh_dv_dh = hx * vx_x * hx + hx * vy_x * hy + hy * vx_y * hx + hy * vy_y * hy
    v_dh = v.x.values * hx + v.y.values * hy
    out = vx_x + vy_y - dh_dv_dh / g - (dth.values + v_dh) * cache.hfrak.values
    return ScalarField(dth.grid, out)


def material_derivative(
    psi: ScalarField,
    dtpsi: ScalarField,
    v: VectorField2,
    dth: ScalarField,
    cache: GeometryCache,
) -> ScalarField:
    """Rate of change of a surface scalar following the material motion."""
    px, py = (s.values for s in gradient(psi))
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    v_dh = v.x.values * hx + v.y.values * hy
    out = (
        dtpsi.values
        + v.x.values * px
        + v.y.values * py
        - ((px * hx + py * hy) / g) * (dth.values + v_dh)
    )
    return ScalarField(psi.grid, out)


def truesdell_rate(
    psi: ScalarField,
    dtpsi: ScalarField,
    v: VectorField2,
    dth: ScalarField,
    cache: GeometryCache,
) -> ScalarField:
    """Truesdell rate of a surface density: material rate plus dilution.

    Vanishing Truesdell rate (up to a surface-divergence flux) is the
    statement that the integral of the density over the moving surface is
    conserved.
    """
    px, py = (s.values for s in gradient(psi))
    vx_x, vx_y = (s.values for s in gradient(v.x))
    vy_x, vy_y = (s.values for s in gradient(v.y))
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    hfrak = cache.hfrak.values
    p = psi.values

    transport = p * hfrak + (px * hx + py * hy) / g
    dh_dv_dh = hx * vx_x * hx + hx * vy_x * hy + hy * vx_y * hx + hy * vy_y * hy
    out = (
        dtpsi.values
        - transport * dth.values
        + p * (vx_x + vy_y - dh_dv_dh / g)
        + v.x.values * (px - transport * hx)
        + v.y.values * (py - transport * hy)
    )
    return ScalarField(psi.grid, out)


def reconstruct_velocity(
    v: VectorField2, dth: ScalarField, cache: GeometryCache
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Ambient coordinates of the material velocity of the surface.

    The returned vector is the sum of the tangential velocity with flat
    components ``v`` and the normal velocity implied by the height rate.
    """
    hx, hy = cache.dh.x.values, cache.dh.y.values
    g = cache.g_det.values
    s = (dth.values + v.x.values * hx + v.y.values * hy) / g
    grid = dth.grid
    return (
        ScalarField(grid, v.x.values - s * hx),
        ScalarField(grid, v.y.values - s * hy),
        ScalarField(grid, s),
    )


def normal_speed(dth: ScalarField, cache: GeometryCache) -> ScalarField:
    """Normal velocity of the surface, ``dth / sqrt(|g|)``."""
    return ScalarField(dth.grid, dth.values / cache.sqrt_g.values)


def surface_integral(f: ScalarField, cache: GeometryCache) -> float:
    """Integral of a scalar over the curved surface (area weight included)."""
    return integrate(ScalarField(f.grid, f.values * cache.sqrt_g.values))
