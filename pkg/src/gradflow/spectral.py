"""Fourier pseudospectral toolbox on periodic rectangles.

Fields live on a uniform ``nx x ny`` grid covering ``[0, lx) x [0, ly)``,
stored row-major with axis 0 along x and axis 1 along y.  All derivative
operators act in spectral space through real FFTs; nonlinear terms are
expected to be formed pointwise by the caller and (optionally) dealiased
with the 2/3 rule afterwards.

Conventions
-----------
* Forward transforms are unnormalized; inverse transforms divide by
  ``nx * ny`` (the numpy/scipy default).
* The Nyquist mode is zeroed in first-derivative multipliers, which keeps
  odd-order derivatives of real fields real and unambiguous.  Even grid
  sizes are required for the same reason.
* ``dealias`` masks per axis: mode ``m`` survives iff
  ``|m| <= (2/3) * (n/2)``, equality included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.fft as _fft

__all__ = [
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
]

_fft_workers = 1


def set_fft_workers(n: int) -> None:
    """Set the number of worker threads used by the FFT backend.

    Results for ``n > 1`` agree with the single-threaded reference to
    rounding accuracy but are not guaranteed to be bit-identical.
    """
    if n < 1:
        raise ValueError(f"fft workers must be >= 1, got {n}")
    global _fft_workers
    _fft_workers = int(n)


def get_fft_workers() -> int:
    return _fft_workers


def _rfft2(values: np.ndarray) -> np.ndarray:
    return _fft.rfft2(values, axes=(-2, -1), workers=_fft_workers)


def _irfft2(spec: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    return _fft.irfft2(spec, s=shape, axes=(-2, -1), workers=_fft_workers)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with precomputed spectral operators.

    Parameters
    ----------
    nx, ny : int
        Number of points per axis; must be even and at least 8.
    lx, ly : float
        Domain extents; default ``2 * pi`` each.
    dealias : bool
        Whether the 2/3-rule mask is active.  When False the mask keeps
        every mode and :func:`dealias` is the identity.
    """

    nx: int
    ny: int
    lx: float = 2.0 * np.pi
    ly: float = 2.0 * np.pi
    dealias: bool = True

    def __post_init__(self) -> None:
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n % 2 != 0 or n < 8:
                raise ValueError(f"{name} must be even and >= 8, got {n}")
        for name, l in (("lx", self.lx), ("ly", self.ly)):
            if not (l > 0.0):
                raise ValueError(f"{name} must be positive, got {l}")

        set_attr = object.__setattr__
        # Collocation coordinates, broadcastable to (nx, ny).
        set_attr(self, "x", (np.arange(self.nx) * (self.lx / self.nx)).reshape(-1, 1))
        set_attr(self, "y", (np.arange(self.ny) * (self.ly / self.ny)).reshape(1, -1))

        # Integer mode numbers in FFT storage order; y-axis uses the real
        # transform's half spectrum.
        mx = np.fft.fftfreq(self.nx, 1.0 / self.nx).reshape(-1, 1)
        my = np.arange(self.ny // 2 + 1, dtype=float).reshape(1, -1)

        # First-derivative multipliers with the Nyquist mode removed.
        kx = (2.0 * np.pi / self.lx) * mx
        ky = (2.0 * np.pi / self.ly) * my
        kx_d = kx.copy()
        kx_d[self.nx // 2, 0] = 0.0
        ky_d = ky.copy()
        ky_d[0, -1] = 0.0
        set_attr(self, "kx", kx_d)
        set_attr(self, "ky", ky_d)

        # Full |k|^2 (Nyquist included) for Helmholtz-type solves.
        set_attr(self, "k2", kx * kx + ky * ky)

        cut_x = (2.0 / 3.0) * (self.nx / 2.0) * (1.0 + 1e-12)
        cut_y = (2.0 / 3.0) * (self.ny / 2.0) * (1.0 + 1e-12)
        if self.dealias:
            mask = (np.abs(mx) <= cut_x) & (np.abs(my) <= cut_y)
        else:
            mask = np.ones((self.nx, self.ny // 2 + 1), dtype=bool)
        set_attr(self, "dealias_mask", mask)

        # Precomputed multiplier stacks for the batched derivative helpers:
        # (d/dx, d/dy) and (d/dx, d/dy, dxx, dxy, dyy).
        one = np.ones((self.nx, self.ny // 2 + 1))
        set_attr(
            self,
            "grad_multipliers",
            np.stack((1j * kx_d * one, 1j * ky_d * one)),
        )
        set_attr(
            self,
            "deriv_multipliers",
            np.stack(
                (
                    1j * kx_d * one,
                    1j * ky_d * one,
                    -kx_d * kx_d * one,
                    -kx_d * ky_d * one,
                    -ky_d * ky_d * one,
                )
            ),
        )

    # -- field constructors -------------------------------------------------

    def field(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self, np.asarray(values, dtype=float))

    def constant(self, value: float) -> "ScalarField":
        return ScalarField(self, np.full((self.nx, self.ny), float(value)))

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros((self.nx, self.ny)))

    def from_function(self, fn) -> "ScalarField":
        """Evaluate ``fn(x, y)`` on the collocation points."""
        x, y = np.broadcast_arrays(self.x, self.y)
        return ScalarField(self, np.asarray(fn(x, y), dtype=float))

    @property
    def cell_area(self) -> float:
        return (self.lx * self.ly) / (self.nx * self.ny)

    def compatible(self, other: "Grid") -> bool:
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and self.lx == other.lx
            and self.ly == other.ly
        )


def _check_same_grid(a: "ScalarField", b: "ScalarField") -> None:
    if a.grid is not b.grid and not a.grid.compatible(b.grid):
        raise ValueError("fields live on incompatible grids")


@dataclass
class ScalarField:
    """Real scalar samples on a :class:`Grid`.

    Supports elementwise arithmetic with other fields and with Python
    scalars; all operations return new fields on the same grid.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.grid.nx, self.grid.ny)
        if self.values.shape != expected:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {expected}"
            )

    def check_finite(self, label: str = "field") -> "ScalarField":
        if not np.all(np.isfinite(self.values)):
            bad = int(np.size(self.values) - np.count_nonzero(np.isfinite(self.values)))
            raise FloatingPointError(f"{label} contains {bad} non-finite values")
        return self

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values / self._coerce(other))

    def __rtruediv__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self._coerce(other) / self.values)

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)

    def __pow__(self, exponent) -> "ScalarField":
        return ScalarField(self.grid, self.values ** exponent)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


@dataclass
class VectorField2:
    """Pair of scalar fields holding the flat components of a surface vector."""

    x: ScalarField
    y: ScalarField

    def __post_init__(self) -> None:
        _check_same_grid(self.x, self.y)

    @property
    def grid(self) -> Grid:
        return self.x.grid

    def __iter__(self) -> Iterator[ScalarField]:
        return iter((self.x, self.y))

    def dot(self, other: "VectorField2") -> ScalarField:
        return self.x * other.x + self.y * other.y


# -- spectral operators -----------------------------------------------------


def partial(f: ScalarField, axis: str) -> ScalarField:
    """First derivative along ``axis`` ('x' or 'y'), exact for resolved modes."""
    g = f.grid
    spec = _rfft2(f.values)
    if axis == "x":
        spec = spec * (1j * g.kx)
    elif axis == "y":
        spec = spec * (1j * g.ky)
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return ScalarField(g, _irfft2(spec, (g.nx, g.ny)))


def gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Both first derivatives ``(f_x, f_y)`` from a single forward transform."""
    g = f.grid
    spec = _rfft2(f.values)
    out = _irfft2(g.grad_multipliers * spec, (g.nx, g.ny))
    return ScalarField(g, out[0]), ScalarField(g, out[1])


def partial2(f: ScalarField) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Second derivatives ``(f_xx, f_xy, f_yy)``; ``f_xy`` is symmetric by
    construction (a single spectral multiplier)."""
    g = f.grid
    spec = _rfft2(f.values)
    out = _irfft2(g.deriv_multipliers[2:] * spec, (g.nx, g.ny))
    return ScalarField(g, out[0]), ScalarField(g, out[1]), ScalarField(g, out[2])


def derivatives(
    f: ScalarField,
) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField, ScalarField]:
    """All derivatives up to second order, ``(f_x, f_y, f_xx, f_xy, f_yy)``.

    One forward transform and one batched inverse transform; equivalent to
    combining :func:`partial` and :func:`partial2`.
    """
    g = f.grid
    spec = _rfft2(f.values)
    out = _irfft2(g.deriv_multipliers * spec, (g.nx, g.ny))
    return tuple(ScalarField(g, out[i]) for i in range(5))


def dealias(f: ScalarField) -> ScalarField:
    """Spectral truncation by the grid's 2/3-rule mask; identity when the
    grid was built with ``dealias=False``."""
    g = f.grid
    if not g.dealias:
        return f
    spec = _rfft2(f.values)
    spec *= g.dealias_mask
    return ScalarField(g, _irfft2(spec, (g.nx, g.ny)))


def integrate(f: ScalarField) -> float:
    """Trapezoidal (= spectrally exact) integral over the periodic domain."""
    return float(f.values.sum() * f.grid.cell_area)


def solve_helmholtz(rhs: ScalarField, a: float) -> ScalarField:
    """Solve ``(I - a * laplacian) u = rhs`` mode-by-mode.

    ``a`` must be nonnegative so the operator is positive definite; the mean
    mode passes through unchanged.
    """
    if a < 0.0:
        raise ValueError(f"helmholtz coefficient must be >= 0, got {a}")
    g = rhs.grid
    spec = _rfft2(rhs.values)
    spec /= 1.0 + a * g.k2
    return ScalarField(g, _irfft2(spec, (g.nx, g.ny)))
