"""Spectral differential operators and coordinate-weighted vector fields."""

import logging
import typing

import numpy as np

from nsc_toolkit import settings
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Kind = typing.Literal['scalar', 'vector']
OmegaConvention = typing.Literal['identity', 'rotation']

# S f = x.grad f - 2 f on scalars, S v = (x.grad) v - v on vectors
_S_SHIFT: dict[str, float] = {'scalar': 2.0, 'vector': 1.0}


def gradient(f: grid_mod.SpectralField) -> grid_mod.VectorField:
    grid = f.grid
    coeffs = np.stack([1j * xi * f.coeffs for xi in grid.xi])
    coeffs[:, ~grid.nyquist_mask] = 0.0
    return grid_mod.VectorField(grid, coeffs)


def divergence(v: grid_mod.VectorField) -> grid_mod.SpectralField:
    grid = v.grid
    coeffs = sum(
        (1j * xi * v.coeffs[j] for j, xi in enumerate(grid.xi)),
        start=np.zeros(grid.shape, dtype=np.complex128),
    )
    return grid_mod.SpectralField(grid, coeffs)


def curl(v: grid_mod.VectorField) -> grid_mod.VectorField:
    x1, x2, x3 = v.grid.xi
    u1, u2, u3 = v.coeffs
    coeffs = 1j * np.stack(
        [x2 * u3 - x3 * u2, x3 * u1 - x1 * u3, x1 * u2 - x2 * u1]
    )
    return grid_mod.VectorField(v.grid, coeffs)


def laplacian[F: (grid_mod.SpectralField, grid_mod.VectorField)](f: F) -> F:
    return type(f)(f.grid, -f.grid.xi_norm_sq * f.coeffs)


def leray_project(v: grid_mod.VectorField) -> grid_mod.VectorField:
    """Remove the gradient part: u - xi (xi . u) / |xi|^2."""
    grid = v.grid
    xi = grid.xi
    dot = sum(x * c for x, c in zip(xi, v.coeffs, strict=True))
    norm_sq = np.where(grid.xi_norm_sq > 0, grid.xi_norm_sq, 1.0)
    coeffs = np.stack(
        [c - x * dot / norm_sq for x, c in zip(xi, v.coeffs, strict=True)]
    )
    coeffs[:, ~grid.nyquist_mask] = 0.0
    return grid_mod.VectorField(grid, coeffs)


def coriolis(v: grid_mod.VectorField) -> grid_mod.VectorField:
    """e_3 x u = (-u_2, u_1, 0)."""
    u1, u2, _u3 = v.coeffs
    return grid_mod.VectorField(
        v.grid, np.stack([-u2, u1, np.zeros_like(u1)])
    )


def dealias(coeffs: grid_mod.ComplexArray, grid: grid_mod.Grid) -> None:
    """Zero, in place, every mode outside the two-thirds band."""
    coeffs[..., ~grid.dealias_mask] = 0.0


def divergence_residual(v: grid_mod.VectorField) -> float:
    """|div u| relative to |grad u| in L^2."""
    scale = float(np.sqrt(np.sum(v.grid.xi_norm_sq * np.abs(v.coeffs) ** 2)))
    if scale == 0.0:
        return 0.0
    div = divergence(v).coeffs
    return float(np.sqrt(np.sum(np.abs(div) ** 2))) / scale


def outer_mass_fraction(
    grid: grid_mod.Grid, values: grid_mod.ComplexArray
) -> float:
    """Fraction of L^2 mass in the outer shell of the box."""
    window = settings.get_settings().window
    limit = (1.0 - window.outer_fraction) * np.pi * grid.box_scale
    x1, x2, x3 = grid.coordinates
    outer = (
        (np.abs(x1) > limit) | (np.abs(x2) > limit) | (np.abs(x3) > limit)
    )
    density = np.abs(values) ** 2
    if density.ndim == 4:
        density = density.sum(axis=0)
    total = float(density.sum())
    if total == 0.0:
        return 0.0
    return float(density[np.broadcast_to(outer, grid.shape)].sum()) / total


def check_window(
    grid: grid_mod.Grid, values: grid_mod.ComplexArray
) -> float:
    """Warn when coordinate multiplication would see the box edge."""
    fraction = outer_mass_fraction(grid, values)
    threshold = settings.get_settings().window.mass_threshold
    if fraction > threshold:
        LOGGER.warning(
            'Window violated: %.3e of the L2 mass lies in the outer shell '
            '(threshold %.3e)',
            fraction,
            threshold,
        )
    return fraction


def _weighted_derivative(
    grid: grid_mod.Grid,
    coeffs: grid_mod.ComplexArray,
    weights: tuple[typing.Any, typing.Any, typing.Any],
) -> grid_mod.ComplexArray:
    """sum_j w_j(x) d_j f, evaluated in physical space."""
    total = np.zeros(coeffs.shape, dtype=np.complex128)
    for xi, weight in zip(grid.xi, weights, strict=True):
        if weight is None:
            continue
        total += weight * grid.to_physical(1j * xi * coeffs)
    out = grid.to_spectral(total)
    out[..., ~grid.nyquist_mask] = 0.0
    return out


@typing.overload
def s_field(
    f: grid_mod.SpectralField, kind: typing.Literal['scalar'] = ...
) -> grid_mod.SpectralField: ...


@typing.overload
def s_field(
    f: grid_mod.VectorField, kind: typing.Literal['vector'] = ...
) -> grid_mod.VectorField: ...


def s_field(
    f: grid_mod.SpectralField | grid_mod.VectorField,
    kind: Kind | None = None,
) -> grid_mod.SpectralField | grid_mod.VectorField:
    """Scaling vector field S.

    Scalar kind applies x.grad f - 2f; vector kind applies (x.grad)v - v
    componentwise. Coordinates are centered, so the input must be
    concentrated away from the box edge; a warning is logged otherwise.

    """
    if kind is None:
        kind = 'vector' if isinstance(f, grid_mod.VectorField) else 'scalar'
    grid = f.grid
    check_window(grid, f.physical())
    coeffs = _weighted_derivative(grid, f.coeffs, grid.coordinates)
    coeffs -= _S_SHIFT[kind] * f.coeffs
    return type(f)(grid, coeffs)


def omega_field[F: (grid_mod.SpectralField, grid_mod.VectorField)](
    f: F, convention: OmegaConvention = 'identity'
) -> F:
    """Rotation field Omega = x_1 d_2 - x_2 d_1.

    Vector fields get the scalar operator on each Cartesian component and
    then a mixing term: ``identity`` subtracts v itself, ``rotation``
    subtracts e_3 x v (the generator that annihilates axisymmetric vector
    fields).

    """
    grid = f.grid
    check_window(grid, f.physical())
    x1, x2, _x3 = grid.coordinates
    coeffs = _weighted_derivative(grid, f.coeffs, (-x2, x1, None))
    if isinstance(f, grid_mod.VectorField):
        if convention == 'identity':
            coeffs -= f.coeffs
        else:
            coeffs -= coriolis(f).coeffs
    return type(f)(grid, coeffs)


def heat_multiplier(
    grid: grid_mod.Grid, kappa: float, t: float
) -> grid_mod.RealArray:
    """exp(-kappa t |xi|^2)."""
    return typing.cast(
        grid_mod.RealArray, np.exp(-kappa * t * grid.xi_norm_sq)
    )
