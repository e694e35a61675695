"""
Dispersive unknowns of the rotating flow

A divergence-free velocity u is carried by two scalars,

    A = |grad_h|^-1 curl_h u,        C = |grad| |grad_h|^-1 u_3,

with U+- = A +- C diagonalizing the Coriolis coupling. Profiles strip the
oscillation: profile+- = exp(-+ i t Lambda) U+-. Every map here is a
Fourier multiplier, singular on the xi_h = 0 line where the unknowns are
defined to vanish.
"""

import dataclasses
import logging
import math
import typing

import numpy as np

from nsc_toolkit import settings
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Direction = typing.Literal['to_profile', 'to_unknown']
Sign = typing.Literal[1, -1]


@dataclasses.dataclass(frozen=True, eq=False)
class DispersivePair:
    """The unknowns (A, C) at time t."""

    a: grid_mod.SpectralField
    c: grid_mod.SpectralField
    t: float = 0.0
    kappa: float = 0.0

    @property
    def grid(self) -> grid_mod.Grid:
        return self.a.grid


@dataclasses.dataclass(frozen=True, eq=False)
class ProfilePair:
    u_plus: grid_mod.SpectralField
    u_minus: grid_mod.SpectralField
    t: float = 0.0
    kappa: float = 0.0

    @property
    def grid(self) -> grid_mod.Grid:
        return self.u_plus.grid


def _safe_inverse(values: grid_mod.RealArray) -> grid_mod.RealArray:
    out = np.zeros_like(values)
    np.divide(1.0, values, out=out, where=values > 0)
    return out


def axis_mass_fraction(v: grid_mod.VectorField) -> float:
    """Share of |u|^2 carried by the xi_h = 0 line."""
    density = np.sum(np.abs(v.coeffs) ** 2, axis=0)
    total = float(density.sum())
    if total == 0.0:
        return 0.0
    return float(density[v.grid.axis_mask].sum()) / total


def project_off_axis(
    v: grid_mod.VectorField,
) -> tuple[grid_mod.VectorField, float]:
    """Zero the xi_h = 0 line; returns the field and the removed mass."""
    removed = float(
        v.grid.volume * np.sum(np.abs(v.coeffs[:, v.grid.axis_mask]) ** 2)
    )
    coeffs = v.coeffs.copy()
    coeffs[:, v.grid.axis_mask] = 0.0
    return grid_mod.VectorField(v.grid, coeffs), removed


def _check_axis_mass(v: grid_mod.VectorField) -> float:
    fraction = axis_mass_fraction(v)
    tolerance = settings.get_settings().localization.axisymmetry_tolerance
    if fraction > tolerance:
        LOGGER.warning(
            'Dropping %.3e of the L2 mass on the xi_h = 0 line', fraction
        )
    return fraction


def a_multiplier(
    grid: grid_mod.Grid, v: grid_mod.ComplexArray
) -> grid_mod.ComplexArray:
    """i (xi_1 v_2 - xi_2 v_1) / |xi_h|, zero on the axis."""
    x1, x2, _x3 = grid.xi
    return 1j * (x1 * v[1] - x2 * v[0]) * _safe_inverse(grid.xi_h_norm)


def c_multiplier(
    grid: grid_mod.Grid, v: grid_mod.ComplexArray
) -> grid_mod.ComplexArray:
    """|xi| v_3 / |xi_h|, zero on the axis."""
    return grid.xi_norm * v[2] * _safe_inverse(grid.xi_h_norm)


def to_dispersive(state: grid_mod.VelocityState) -> DispersivePair:
    v = state.velocity
    _check_axis_mass(v)
    grid = v.grid
    return DispersivePair(
        a=grid_mod.SpectralField(grid, a_multiplier(grid, v.coeffs)),
        c=grid_mod.SpectralField(grid, c_multiplier(grid, v.coeffs)),
        t=state.t,
        kappa=state.kappa,
    )


def from_dispersive(pair: DispersivePair) -> grid_mod.VelocityState:
    """Rebuild the divergence-free velocity from (A, C).

    u_3 = |xi_h| C / |xi| and u_h = alpha xi_h + beta xi_h^perp with
    alpha = -xi_3 u_3 / |xi_h|^2, beta = -i A / |xi_h| and
    xi_h^perp = (-xi_2, xi_1).

    """
    grid = pair.grid
    x1, x2, x3 = grid.xi
    inv_h = _safe_inverse(grid.xi_h_norm)
    u3 = grid.xi_h_norm * _safe_inverse(grid.xi_norm) * pair.c.coeffs
    alpha = -x3 * u3 * inv_h**2
    beta = -1j * pair.a.coeffs * inv_h
    coeffs = np.stack([alpha * x1 - beta * x2, alpha * x2 + beta * x1, u3])
    coeffs[:, grid.axis_mask] = 0.0
    return grid_mod.VelocityState(
        grid_mod.VectorField(grid, coeffs), t=pair.t, kappa=pair.kappa
    )


def u_pm(
    pair: DispersivePair,
) -> tuple[grid_mod.SpectralField, grid_mod.SpectralField]:
    return pair.a + pair.c, pair.a - pair.c


def from_u_pm(
    u_plus: grid_mod.SpectralField,
    u_minus: grid_mod.SpectralField,
    t: float = 0.0,
    kappa: float = 0.0,
) -> DispersivePair:
    return DispersivePair(
        a=0.5 * (u_plus + u_minus),
        c=0.5 * (u_plus - u_minus),
        t=t,
        kappa=kappa,
    )


def wind_profile(
    field: grid_mod.SpectralField,
    t: float,
    sign: Sign,
    direction: Direction = 'to_profile',
    coupling_sign: Sign = 1,
) -> grid_mod.SpectralField:
    """Multiply by exp(-+ i t Lambda) (to_profile) or its inverse."""
    phase = -sign * coupling_sign * t * field.grid.lam
    if direction == 'to_unknown':
        phase = -phase
    return field.multiply(np.exp(1j * phase))


def to_profiles(
    pair: DispersivePair, coupling_sign: Sign = 1
) -> ProfilePair:
    u_plus, u_minus = u_pm(pair)
    return ProfilePair(
        u_plus=wind_profile(u_plus, pair.t, 1, coupling_sign=coupling_sign),
        u_minus=wind_profile(
            u_minus, pair.t, -1, coupling_sign=coupling_sign
        ),
        t=pair.t,
        kappa=pair.kappa,
    )


def from_profiles(
    profiles: ProfilePair, coupling_sign: Sign = 1
) -> DispersivePair:
    t = profiles.t
    return from_u_pm(
        wind_profile(
            profiles.u_plus, t, 1, 'to_unknown', coupling_sign
        ),
        wind_profile(
            profiles.u_minus, t, -1, 'to_unknown', coupling_sign
        ),
        t=t,
        kappa=profiles.kappa,
    )


def velocity_from_profiles(
    profiles: ProfilePair, coupling_sign: Sign = 1
) -> grid_mod.VelocityState:
    return from_dispersive(from_profiles(profiles, coupling_sign))


def profiles_from_velocity(
    state: grid_mod.VelocityState, coupling_sign: Sign = 1
) -> ProfilePair:
    return to_profiles(to_dispersive(state), coupling_sign)


def quadratic_products(
    v: grid_mod.VectorField, *, dealias: bool = True
) -> dict[tuple[int, int], grid_mod.ComplexArray]:
    """Spectra of u_j u_k for j <= k, formed in physical space."""
    grid = v.grid
    coeffs = v.coeffs.copy()
    if dealias:
        calculus.dealias(coeffs, grid)
    values = grid.to_physical(coeffs)
    products: dict[tuple[int, int], grid_mod.ComplexArray] = {}
    for j in range(3):
        for k in range(j, 3):
            spectrum = grid.to_spectral(values[j] * values[k])
            if dealias:
                calculus.dealias(spectrum, grid)
            else:
                spectrum[~grid.nyquist_mask] = 0.0
            products[j, k] = products[k, j] = spectrum
    return products


def nonlinearity_ac(
    state: grid_mod.VelocityState, *, dealias: bool = True
) -> tuple[grid_mod.SpectralField, grid_mod.SpectralField]:
    n_a, n_c, _axis = nonlinearity_ac_with_axis(state, dealias=dealias)
    return n_a, n_c


def nonlinearity_ac_with_axis(
    state: grid_mod.VelocityState, *, dealias: bool = True
) -> tuple[grid_mod.SpectralField, grid_mod.SpectralField, float]:
    """Quadratic forcing (N_A, N_C) of the A and C equations.

    N_A = (xi_1 xi_n P_n2 - xi_2 xi_n P_n1) / |xi_h| with P_jk the
    spectrum of u_j u_k, and

        N_C = -i |xi| / |xi_h| xi_j (1 - 2 Lambda^2) P_3j
              - i xi_3 |xi_h| P_33 / |xi|
              + i xi_3 xi_j xi_k P_jk / (|xi| |xi_h|),

    j, k over the horizontal indices. Both vanish on the xi_h = 0 line;
    the third value is the L2 norm of the projected advection there,
    -i xi_3 (P_13, P_23), which the unknowns cannot carry.

    """
    grid = state.grid
    products = quadratic_products(state.velocity, dealias=dealias)
    xi = grid.xi
    x1, x2, x3 = xi
    inv_h = _safe_inverse(grid.xi_h_norm)
    inv = _safe_inverse(grid.xi_norm)
    lam_sq = grid.lam**2

    def transport(k: int) -> grid_mod.ComplexArray:
        return typing.cast(
            grid_mod.ComplexArray,
            sum(xi[n] * products[n, k] for n in range(3)),
        )

    n_a = (x1 * transport(1) - x2 * transport(0)) * inv_h
    swirl = x1 * products[2, 0] + x2 * products[2, 1]
    horizontal = (
        x1 * x1 * products[0, 0]
        + 2.0 * x1 * x2 * products[0, 1]
        + x2 * x2 * products[1, 1]
    )
    n_c = (
        -1j * grid.xi_norm * inv_h * (1.0 - 2.0 * lam_sq) * swirl
        - 1j * x3 * grid.xi_h_norm * inv * products[2, 2]
        + 1j * x3 * horizontal * inv * inv_h
    )
    axis = grid.axis_mask & grid.nyquist_mask
    dropped = math.sqrt(
        grid.volume
        * float(
            np.sum(
                (np.broadcast_to(x3, grid.shape)[axis] ** 2)
                * (
                    np.abs(products[0, 2][axis]) ** 2
                    + np.abs(products[1, 2][axis]) ** 2
                )
            )
        )
    )
    n_a[grid.axis_mask] = 0.0
    n_c[grid.axis_mask] = 0.0
    return (
        grid_mod.SpectralField(grid, n_a),
        grid_mod.SpectralField(grid, n_c),
        dropped,
    )


def nonlinearity_leray(
    state: grid_mod.VelocityState, *, dealias: bool = True
) -> grid_mod.VectorField:
    """-P div(u (x) u): the projected advection term of the velocity."""
    grid = state.grid
    products = quadratic_products(state.velocity, dealias=dealias)
    xi = grid.xi
    coeffs = np.stack(
        [
            -1j * sum(xi[k] * products[j, k] for k in range(3))
            for j in range(3)
        ]
    )
    return calculus.leray_project(grid_mod.VectorField(grid, coeffs))
