"""Axisymmetric initial data families."""

import logging
import typing
from collections import abc

import numpy as np

from nsc_toolkit import errors, norms, unknowns
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Family = typing.Literal['gaussian_swirl_ring', 'poloidal_vortex']

DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    'gaussian_swirl_ring': {'radius': 3.0, 'width': 1.5},
    'poloidal_vortex': {'radius': 3.0, 'width': 1.5, 'swirl': 0.0},
}


def _ring_profile(
    grid: grid_mod.Grid, radius: float, width: float
) -> grid_mod.RealArray:
    """exp(-((r - radius)^2 + z^2) / (2 width^2)) in cylindrical r, z."""
    x1, x2, x3 = grid.coordinates
    r = np.sqrt(x1**2 + x2**2)
    return typing.cast(
        grid_mod.RealArray,
        np.exp(-((r - radius) ** 2 + x3**2) / (2.0 * width**2)),
    )


def _swirl(
    grid: grid_mod.Grid, profile: grid_mod.RealArray
) -> grid_mod.VectorField:
    """u_theta = r g(r, z), i.e. g (-x_2, x_1, 0)."""
    x1, x2, _x3 = grid.coordinates
    values = np.stack(
        np.broadcast_arrays(-x2 * profile, x1 * profile, 0.0 * profile)
    )
    return grid_mod.VectorField.from_physical(grid, values)


def gaussian_swirl_ring(
    grid: grid_mod.Grid, radius: float, width: float
) -> grid_mod.VectorField:
    return _swirl(grid, _ring_profile(grid, radius, width))


def poloidal_vortex(
    grid: grid_mod.Grid, radius: float, width: float, swirl: float = 0.0
) -> grid_mod.VectorField:
    """Curl of a swirling potential, plus ``swirl`` times the potential."""
    potential = _swirl(grid, _ring_profile(grid, radius, width))
    return calculus.curl(potential) + swirl * potential


_BUILDERS: dict[str, abc.Callable[..., grid_mod.VectorField]] = {
    'gaussian_swirl_ring': gaussian_swirl_ring,
    'poloidal_vortex': poloidal_vortex,
}


def profile_amplitude(state: grid_mod.VelocityState) -> float:
    """max of the B and X norms of both profiles."""
    profiles = unknowns.profiles_from_velocity(state)
    return max(
        norm(field).value
        for field in (profiles.u_plus, profiles.u_minus)
        for norm in (norms.b_norm, norms.x_norm)
    )


def init_axisymmetric(
    family: str,
    epsilon: float,
    params: abc.Mapping[str, float] | None,
    grid: grid_mod.Grid,
    *,
    kappa: float = 0.0,
) -> grid_mod.VelocityState:
    """Divergence-free axisymmetric data whose profiles have size epsilon.

    The sampled field is Leray projected and its xi_h = 0 line removed
    before the amplitude is rescaled.

    Raises:
        ConfigurationError: unknown family, parameter or epsilon < 0

    """
    if family not in _BUILDERS:
        raise errors.ConfigurationError(
            f'unknown initial data family {family!r}'
        )
    if epsilon < 0:
        raise errors.ConfigurationError('epsilon must be >= 0')
    merged = dict(DEFAULT_PARAMS[family])
    for key, value in (params or {}).items():
        if key not in merged:
            raise errors.ConfigurationError(
                f'unknown parameter {key!r} for {family}'
            )
        merged[key] = float(value)
    if epsilon == 0:
        return grid_mod.VelocityState(
            grid_mod.VectorField.zeros(grid), kappa=kappa
        )
    sampled = _BUILDERS[family](grid, **merged)
    projected = calculus.leray_project(sampled)
    velocity, removed = unknowns.project_off_axis(projected)
    state = grid_mod.VelocityState(velocity, kappa=kappa)
    amplitude = profile_amplitude(state)
    if amplitude == 0.0:
        raise errors.ConfigurationError(
            f'{family} with {merged} vanishes on this grid'
        )
    LOGGER.info(
        'Initial %s: removed %.3e axis mass, rescaling by %.4g',
        family,
        removed,
        epsilon / amplitude,
    )
    return grid_mod.VelocityState(
        velocity * (epsilon / amplitude), kappa=kappa
    )
