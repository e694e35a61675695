"""Periodic grid, spectral calculus and checkpoint files."""

from nsc_toolkit.spectral.calculus import (
    coriolis,
    curl,
    dealias,
    divergence,
    divergence_residual,
    gradient,
    heat_multiplier,
    laplacian,
    leray_project,
    omega_field,
    s_field,
)
from nsc_toolkit.spectral.grid import (
    Grid,
    SpectralField,
    VectorField,
    VelocityState,
    make_grid,
)

__all__ = [
    'Grid',
    'SpectralField',
    'VectorField',
    'VelocityState',
    'coriolis',
    'curl',
    'dealias',
    'divergence',
    'divergence_residual',
    'gradient',
    'heat_multiplier',
    'laplacian',
    'leray_project',
    'make_grid',
    'omega_field',
    's_field',
]
