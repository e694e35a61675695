"""Windowed sample fields used by experiments and verification checks."""

import numpy as np

from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod


def gaussian(
    grid: grid_mod.Grid, width: float = 1.0
) -> grid_mod.SpectralField:
    """exp(-|x|^2 / (2 width^2)) centered in the box."""
    values = np.exp(-(grid.radius**2) / (2.0 * width**2))
    return grid_mod.SpectralField.from_physical(grid, values)


def windowed_random_scalar(
    grid: grid_mod.Grid,
    rng: np.random.Generator,
    width: float = 1.0,
    degree: int = 2,
) -> grid_mod.SpectralField:
    """Gaussian window times a random polynomial of the given degree."""
    x1, x2, x3 = grid.coordinates
    poly = np.zeros(grid.shape)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            for c in range(degree + 1 - a - b):
                poly = poly + rng.normal() * x1**a * x2**b * x3**c
    window = np.exp(-(grid.radius**2) / (2.0 * width**2))
    return grid_mod.SpectralField.from_physical(grid, poly * window)


def windowed_random_vector(
    grid: grid_mod.Grid,
    rng: np.random.Generator,
    width: float = 1.0,
    degree: int = 1,
) -> grid_mod.VectorField:
    """Divergence-free windowed field, the curl of a windowed potential."""
    potential = grid_mod.VectorField.from_components(
        [windowed_random_scalar(grid, rng, width, degree) for _ in range(3)]
    )
    return calculus.curl(potential)
