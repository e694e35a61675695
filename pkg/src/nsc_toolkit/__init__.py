"""nsc-toolkit - rotating Navier-Stokes simulation and dispersive analysis."""

from importlib import metadata

from nsc_toolkit import (
    energy,
    errors,
    localization,
    logging,
    models,
    norms,
    propagator,
    settings,
    unknowns,
)

try:
    version = metadata.version('nsc-toolkit')
except metadata.PackageNotFoundError:
    version = '0.0.0'

__all__ = [
    'energy',
    'errors',
    'localization',
    'logging',
    'models',
    'norms',
    'propagator',
    'settings',
    'unknowns',
    'version',
]
