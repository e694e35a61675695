"""Initial data, the profile integrator and solver experiments."""

from nsc_toolkit.solver.experiments import (
    consistency_oracle,
    gronwall_envelope,
    inviscid_limit_experiment,
)
from nsc_toolkit.solver.initial import init_axisymmetric
from nsc_toolkit.solver.integrator import (
    Integrator,
    RunResult,
    dyadic_window,
    run,
)

__all__ = [
    'Integrator',
    'RunResult',
    'consistency_oracle',
    'dyadic_window',
    'gronwall_envelope',
    'init_axisymmetric',
    'inviscid_limit_experiment',
    'run',
]
