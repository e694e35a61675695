"""Phase function, multipliers, sweeps and the direct bilinear oracle."""

from nsc_toolkit.resonance.bilinear import (
    q_m_direct,
    set_size_ratio,
    set_size_sweep,
)
from nsc_toolkit.resonance.multipliers import (
    Factor,
    MultiplierSpec,
    evaluate,
    res_nr_split,
)
from nsc_toolkit.resonance.sweeps import (
    PREDICATES,
    index_geometry,
    run_geometry_suite,
    space_time_resonance_sweep,
)
from nsc_toolkit.resonance.symbols import (
    SymbolSample,
    grad_lambda,
    lam,
    make_sample,
    normal_form_denominator,
    phase_derivatives,
    phi,
    polarized_denominator,
    sigma_bar,
)

__all__ = [
    'PREDICATES',
    'Factor',
    'MultiplierSpec',
    'SymbolSample',
    'evaluate',
    'grad_lambda',
    'index_geometry',
    'lam',
    'make_sample',
    'normal_form_denominator',
    'phase_derivatives',
    'phi',
    'polarized_denominator',
    'q_m_direct',
    'res_nr_split',
    'run_geometry_suite',
    'set_size_ratio',
    'set_size_sweep',
    'sigma_bar',
    'space_time_resonance_sweep',
]
