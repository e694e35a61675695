"""Consistency oracle and the inviscid-limit experiment."""

import itertools
import logging
import math
from collections import abc
from concurrent import futures

import numpy as np
import numpy.typing as npt
from scipy import integrate

from nsc_toolkit import errors, helpers, models, settings, unknowns
from nsc_toolkit.solver import initial as initial_mod
from nsc_toolkit.solver import integrator as integrator_mod
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

MAX_ORACLE_MODES = 16
MAX_INVISCID_KAPPA = 0.1
CHAIN_ALLOWANCE = 0.05


def consistency_oracle(
    profiles: unknowns.ProfilePair,
    dt: float,
    *,
    nonlinear: bool = True,
    dealias: bool = True,
    coupling_sign: unknowns.Sign = 1,
) -> models.OracleReport:
    """Check the profile equation with a central difference in time.

    Steps the solver by +-dt from ``profiles`` and compares

        (V(t + dt) - V(t - dt)) / (2 dt) + kappa |xi|^2 V(t)

    with the rewound forcing exp(-+ i t Lambda) (N_A +- N_C) at t. The
    defect is relative to the forcing, or absolute when the forcing
    vanishes.

    Raises:
        GridTooLargeError: when the grid has more than 16 modes per axis

    """
    grid = profiles.grid
    if grid.n > MAX_ORACLE_MODES:
        raise errors.GridTooLargeError(grid.n, MAX_ORACLE_MODES)
    if dt <= 0:
        raise errors.DomainError('dt must be > 0')
    stepper = integrator_mod.Integrator(
        profiles.kappa,
        nonlinear=nonlinear,
        dealias=dealias,
        coupling_sign=coupling_sign,
    )
    v = np.stack([profiles.u_plus.coeffs, profiles.u_minus.coeffs])
    forward = stepper.advance(grid, profiles.t, v, dt)
    backward = stepper.advance(grid, profiles.t, v, -dt)
    forcing = stepper.rhs(grid, profiles.t, v)
    derivative = (forward - backward) / (2.0 * dt)
    derivative += profiles.kappa * grid.xi_norm_sq * v
    scale = float(np.linalg.norm(forcing))
    defect = float(np.linalg.norm(derivative - forcing))
    if scale > 0:
        return models.OracleReport(
            dt=dt, defect=defect / scale, relative=True
        )
    return models.OracleReport(
        dt=dt, defect=math.sqrt(grid.volume) * defect, relative=False
    )


def _collect(
    config: settings.SimConfig,
    velocity: grid_mod.ComplexArray,
) -> tuple[models.TimeSeries, list[float], list[grid_mod.ComplexArray]]:
    """Run one kappa and keep the velocity at every record."""
    grid = grid_mod.make_grid(config.n, config.box_scale)
    initial = grid_mod.VelocityState(
        grid_mod.VectorField(grid, velocity), kappa=config.kappa
    )
    times: list[float] = []
    fields: list[grid_mod.ComplexArray] = []
    stepper = integrator_mod.Integrator(
        config.kappa, coupling_sign=config.coupling_sign
    )

    def observe(_step: int, profiles: unknowns.ProfilePair) -> None:
        times.append(profiles.t)
        fields.append(stepper.velocity(profiles).velocity.coeffs)

    result = integrator_mod.run(
        config, initial, observer=observe, write_final=False
    )
    return result.series, times, fields


def gronwall_envelope(
    delta_kappa: float, series: models.TimeSeries
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """int_0^t |dk| |grad u|^2 exp(int_s^t 2 |grad u|_inf) ds per step.

    ``series`` is the run with the smaller viscosity.

    """
    rows = np.asarray(series.energy, dtype=np.float64)
    times = rows[:, 0]
    if times.size < 2:
        return times, np.zeros_like(times)
    growth = integrate.cumulative_trapezoid(
        2.0 * rows[:, 3], times, initial=0.0
    )
    weighted = integrate.cumulative_trapezoid(
        delta_kappa * rows[:, 2] * np.exp(-growth), times, initial=0.0
    )
    return times, np.exp(growth) * weighted


def _fit(x: abc.Sequence[float], y: abc.Sequence[float]) -> float | None:
    try:
        return helpers.fit_loglog(x, y)
    except errors.DomainError:
        return None


def inviscid_limit_experiment(
    config: settings.SimConfig,
    kappas: abc.Sequence[float],
    *,
    workers: int | None = None,
) -> models.ConvergenceReport:
    """Pairwise differences of runs that share data, grid and dt.

    Each pair (kappa_1 <= kappa_2) reports |u_1 - u_2|^2 at every record
    and the Gronwall envelope built from the less viscous run. Exponents
    are fitted in |dk| at t_end and in t over [1, t_end] for the pair
    with the largest |dk|, both for |v|^2 and |v|.

    Raises:
        ConfigurationError: fewer than two kappas or one outside
            [0, 0.1]

    """
    values = sorted(float(k) for k in kappas)
    if len(values) < 2:
        raise errors.ConfigurationError('need at least two kappas')
    if any(not 0.0 <= k <= MAX_INVISCID_KAPPA for k in values):
        raise errors.ConfigurationError(
            f'kappas must lie in [0, {MAX_INVISCID_KAPPA}]'
        )
    grid = grid_mod.make_grid(config.n, config.box_scale)
    state = initial_mod.init_axisymmetric(
        config.init.family, config.epsilon, config.init.params, grid
    )
    dt = config.dt
    if dt == 'auto':
        dt = integrator_mod.Integrator(0.0).stable_dt(
            unknowns.profiles_from_velocity(state, config.coupling_sign)
        )
    configs = [
        config.model_copy(update={'kappa': k, 'dt': dt}) for k in values
    ]
    velocity = state.velocity.coeffs
    if workers and workers > 1:
        with futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(_collect, configs, itertools.repeat(velocity))
            )
    else:
        outcomes = [_collect(c, velocity) for c in configs]
    volume = grid.volume
    pairs = []
    for i, j in itertools.combinations(range(len(values)), 2):
        series_1, times, fields_1 = outcomes[i]
        _series_2, _times_2, fields_2 = outcomes[j]
        delta = values[j] - values[i]
        difference = [
            volume * float(np.sum(np.abs(a - b) ** 2))
            for a, b in zip(fields_1, fields_2, strict=True)
        ]
        step_times, envelope = gronwall_envelope(delta, series_1)
        pairs.append(
            models.PairSeries(
                kappa_1=values[i],
                kappa_2=values[j],
                times=times,
                difference_sq=difference,
                envelope=np.interp(times, step_times, envelope).tolist(),
            )
        )
    report = models.ConvergenceReport(
        kappas=values,
        t_end=config.t_end,
        pairs=pairs,
        allowance=CHAIN_ALLOWANCE,
    )
    final = [
        (pair.kappa_2 - pair.kappa_1, pair.difference_sq[-1])
        for pair in pairs
        if pair.difference_sq
    ]
    report.exponent_kappa_sq = _fit(
        [d for d, _ in final], [v for _, v in final]
    )
    report.exponent_kappa = _fit(
        [d for d, _ in final], [math.sqrt(v) for _, v in final]
    )
    widest = max(pairs, key=lambda p: p.kappa_2 - p.kappa_1)
    late = [
        (t, v)
        for t, v in zip(widest.times, widest.difference_sq, strict=True)
        if t >= 1.0
    ]
    report.exponent_time_sq = _fit([t for t, _ in late], [v for _, v in late])
    report.exponent_time = _fit(
        [t for t, _ in late], [math.sqrt(v) for _, v in late]
    )
    if not report.chain_holds:
        LOGGER.warning(
            'Gronwall chain exceeded by more than %.0f%%',
            100 * CHAIN_ALLOWANCE,
        )
    LOGGER.info(
        'Inviscid limit: |dk| exponent %s, t exponent %s',
        report.exponent_kappa_sq,
        report.exponent_time_sq,
    )
    return report
