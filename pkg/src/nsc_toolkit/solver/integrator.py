"""
Time integration of the rotating flow in profile variables

The state is the pair of profiles V+- = exp(-+ i t Lambda) U+-, which
obey

    d/dt V+- + kappa |xi|^2 V+- = exp(-+ i t Lambda) (N_A +- N_C).

The heat factor is applied exactly and the forcing is advanced with the
classical fourth-order Runge-Kutta weights (Lawson's integrating-factor
scheme). The dispersive phase enters only through unwinding the profiles
to a velocity and rewinding the forcing, so kappa = 0 runs the same
code path.
"""

import dataclasses
import logging
import math
import pathlib
import typing
from collections import abc

import numpy as np

from nsc_toolkit import errors, models, norms, settings, unknowns
from nsc_toolkit.solver import initial as initial_mod
from nsc_toolkit.spectral import calculus, checkpoint
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Observer = abc.Callable[[int, unknowns.ProfilePair], None]


def dyadic_window(t: float) -> tuple[list[int], int]:
    """Dyadic windows [2^(m-1), 2^(m+1)] holding t, and ceil(log2(t+2))."""
    if t < 0:
        raise errors.DomainError('t must be >= 0')
    count = math.ceil(math.log2(t + 2.0))
    windows = [
        m for m in range(count + 1) if 2.0 ** (m - 1) <= t <= 2.0 ** (m + 1)
    ]
    return windows, count


def _crossed_dyadic(t_old: float, t_new: float) -> bool:
    """True when (t_old, t_new] contains a power of two."""
    if t_new < 1.0:
        return False
    m = math.floor(math.log2(t_new))
    return t_old < 2.0**m <= t_new


class Integrator:
    """Integrating-factor RK4 stepper for the profile equation.

    Example usage:
        integrator = Integrator(kappa=0.01)
        profiles = integrator.step(profiles, 0.05)

    """

    def __init__(
        self,
        kappa: float,
        *,
        nonlinear: bool = True,
        dealias: bool = True,
        coupling_sign: unknowns.Sign = 1,
    ) -> None:
        self.kappa = kappa
        self.nonlinear = nonlinear
        self.dealias = dealias
        self.coupling_sign = coupling_sign
        self.projected_axis_mass = 0.0
        self._last_axis = 0.0

    def _pair(
        self, grid: grid_mod.Grid, t: float, v: grid_mod.ComplexArray
    ) -> unknowns.ProfilePair:
        return unknowns.ProfilePair(
            grid_mod.SpectralField(grid, v[0]),
            grid_mod.SpectralField(grid, v[1]),
            t=t,
            kappa=self.kappa,
        )

    def velocity(
        self, profiles: unknowns.ProfilePair
    ) -> grid_mod.VelocityState:
        return unknowns.velocity_from_profiles(profiles, self.coupling_sign)

    def rhs(
        self, grid: grid_mod.Grid, t: float, v: grid_mod.ComplexArray
    ) -> grid_mod.ComplexArray:
        """Rewound forcing of both profiles, stacked like ``v``."""
        out = np.zeros_like(v)
        if not self.nonlinear:
            self._last_axis = 0.0
            return out
        state = self.velocity(self._pair(grid, t, v))
        n_a, n_c, self._last_axis = unknowns.nonlinearity_ac_with_axis(
            state, dealias=self.dealias
        )
        for index, sign in enumerate((1, -1)):
            forcing = n_a + n_c if sign == 1 else n_a - n_c
            out[index] = unknowns.wind_profile(
                forcing,
                t,
                typing.cast(unknowns.Sign, sign),
                'to_profile',
                self.coupling_sign,
            ).coeffs
        return out

    def _heat(self, grid: grid_mod.Grid, h: float) -> grid_mod.RealArray:
        return calculus.heat_multiplier(grid, self.kappa, h)

    def advance(
        self,
        grid: grid_mod.Grid,
        t: float,
        v: grid_mod.ComplexArray,
        h: float,
    ) -> grid_mod.ComplexArray:
        """One Lawson RK4 step of size h (h may be negative)."""
        half = self._heat(grid, h / 2)
        full = self._heat(grid, h)
        k1 = self.rhs(grid, t, v)
        axis = self._last_axis
        k2 = self.rhs(grid, t + h / 2, half * (v + h / 2 * k1))
        k3 = self.rhs(grid, t + h / 2, half * v + h / 2 * k2)
        k4 = self.rhs(grid, t + h, full * v + h * half * k3)
        self.projected_axis_mass += abs(h) * axis
        return typing.cast(
            grid_mod.ComplexArray,
            full * v
            + h / 6 * (full * k1 + 2.0 * half * (k2 + k3) + k4),
        )

    def step(
        self, profiles: unknowns.ProfilePair, dt: float
    ) -> unknowns.ProfilePair:
        grid = profiles.grid
        v = np.stack([profiles.u_plus.coeffs, profiles.u_minus.coeffs])
        with np.errstate(over='ignore', invalid='ignore'):
            advanced = self.advance(grid, profiles.t, v, dt)
        return self._pair(grid, profiles.t + dt, advanced)

    def stable_dt(self, profiles: unknowns.ProfilePair) -> float:
        """min(cfl spacing / max|u|, MAX_DT)."""
        state = self.velocity(profiles)
        speed = float(
            np.max(np.linalg.norm(state.velocity.physical().real, axis=0))
        )
        if speed == 0.0:
            return settings.MAX_DT
        return min(
            settings.CFL_CONSTANT * profiles.grid.spacing / speed,
            settings.MAX_DT,
        )


@dataclasses.dataclass
class RunResult:
    series: models.TimeSeries
    final: unknowns.ProfilePair
    checkpoints: list[pathlib.Path] = dataclasses.field(
        default_factory=list
    )


def _norm_record(
    profiles: unknowns.ProfilePair,
) -> dict[str, float]:
    out = {}
    for suffix, field in (
        ('plus', profiles.u_plus),
        ('minus', profiles.u_minus),
    ):
        out[f'b_{suffix}'] = norms.b_norm(field).value
        out[f'x_{suffix}'] = norms.x_norm(field).value
        out[f'd_{suffix}'] = norms.d_norm(field)
    return out


def diagnostics(
    step: int,
    profiles: unknowns.ProfilePair,
    integrator: Integrator,
    *,
    with_norms: bool = False,
) -> models.TimeSeriesRecord:
    state = integrator.velocity(profiles)
    v = state.velocity
    extra = _norm_record(profiles) if with_norms else {}
    return models.TimeSeriesRecord(
        step=step,
        t=profiles.t,
        l2=v.l2_norm(),
        h1=norms.homogeneous_norm(v, 1.0),
        grad_sup=norms.sup_gradient(v),
        divergence_residual=calculus.divergence_residual(v),
        axisymmetry_residual=norms.axisymmetry_residual(state),
        axis_mass=integrator.projected_axis_mass,
        **extra,
    )


def _save(
    path: pathlib.Path,
    profiles: unknowns.ProfilePair,
    integrator: Integrator,
) -> pathlib.Path:
    state = integrator.velocity(profiles)
    checkpoint.save(
        path,
        grid_mod.VelocityState(state.velocity, profiles.t, profiles.kappa),
    )
    return path


def run(
    config: settings.SimConfig,
    initial: grid_mod.VelocityState | None = None,
    *,
    observer: Observer | None = None,
    write_final: bool = True,
) -> RunResult:
    """Integrate ``config`` to t_end.

    Records are taken every ``diagnostics_every`` steps, whenever t
    crosses a power of two and at the end; ``observer`` sees the
    profiles at each record. Checkpoints, and unless ``write_final`` is
    false the final state, go to ``config.output_dir``.

    Raises:
        NumericalAbort: when the state stops being finite; the last
            finite state is written to ``last-good.nsck`` first

    """
    grid = grid_mod.make_grid(config.n, config.box_scale)
    if initial is None:
        initial = initial_mod.init_axisymmetric(
            config.init.family,
            config.epsilon,
            config.init.params,
            grid,
            kappa=config.kappa,
        )
    integrator = Integrator(
        config.kappa,
        nonlinear=config.nonlinear,
        dealias=config.dealias,
        coupling_sign=config.coupling_sign,
    )
    state = grid_mod.VelocityState(initial.velocity, 0.0, config.kappa)
    profiles = unknowns.profiles_from_velocity(state, config.coupling_sign)
    orders = range(1, settings.get_settings().norms.sobolev_order + 1)
    series = models.TimeSeries(kappa=config.kappa, dt=0.0)
    checkpoints: list[pathlib.Path] = []
    if config.checkpoint_every or write_final:
        config.output_dir.mkdir(parents=True, exist_ok=True)

    def record(step: int) -> None:
        with_norms = bool(config.norms_every) and (
            step % config.norms_every == 0
        )
        series.records.append(
            diagnostics(step, profiles, integrator, with_norms=with_norms)
        )
        if observer is not None:
            observer(step, profiles)

    def energy_row() -> None:
        v = integrator.velocity(profiles).velocity
        series.energy.append([profiles.t, *norms.energy_profile(v, orders)])

    record(0)
    energy_row()
    step = 0
    while profiles.t < config.t_end - 1e-12 * max(config.t_end, 1.0):
        if config.dt == 'auto':
            dt = integrator.stable_dt(profiles)
        else:
            dt = config.dt
        dt = min(dt, config.t_end - profiles.t)
        if step == 0:
            series.dt = dt
        previous = profiles
        profiles = integrator.step(profiles, dt)
        step += 1
        if not (
            np.all(np.isfinite(profiles.u_plus.coeffs))
            and np.all(np.isfinite(profiles.u_minus.coeffs))
        ):
            config.output_dir.mkdir(parents=True, exist_ok=True)
            path = _save(
                config.output_dir / 'last-good.nsck', previous, integrator
            )
            raise errors.NumericalAbort(
                f'non-finite state at step {step}, t={profiles.t:.6g}',
                path,
            )
        LOGGER.debug('step %d t=%.6g dt=%.3g', step, profiles.t, dt)
        energy_row()
        done = profiles.t >= config.t_end - 1e-12 * max(config.t_end, 1.0)
        if (
            step % config.diagnostics_every == 0
            or _crossed_dyadic(previous.t, profiles.t)
            or done
        ):
            record(step)
        if config.checkpoint_every and step % config.checkpoint_every == 0:
            checkpoints.append(
                _save(
                    config.output_dir / f'checkpoint-{step:06d}.nsck',
                    profiles,
                    integrator,
                )
            )
    if write_final:
        checkpoints.append(
            _save(config.output_dir / 'final.nsck', profiles, integrator)
        )
    LOGGER.info(
        'Run finished at t=%.6g after %d steps, |u|=%.6e',
        profiles.t,
        step,
        series.records[-1].l2,
    )
    return RunResult(series=series, final=profiles, checkpoints=checkpoints)
