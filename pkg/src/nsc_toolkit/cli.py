"""
Command-line entry point

Every command writes its outputs and a ``manifest.json`` (command,
resolved configuration, version, seed, wall times, and the sha256 of
each output) into ``--out``. Exit codes: 0 on success, 1 when the input
is invalid, 2 when time integration stops on non-finite values.
"""

import argparse
import dataclasses
import datetime
import logging
import pathlib
import sys
import typing
from collections import abc

import numpy as np
import orjson
import pydantic
from scipy import fft

import nsc_toolkit
from nsc_toolkit import (
    energy,
    errors,
    helpers,
    models,
    norms,
    propagator,
    resonance,
    settings,
    unknowns,
)
from nsc_toolkit import logging as nsc_logging
from nsc_toolkit import solver
from nsc_toolkit.resonance import sweeps
from nsc_toolkit.spectral import checkpoint, fields
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

COMMANDS = (
    'simulate',
    'inviscid',
    'decay',
    'norms',
    'sweep',
    'energy-coeffs',
    'oracle',
)

# (predicate, (k, k1, k2), anisotropy indices) for xi, xi - eta, eta
GEOMETRY_CASES: tuple[
    tuple[sweeps.Predicate, tuple[int, int, int], tuple[int, int, int]],
    ...,
] = (
    ('low-p-output', (0, 0, 0), (-12, -1, -1)),
    ('low-p-output', (0, 1, 0), (-14, -2, -1)),
    ('low-q-output', (0, 0, 0), (-12, -1, -1)),
    ('low-p-inputs', (0, 6, 6), (-1, -16, -17)),
    ('low-q-inputs', (0, 6, 6), (-1, -16, -16)),
)


@dataclasses.dataclass
class Outcome:
    """What a command hands back for the manifest."""

    config: dict[str, typing.Any]
    outputs: list[pathlib.Path]
    seed: int | None = None


def parse_config(path: pathlib.Path) -> settings.SimConfig:
    """Read a SimConfig from a JSON file.

    Raises:
        ConfigurationError: unreadable file, invalid JSON, an unknown
            key, a type mismatch or a violated constraint; the message
            names the key

    """
    try:
        data = orjson.loads(path.read_bytes())
    except OSError as err:
        raise errors.ConfigurationError(
            f'cannot read config {path}: {err}'
        ) from err
    except orjson.JSONDecodeError as err:
        raise errors.ConfigurationError(
            f'{path} is not valid JSON: {err}'
        ) from err
    try:
        return settings.SimConfig.model_validate(data)
    except pydantic.ValidationError as err:
        problems = '; '.join(
            '{}: {}'.format(
                '.'.join(str(part) for part in error['loc']) or '<root>',
                error['msg'].removeprefix('Value error, '),
            )
            for error in err.errors()
        )
        raise errors.ConfigurationError(problems) from err


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(
            f'expected comma-separated numbers, got {text!r}'
        ) from err


def _cell(text: str) -> models.CellIndex:
    """k,p,q with 'floor' allowed for p and q; q may be left out."""
    parts = [part.strip() for part in text.split(',')]
    if not 2 <= len(parts) <= 3:
        raise argparse.ArgumentTypeError('cell must be k,p or k,p,q')

    def index(value: str) -> int | models.Floor:
        return models.FLOOR if value == models.FLOOR else int(value)

    try:
        return models.CellIndex(
            k=int(parts[0]),
            p=index(parts[1]),
            q=index(parts[2]) if len(parts) == 3 else None,
        )
    except (ValueError, pydantic.ValidationError) as err:
        raise argparse.ArgumentTypeError(f'invalid cell {text!r}') from err


def _with_output(
    config: settings.SimConfig, out: pathlib.Path
) -> settings.SimConfig:
    return config.model_copy(update={'output_dir': out})


def _simulate(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    config = _with_output(parse_config(args.config), out)
    result = solver.run(config)
    series = result.series
    series.write_csv(out / 'timeseries.csv')
    series.write_energy_csv(out / 'energy.csv')
    orders = settings.get_settings().norms.sobolev_order
    balances = [
        energy.energy_balance_report(series, m) for m in range(orders + 1)
    ]
    models.write_jsonl(out / 'balance.jsonl', balances)
    return Outcome(
        config=config.model_dump(mode='json'),
        outputs=[
            out / 'timeseries.csv',
            out / 'energy.csv',
            out / 'balance.jsonl',
            *result.checkpoints,
        ],
        seed=config.seed,
    )


def _inviscid(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    config = _with_output(parse_config(args.config), out)
    report = solver.inviscid_limit_experiment(
        config, args.kappas, workers=args.workers
    )
    models.write_json(out / 'convergence.json', report)
    return Outcome(
        config={
            **config.model_dump(mode='json'),
            'kappas': args.kappas,
        },
        outputs=[out / 'convergence.json'],
        seed=config.seed,
    )


def _measure(
    n: int,
    args: argparse.Namespace,
    times: abc.Sequence[float],
) -> models.DecayMeasurement:
    grid = grid_mod.make_grid(n, args.box_scale)
    f = fields.gaussian(grid, args.width)
    return propagator.measure_decay(
        f, args.cell, times, d_norm=norms.d_norm(f)
    )


def _decay(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    if args.tmax <= 1.0:
        raise errors.ConfigurationError('--tmax must be > 1')
    times = np.geomspace(1.0, args.tmax, args.samples).tolist()
    measurement = _measure(args.n, args, times)
    outputs = [out / 'decay.json']
    if args.refine:
        models.write_json(out / 'decay-coarse.json', measurement)
        outputs.append(out / 'decay-coarse.json')
        measurement = propagator.accept_refined(
            measurement, _measure(2 * args.n, args, times)
        )
    models.write_json(out / 'decay.json', measurement)
    LOGGER.info(
        'Decay slope %s on %s', measurement.fitted_slope, measurement.cell
    )
    return Outcome(
        config={
            'cell': args.cell.model_dump() if args.cell else None,
            'tmax': args.tmax,
            'n': args.n,
            'box_scale': args.box_scale,
            'width': args.width,
            'samples': args.samples,
            'refine': args.refine,
        },
        outputs=outputs,
    )


def _norms(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    state = checkpoint.load(args.checkpoint)
    profiles = unknowns.profiles_from_velocity(state)
    outputs = []
    values: dict[str, float] = {}
    for suffix, field in (
        ('plus', profiles.u_plus),
        ('minus', profiles.u_minus),
    ):
        for name, norm in (('b', norms.b_norm), ('x', norms.x_norm)):
            report = norm(field)
            path = out / f'{name}-{suffix}.csv'
            report.write_csv(path)
            outputs.append(path)
            values[f'{name}_{suffix}'] = report.value
        values[f'd_{suffix}'] = norms.d_norm(field)
    summary = models.ProfileNorms(t=state.t, kappa=state.kappa, **values)
    models.write_json(out / 'norms.json', summary)
    outputs.append(out / 'norms.json')
    return Outcome(
        config={'checkpoint': str(args.checkpoint)}, outputs=outputs
    )


def _sweep(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    report = resonance.space_time_resonance_sweep(
        args.samples, args.seed, workers=args.workers
    )
    models.write_json(out / 'sweep.json', report)
    outputs = [out / 'sweep.json']
    if args.draws:
        models.write_jsonl(
            out / 'geometry.jsonl',
            resonance.run_geometry_suite(
                GEOMETRY_CASES, args.draws, args.seed
            ),
        )
        outputs.append(out / 'geometry.jsonl')
    if args.set_size_pairs:
        models.write_json(
            out / 'set-size.json',
            resonance.set_size_sweep(args.set_size_pairs, args.seed),
        )
        outputs.append(out / 'set-size.json')
    return Outcome(
        config={
            'samples': args.samples,
            'draws': args.draws,
            'set_size_pairs': args.set_size_pairs,
            'resonance': settings.get_settings().resonance.model_dump(),
        },
        outputs=outputs,
        seed=args.seed,
    )


def _energy_coeffs(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    if not 0 <= args.nmax <= energy.MAX_ORDER:
        raise errors.ConfigurationError(
            f'--nmax must be in [0, {energy.MAX_ORDER}]'
        )
    path = out / 'coefficients.csv'
    energy.write_tables_csv(
        path,
        [
            energy.coeff_table(family, args.nmax)
            for family in energy.FAMILIES
        ],
    )
    mismatches = energy.reconcile_a_prime(args.nmax)
    LOGGER.info(
        "Coefficient tables to n=%d written, %d a' order mismatches",
        args.nmax,
        len(mismatches),
    )
    return Outcome(config={'nmax': args.nmax}, outputs=[path])


def _oracle_state(
    args: argparse.Namespace,
) -> tuple[unknowns.ProfilePair, settings.SimConfig | None]:
    if args.config is not None:
        config = parse_config(args.config)
        grid = grid_mod.make_grid(config.n, config.box_scale)
        state = solver.init_axisymmetric(
            config.init.family,
            config.epsilon,
            config.init.params,
            grid,
            kappa=config.kappa,
        )
        return (
            unknowns.profiles_from_velocity(state, config.coupling_sign),
            config,
        )
    grid = grid_mod.make_grid(args.n, args.box_scale)
    rng = np.random.default_rng(args.seed)
    velocity, _removed = unknowns.project_off_axis(
        fields.windowed_random_vector(grid, rng, width=1.0)
    )
    velocity = velocity * (args.amplitude / max(velocity.l2_norm(), 1e-300))
    state = grid_mod.VelocityState(velocity, kappa=args.kappa)
    return unknowns.profiles_from_velocity(state), None


def _oracle(args: argparse.Namespace, out: pathlib.Path) -> Outcome:
    profiles, config = _oracle_state(args)
    options: dict[str, typing.Any] = {}
    if config is not None:
        options = {
            'nonlinear': config.nonlinear,
            'dealias': config.dealias,
            'coupling_sign': config.coupling_sign,
        }
    reports = [
        solver.consistency_oracle(profiles, dt, **options)
        for dt in args.dts
    ]
    models.write_jsonl(out / 'oracle.jsonl', reports)
    try:
        order = helpers.fit_loglog(
            [r.dt for r in reports], [r.defect for r in reports]
        )
    except errors.DomainError:
        order = None
    LOGGER.info('Oracle defect converges at order %s in dt', order)
    resolved: dict[str, typing.Any] = {'dts': args.dts}
    if config is not None:
        resolved['config'] = config.model_dump(mode='json')
    else:
        resolved |= {
            'n': args.n,
            'box_scale': args.box_scale,
            'kappa': args.kappa,
            'amplitude': args.amplitude,
        }
    return Outcome(
        config=resolved,
        outputs=[out / 'oracle.jsonl'],
        seed=None if config is not None else args.seed,
    )


_HANDLERS: dict[
    str, abc.Callable[[argparse.Namespace, pathlib.Path], Outcome]
] = {
    'simulate': _simulate,
    'inviscid': _inviscid,
    'decay': _decay,
    'norms': _norms,
    'sweep': _sweep,
    'energy-coeffs': _energy_coeffs,
    'oracle': _oracle,
}


def _manifest(
    command: str,
    outcome: Outcome,
    out: pathlib.Path,
    started_at: datetime.datetime,
) -> models.ExperimentManifest:
    return models.ExperimentManifest(
        command=command,
        config=outcome.config,
        version=nsc_toolkit.version,
        seed=outcome.seed,
        started_at=started_at,
        finished_at=datetime.datetime.now(tz=datetime.UTC),
        outputs=[
            models.OutputFile(
                path=str(path.relative_to(out)),
                sha256=helpers.sha256_file(path),
            )
            for path in outcome.outputs
        ],
    )


def dispatch(command: str, args: argparse.Namespace) -> int:
    """Run one command and write its manifest; return the exit code."""
    if command not in _HANDLERS:
        LOGGER.error('Unknown command %r', command)
        return 1
    out = pathlib.Path(args.out)
    started_at = datetime.datetime.now(tz=datetime.UTC)
    try:
        out.mkdir(parents=True, exist_ok=True)
        outcome = _HANDLERS[command](args, out)
    except errors.NumericalAbort as err:
        LOGGER.error(
            '%s aborted: %s (last finite state in %s)',
            command,
            err,
            err.checkpoint,
        )
        return 2
    except (
        errors.ConfigurationError,
        errors.DomainError,
        pydantic.ValidationError,
    ) as err:
        LOGGER.error('%s: %s', command, err)
        return 1
    models.write_json(
        out / 'manifest.json', _manifest(command, outcome, out, started_at)
    )
    LOGGER.info(
        '%s finished, %d outputs in %s',
        command,
        len(outcome.outputs),
        out,
    )
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument errors exit 1; exit 2 means a numerical abort."""

    def error(self, message: str) -> typing.NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')


def build_parser() -> argparse.ArgumentParser:
    runtime = settings.get_settings().runtime
    parser = _Parser(
        prog='nsc',
        description=(
            'Rotating Navier-Stokes simulations and dispersive-analysis '
            'checks.'
        ),
    )
    parser.add_argument(
        '--threads',
        type=int,
        default=runtime.threads,
        help='FFT worker threads (default: all cores)',
    )
    parser.add_argument(
        '--out',
        type=pathlib.Path,
        default=runtime.output_dir,
        help='output directory (default: %(default)s)',
    )
    parser.add_argument(
        '--dev',
        action='store_true',
        default=runtime.dev,
        help='debug logging',
    )
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help='run one simulation')
    simulate.add_argument('--config', type=pathlib.Path, required=True)

    inviscid = commands.add_parser(
        'inviscid', help='compare runs across viscosities'
    )
    inviscid.add_argument('--config', type=pathlib.Path, required=True)
    inviscid.add_argument(
        '--kappas', type=_float_list, default=[0.0, 0.005, 0.01]
    )
    inviscid.add_argument('--workers', type=int, default=None)

    decay = commands.add_parser(
        'decay', help='sup-norm decay under the linear flow'
    )
    decay.add_argument(
        '--cell',
        type=_cell,
        default=None,
        help='k,p[,q] with floor allowed (default: whole field)',
    )
    decay.add_argument('--tmax', type=float, default=100.0)
    decay.add_argument('--n', type=int, default=64)
    decay.add_argument('--box-scale', type=float, default=16.0)
    decay.add_argument('--width', type=float, default=1.0)
    decay.add_argument('--samples', type=int, default=24)
    decay.add_argument(
        '--refine',
        action='store_true',
        help='repeat at 2n and accept only a stable slope',
    )

    norm = commands.add_parser('norms', help='B, X and D norms of a state')
    norm.add_argument('--checkpoint', type=pathlib.Path, required=True)

    sweep = commands.add_parser(
        'sweep', help='space-time resonance and geometry sweeps'
    )
    sweep.add_argument('--samples', type=int, default=1_000_000)
    sweep.add_argument('--seed', type=int, default=0)
    sweep.add_argument('--workers', type=int, default=None)
    sweep.add_argument(
        '--draws',
        type=int,
        default=0,
        help='draws per index-geometry case (0 skips the suite)',
    )
    sweep.add_argument('--set-size-pairs', type=int, default=0)

    coeffs = commands.add_parser(
        'energy-coeffs', help='exact energy-estimate coefficient tables'
    )
    coeffs.add_argument('--nmax', type=int, default=8)

    oracle = commands.add_parser(
        'oracle', help='time-stepping consistency of the profile equation'
    )
    oracle.add_argument('--config', type=pathlib.Path, default=None)
    oracle.add_argument('--dts', type=_float_list, default=[1e-3, 5e-4])
    oracle.add_argument('--n', type=int, default=12)
    oracle.add_argument('--box-scale', type=float, default=4.0)
    oracle.add_argument('--kappa', type=float, default=0.01)
    oracle.add_argument('--amplitude', type=float, default=0.5)
    oracle.add_argument('--seed', type=int, default=0)
    return parser


def main(argv: abc.Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    nsc_logging.configure_logging(dev=args.dev)
    LOGGER.debug(
        'Running %s with %s FFT workers', args.command, args.threads or 'all'
    )
    with fft.set_workers(args.threads or -1):
        return dispatch(args.command, args)


if __name__ == '__main__':
    sys.exit(main())
