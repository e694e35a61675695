"""
Seeded Monte-Carlo sweeps over frequency triples

Samples are drawn in chunks; chunk i uses the i-th child of
``numpy.random.SeedSequence(seed)``, so a sweep gives the same report
for a given seed whatever the chunk scheduling.

Example usage:
    report = space_time_resonance_sweep(1_000_000, seed=42)
    geometry = index_geometry('low-p-output', (0, 0, 0), (-12, -1, -1))
"""

import dataclasses
import logging
import math
import typing
from collections import abc
from concurrent import futures

import numpy as np
import numpy.typing as npt

from nsc_toolkit import errors, models, settings
from nsc_toolkit.resonance import symbols

LOGGER = logging.getLogger(__name__)

Predicate = typing.Literal[
    'low-p-output', 'low-p-inputs', 'low-q-output', 'low-q-inputs'
]
PREDICATES: tuple[Predicate, ...] = typing.get_args(Predicate)
MAX_VIOLATIONS = 20


def _random_directions(
    rng: np.random.Generator, size: int
) -> npt.NDArray[np.float64]:
    v = rng.standard_normal((size, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def draw_triples(
    rng: np.random.Generator, size: int
) -> tuple[
    npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.int64]
]:
    """Log-uniform magnitudes, uniform directions and signs."""
    config = settings.get_settings().resonance
    exponents = rng.uniform(
        config.magnitude_min_exponent,
        config.magnitude_max_exponent,
        size=(2, size, 1),
    )
    xi = 2.0 ** exponents[0] * _random_directions(rng, size)
    eta = 2.0 ** exponents[1] * _random_directions(rng, size)
    signs = rng.choice(np.array([-1, 1]), size=(size, 3))
    return xi, eta, signs


@dataclasses.dataclass
class _ChunkResult:
    hits: int = 0
    min_ratio: float = math.inf
    max_ratio: float = 0.0
    min_p_max: int | None = None
    min_derivative_ratio: float = math.inf
    max_derivative_ratio: float = 0.0
    violations: list[dict[str, typing.Any]] = dataclasses.field(
        default_factory=list
    )


def _sweep_chunk(
    seed_sequence: np.random.SeedSequence, size: int
) -> _ChunkResult:
    config = settings.get_settings().resonance
    rng = np.random.default_rng(seed_sequence)
    xi, eta, signs = draw_triples(rng, size)
    zeta = xi - eta
    keep = np.linalg.norm(zeta, axis=1) > 0
    xi, eta, zeta, signs = xi[keep], eta[keep], zeta[keep], signs[keep]
    phase = symbols.phi(xi, eta, signs)
    ks, ps, qs = zip(
        *(symbols.dyadic_indices(v) for v in (xi, zeta, eta)), strict=True
    )
    k_stack = np.stack(ks)
    p_max = np.max(np.stack(ps), axis=0)
    q_max = np.max(np.stack(qs), axis=0)
    hyp = np.abs(phase) <= 2.0 ** (q_max - config.phase_gap)
    result = _ChunkResult(hits=int(hyp.sum()))
    if not result.hits:
        return result
    xi, eta, signs = xi[hyp], eta[hyp], signs[hyp]
    p_max, q_max = p_max[hyp], q_max[hyp]
    k_max = k_stack.max(axis=0)[hyp]
    k_min = k_stack.min(axis=0)[hyp]
    sigma = np.linalg.norm(symbols.sigma_bar(xi, eta), axis=1)
    ratio = sigma / 2.0 ** (q_max + k_max + k_min).astype(np.float64)
    derivatives = symbols.phase_derivatives(xi, eta, signs)
    scale = symbols.derivative_scale(xi, eta)
    with np.errstate(divide='ignore', invalid='ignore'):
        derivative_ratio = (
            np.abs(derivatives.scaling) + np.abs(derivatives.rotation)
        ) / scale
    finite = np.isfinite(derivative_ratio)
    result.min_ratio = float(ratio.min())
    result.max_ratio = float(ratio.max())
    result.min_p_max = int(p_max.min())
    if np.any(finite):
        result.min_derivative_ratio = float(derivative_ratio[finite].min())
        result.max_derivative_ratio = float(derivative_ratio[finite].max())
    bad = (ratio <= 0) | (p_max < config.p_max_floor)
    for i in np.flatnonzero(bad)[:MAX_VIOLATIONS]:
        result.violations.append(
            {
                'xi': xi[i].tolist(),
                'eta': eta[i].tolist(),
                'signs': signs[i].tolist(),
                'ratio': float(ratio[i]),
                'p_max': int(p_max[i]),
            }
        )
    return result


def _chunks(n_samples: int, chunk_size: int) -> list[int]:
    sizes = [chunk_size] * (n_samples // chunk_size)
    if n_samples % chunk_size:
        sizes.append(n_samples % chunk_size)
    return sizes


def space_time_resonance_sweep(
    n_samples: int, seed: int, *, workers: int | None = None
) -> models.SweepReport:
    """Check the small-phase geometry on random triples.

    Among samples with |Phi| <= 2^(q_max - phase_gap) the report records
    the range of |sigma| / 2^(q_max + k_max + k_min), the smallest p_max,
    and the range of (|S Phi| + |Omega Phi|) over its predicted size.
    A sample violates positivity when the first ratio vanishes or p_max
    falls below ``p_max_floor``.

    """
    if n_samples < 0:
        raise errors.DomainError('n_samples must be >= 0')
    report = models.SweepReport(n_samples=n_samples, seed=seed)
    if n_samples == 0:
        return report
    sizes = _chunks(n_samples, settings.get_settings().resonance.chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    if workers and workers > 1:
        with futures.ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_sweep_chunk, children, sizes))
    else:
        results = [
            _sweep_chunk(child, size)
            for child, size in zip(children, sizes, strict=True)
        ]
    hits = [r for r in results if r.hits]
    report.n_hypothesis_hits = sum(r.hits for r in results)
    if hits:
        report.min_ratio = min(r.min_ratio for r in hits)
        report.max_ratio = max(r.max_ratio for r in hits)
        report.min_p_max = min(
            r.min_p_max for r in hits if r.min_p_max is not None
        )
        lows = [r.min_derivative_ratio for r in hits]
        highs = [r.max_derivative_ratio for r in hits]
        if min(lows) < math.inf:
            report.min_derivative_ratio = min(lows)
            report.max_derivative_ratio = max(highs)
    for result in results:
        report.violations.extend(result.violations)
    del report.violations[MAX_VIOLATIONS:]
    LOGGER.info(
        'Resonance sweep: %d samples, %d in the small-phase set, '
        '%d violations',
        n_samples,
        report.n_hypothesis_hits,
        len(report.violations),
    )
    return report


def geometry_hypothesis(
    predicate: Predicate, anis: tuple[int, int, int]
) -> bool:
    a, a1, a2 = anis
    if predicate.endswith('output'):
        return a <= min(a1, a2) - 10
    return a1 <= a - 15 and a2 <= a - 15 and abs(a1 - a2) <= 2


def geometry_conclusions(
    predicate: Predicate,
    ks: tuple[int, int, int],
    anis: tuple[int, int, int],
) -> dict[str, bool]:
    """Index-level conclusions for the triple xi, xi - eta, eta.

    ``anis`` holds p (or q) indices in the same order as ``ks``.

    """
    k, k1, k2 = ks
    a, a1, a2 = anis
    if predicate.endswith('output'):
        return {
            'output_below_first': a + k < a1 + k1 - 4,
            'inputs_balanced': abs((a1 + k1) - (a2 + k2)) <= 2,
            'case_split': (
                (abs(k1 - k2) <= 4 and abs(a1 - a2) <= 6)
                or (k2 < k1 - 4 and abs(k - k1) <= 2 and a1 <= a2 - 2)
                or (k1 < k2 - 4 and abs(k - k2) <= 2 and a2 <= a1 - 2)
            ),
        }
    return {
        'inputs_high': k1 >= k + 6 and k2 >= k + 6,
        'inputs_comparable': abs(k1 - k2) <= 2,
        'inputs_balanced': abs(k1 + a1 - k2 - a2) <= 4,
        'second_above_output': k2 + a2 >= k + a - 2,
    }


def _anisotropy_variable(
    predicate: Predicate, v: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    norm = np.linalg.norm(v, axis=-1)
    if '-p-' in predicate:
        return typing.cast(
            npt.NDArray[np.float64], np.linalg.norm(v[..., :2], axis=-1) / norm
        )
    return typing.cast(npt.NDArray[np.float64], np.abs(v[..., 2]) / norm)


def _draw_in_cell(
    rng: np.random.Generator,
    predicate: Predicate,
    k: int,
    a: int,
    size: int,
) -> npt.NDArray[np.float64]:
    """Vectors with |v| and the anisotropy variable inside the bumps."""
    radius = 2.0 ** rng.uniform(k - 1, k + 1, size)
    upper = min(a + 1.0, 0.0)
    variable = 2.0 ** rng.uniform(a - 1.0, upper, size)
    complement = np.sqrt(np.clip(1.0 - variable**2, 0.0, 1.0))
    if '-p-' in predicate:
        horizontal, vertical = variable, complement
    else:
        horizontal, vertical = complement, variable
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size)
    sign = rng.choice(np.array([-1.0, 1.0]), size)
    return radius[:, None] * np.stack(
        [
            horizontal * np.cos(azimuth),
            horizontal * np.sin(azimuth),
            sign * vertical,
        ],
        axis=1,
    )


def _in_cell(
    predicate: Predicate,
    v: npt.NDArray[np.float64],
    k: int,
    a: int,
) -> npt.NDArray[np.bool_]:
    norm = np.linalg.norm(v, axis=-1)
    variable = _anisotropy_variable(predicate, v)
    return typing.cast(
        npt.NDArray[np.bool_],
        (norm > 2.0 ** (k - 1))
        & (norm < 2.0 ** (k + 1))
        & (variable > 2.0 ** (a - 1))
        & (variable < 2.0 ** (a + 1)),
    )


def index_geometry(
    predicate: Predicate,
    ks: tuple[int, int, int],
    anis: tuple[int, int, int],
    n_draws: int = 100_000,
    seed: int = 0,
) -> models.PredicateReport:
    """Check a vector-geometry statement on cells of xi, xi - eta, eta.

    The two cells with the smallest anisotropy index are sampled and the
    third vector is tested for membership in its cell. The conclusions
    are predicates on the indices; they are ``violated`` only when some
    draw lands in all three cells.

    """
    if predicate not in PREDICATES:
        raise errors.DomainError(f'unknown predicate {predicate!r}')
    report = models.PredicateReport(predicate=predicate, status='holds')
    if not geometry_hypothesis(predicate, anis):
        report.status = 'hypothesis-empty'
        return report
    if any(a > 0 for a in anis):
        raise errors.DomainError('anisotropy indices must be <= 0')
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    order = sorted(range(3), key=lambda i: anis[i])
    drawn = {
        i: _draw_in_cell(rng, predicate, ks[i], anis[i], n_draws)
        for i in order[:2]
    }
    missing = order[2]
    # xi = zeta + eta with slots 0, 1, 2 = xi, zeta, eta
    if missing == 0:
        drawn[0] = drawn[1] + drawn[2]
    elif missing == 1:
        drawn[1] = drawn[0] - drawn[2]
    else:
        drawn[2] = drawn[0] - drawn[1]
    with np.errstate(invalid='ignore', divide='ignore'):
        inside = _in_cell(
            predicate, drawn[missing], ks[missing], anis[missing]
        )
    report.draws = n_draws
    report.hits = int(inside.sum())
    report.conclusions = geometry_conclusions(predicate, ks, anis)
    if not report.hits:
        report.status = 'support-empty'
        return report
    if not all(report.conclusions.values()):
        report.status = 'violated'
        for i in np.flatnonzero(inside)[:MAX_VIOLATIONS]:
            report.counterexamples.append(
                [drawn[0][i].tolist(), drawn[2][i].tolist()]
            )
    return report


def run_geometry_suite(
    cases: abc.Iterable[
        tuple[Predicate, tuple[int, int, int], tuple[int, int, int]]
    ],
    n_draws: int,
    seed: int,
) -> list[models.PredicateReport]:
    return [
        index_geometry(predicate, ks, anis, n_draws, seed)
        for predicate, ks, anis in cases
    ]
