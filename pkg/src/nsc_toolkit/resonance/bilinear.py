"""
Direct evaluation of the bilinear operator

    Q(f1, f2)^(xi) = sum_eta exp(i s Phi) m(xi, eta) f1^(xi - eta) f2^(eta)

The sum runs over lattice frequencies without periodic wrap-around, so
it matches the product of two fields only when both are band limited to
a quarter of the grid. The cost grows like n^6 and grids above n = 16
are refused.
"""

import logging
import math
import typing

import numpy as np
import numpy.typing as npt

from nsc_toolkit import errors, localization, models, settings
from nsc_toolkit.resonance import multipliers, symbols
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

MAX_DIRECT_MODES = 16


def _check_size(grid: grid_mod.Grid) -> None:
    if grid.n > MAX_DIRECT_MODES:
        raise errors.GridTooLargeError(grid.n, MAX_DIRECT_MODES)


def _lattice(
    grid: grid_mod.Grid, coeffs: grid_mod.ComplexArray
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.complex128]]:
    """Integer frequencies and values of the nonzero coefficients."""
    idx = np.flatnonzero(coeffs.ravel() * grid.mode_mask.ravel())
    j = np.stack(np.unravel_index(idx, grid.shape), axis=1)
    return grid.modes[j], coeffs.ravel()[idx]


def _direct_sum(
    spec: multipliers.MultiplierSpec,
    f1: grid_mod.SpectralField,
    f2: grid_mod.SpectralField,
    s: float,
    chi: tuple[grid_mod.RealArray, ...] | None = None,
) -> tuple[grid_mod.ComplexArray, float]:
    """Output coefficients and sup of |m chi| over contributing pairs."""
    grid = f1.grid
    _check_size(grid)
    half = grid.n // 2
    j1, v1 = _lattice(grid, f1.coeffs)
    j2, v2 = _lattice(grid, f2.coeffs)
    out = np.zeros(grid.shape, dtype=np.complex128)
    sup = 0.0
    if not v1.size or not v2.size:
        return out, sup
    lookup = np.zeros((grid.n,) * 3, dtype=np.complex128)
    lookup[tuple((j1 % grid.n).T)] = v1
    present = np.zeros((grid.n,) * 3, dtype=bool)
    present[tuple((j1 % grid.n).T)] = True
    signs = np.broadcast_to(np.asarray(spec.signs), (v2.size, 3))
    for index in np.ndindex(grid.shape):
        j = grid.modes[list(index)]
        if not j.any():
            continue
        if chi is not None and chi[0][index] == 0.0:
            continue
        diff = j - j2
        inside = np.all((diff > -half) & (diff < half), axis=1)
        inside &= np.any(diff != 0, axis=1)
        if not inside.any():
            continue
        slots = tuple((diff[inside] % grid.n).T)
        inside[inside] = present[slots]
        if not inside.any():
            continue
        slots = tuple((diff[inside] % grid.n).T)
        xi = np.broadcast_to(j / grid.box_scale, (int(inside.sum()), 3))
        eta = j2[inside] / grid.box_scale
        m = multipliers.evaluate(spec, xi, eta)
        if chi is not None:
            weight = chi[0][index] * chi[1][slots] * chi[2][
                tuple((j2[inside] % grid.n).T)
            ]
            sup = max(sup, float(np.max(np.abs(m * weight))))
        else:
            sup = max(sup, float(np.max(np.abs(m))))
        phase = np.exp(1j * s * symbols.phi(xi, eta, signs[inside]))
        out[index] = np.sum(phase * m * lookup[slots] * v2[inside])
    return out, sup


def q_m_direct(
    spec: multipliers.MultiplierSpec,
    f1: grid_mod.SpectralField,
    f2: grid_mod.SpectralField,
    s: float = 0.0,
    signs: symbols.Signs | None = None,
) -> grid_mod.SpectralField:
    """Exact double sum of the bilinear operator at time ``s``.

    ``signs`` overrides the sign triple carried by ``spec``.

    Raises:
        GridTooLargeError: when the grid has more than 16 modes per axis

    """
    if signs is not None:
        spec = spec.model_copy(update={'signs': signs})
    coeffs, _sup = _direct_sum(spec, f1, f2, s)
    return grid_mod.SpectralField(f1.grid, coeffs)


def set_size(
    cells: tuple[models.CellIndex, models.CellIndex, models.CellIndex],
) -> float:
    """min 2^(k+p) over the three cells times min 2^((k+q)/2)."""
    loc = settings.get_settings().localization

    def value(index: int | models.Floor | None, floor: int) -> int:
        if index is None:
            return 0
        return floor if index == models.FLOOR else index

    horizontal = min(
        2.0 ** (c.k + value(c.p, loc.p_min)) for c in cells
    )
    vertical = min(
        2.0 ** ((c.k + value(c.q, loc.q_min)) / 2) for c in cells
    )
    return horizontal * vertical


def set_size_ratio(
    spec: multipliers.MultiplierSpec,
    f1: grid_mod.SpectralField,
    f2: grid_mod.SpectralField,
    cells: tuple[models.CellIndex, models.CellIndex, models.CellIndex],
    s: float = 0.0,
) -> float | None:
    """|P Q(P f1, P f2)|_2 / (|S| |m chi|_inf |P f1|_2 |P f2|_2).

    ``cells`` localize the output, f1 and f2 in that order. Returns None
    when the localized product vanishes.

    """
    grid = f1.grid
    weights = tuple(localization.cell_weight(grid, c) for c in cells)
    g1 = f1.multiply(weights[1])
    g2 = f2.multiply(weights[2])
    coeffs, sup = _direct_sum(spec, g1, g2, s, chi=weights)
    localized = grid_mod.SpectralField(grid, coeffs * weights[0])
    denominator = set_size(cells) * sup * g1.l2_norm() * g2.l2_norm()
    numerator = localized.l2_norm()
    if denominator == 0.0 or numerator == 0.0:
        return None
    return numerator / denominator


def set_size_sweep(
    n_pairs: int,
    seed: int,
    n: int = 8,
    box_scale: float = 1.0,
    spec: multipliers.MultiplierSpec | None = None,
) -> models.SetSizeReport:
    """Measured set-size constant over random localized pairs."""
    grid = grid_mod.make_grid(n, box_scale)
    _check_size(grid)
    spec = spec or multipliers.MultiplierSpec()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    cells = [
        cell for cell, _support, _w in localization.enumerate_cells(grid)
    ]
    report = models.SetSizeReport(n_pairs=n_pairs, seed=seed, n=n)
    for _ in range(n_pairs):
        chosen = typing.cast(
            tuple[models.CellIndex, models.CellIndex, models.CellIndex],
            tuple(cells[i] for i in rng.integers(len(cells), size=3)),
        )
        f1, f2 = (
            grid_mod.SpectralField(
                grid,
                (
                    rng.standard_normal(grid.shape)
                    + 1j * rng.standard_normal(grid.shape)
                )
                * grid.mode_mask,
            )
            for _ in range(2)
        )
        s = float(rng.uniform(0.0, 10.0))
        ratio = set_size_ratio(spec, f1, f2, chosen, s)
        if ratio is not None and math.isfinite(ratio):
            report.ratios.append(ratio)
    LOGGER.info(
        'Set-size sweep: %d of %d pairs interacted, constant %.4g',
        len(report.ratios),
        n_pairs,
        report.constant,
    )
    return report
