"""Linear semigroup of the rotating heat flow and decay measurements."""

import logging
import math
import typing
from collections import abc

import numpy as np

from nsc_toolkit import errors, helpers, localization, models, settings
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

REFINEMENT_TOLERANCE = 0.05

Sign = typing.Literal[1, -1]


def evolve_linear(
    field: grid_mod.SpectralField,
    t: float,
    sign: Sign = 1,
    kappa: float = 0.0,
    coupling_sign: Sign = 1,
) -> grid_mod.SpectralField:
    """Apply exp(+- i t Lambda - kappa t |xi|^2)."""
    if t < 0:
        raise errors.DomainError('t must be >= 0')
    grid = field.grid
    exponent = (
        1j * sign * coupling_sign * t * grid.lam - kappa * t * grid.xi_norm_sq
    )
    return field.multiply(np.exp(exponent))


def _index_value(index: int | models.Floor | None, floor: int) -> int:
    if index is None:
        return 0
    if index == models.FLOOR:
        return floor
    return index


def d_norm_bound(
    k: int,
    p: int | models.Floor,
    q: int | models.Floor,
    t: float,
    f_d: float,
) -> float:
    """2^(3k/2 - 3k+) min(2^(2p+q), 2^(-p-q/2) t^-3/2) |f|_D."""
    if t <= 0:
        raise errors.DomainError('t must be > 0')
    if f_d < 0:
        raise errors.DomainError('f_D must be >= 0')
    loc = settings.get_settings().localization
    pv = _index_value(p, loc.p_min)
    qv = _index_value(q, loc.q_min)
    prefactor = 2.0 ** (1.5 * k - 3 * max(k, 0))
    return (
        prefactor
        * min(2.0 ** (2 * pv + qv), 2.0 ** (-pv - qv / 2) * t**-1.5)
        * f_d
    )


def whole_field_bound(t: float, f_d: float) -> float:
    """<t>^(-1 + gamma) |f|_D, gamma half the X-norm exponent beta."""
    gamma = settings.get_settings().norms.beta / 2
    return helpers.bracket(t) ** (-1.0 + gamma) * f_d


def dispersive_onset(cell: models.CellIndex | None) -> float:
    """Time after which the t^-3/2 branch of the bound is the smaller."""
    if cell is None:
        return 1.0
    loc = settings.get_settings().localization
    pv = _index_value(cell.p, loc.p_min)
    qv = _index_value(cell.q, loc.q_min)
    return float(2.0 ** (-2 * pv - qv))


def dyadic_fit_window(
    times: abc.Sequence[float], onset: float
) -> tuple[float, float] | None:
    """Largest [2^a, 2^b] inside the samples with 2^a >= onset."""
    eligible = [t for t in times if t > 0]
    if not eligible:
        return None
    lo = max(onset, min(eligible))
    a = math.ceil(math.log2(lo))
    b = math.floor(math.log2(max(eligible)))
    if b <= a:
        return None
    return 2.0**a, 2.0**b


def measure_decay(
    f: grid_mod.SpectralField,
    cell: models.CellIndex | None,
    times: abc.Sequence[float],
    *,
    d_norm: float = 1.0,
    sign: Sign = 1,
    fit_window: tuple[float, float] | None = None,
) -> models.DecayMeasurement:
    """Grid sup-norm of the localized dispersive flow at each time.

    ``cell=None`` measures the whole field; a cell without ``q`` keeps
    every q. The slope is fitted on ``fit_window`` or, by default, the
    largest dyadic range past the onset of the dispersive branch.

    Raises:
        EmptyCellError: when the cell removes all of ``f``

    """
    grid = f.grid
    if cell is None:
        localized = f
    else:
        localized = f.multiply(localization.cell_weight(grid, cell))
    if not np.any(localized.coeffs):
        raise errors.EmptyCellError(f'cell {cell} holds no mass of f')
    sup_norms: list[float] = []
    bounds: list[float] = []
    for t in times:
        evolved = evolve_linear(localized, t, sign)
        sup_norms.append(float(np.max(np.abs(evolved.physical()))))
        if cell is None:
            bounds.append(whole_field_bound(t, d_norm))
        else:
            bounds.append(
                d_norm_bound(
                    cell.k,
                    cell.p if cell.p is not None else 0,
                    cell.q if cell.q is not None else 0,
                    t,
                    d_norm,
                )
            )
        LOGGER.debug('decay t=%g sup=%.6e', t, sup_norms[-1])
    window = fit_window or dyadic_fit_window(times, dispersive_onset(cell))
    slope = None
    if window is not None:
        selected = [
            (t, s)
            for t, s in zip(times, sup_norms, strict=True)
            if window[0] <= t <= window[1]
        ]
        if len(selected) >= 2:
            slope = helpers.fit_loglog(
                [t for t, _ in selected], [s for _, s in selected]
            )
    return models.DecayMeasurement(
        cell=cell,
        n=grid.n,
        times=list(times),
        sup_norms=sup_norms,
        bound_values=bounds,
        fitted_slope=slope,
        fit_window=window,
        d_norm=d_norm,
    )


def refinement_shift(
    coarse: models.DecayMeasurement, fine: models.DecayMeasurement
) -> float:
    if coarse.fitted_slope is None or fine.fitted_slope is None:
        return math.inf
    return abs(fine.fitted_slope - coarse.fitted_slope)


def accept_refined(
    coarse: models.DecayMeasurement, fine: models.DecayMeasurement
) -> models.DecayMeasurement:
    """Mark the fine measurement accepted when n -> 2n barely moves it."""
    shift = refinement_shift(coarse, fine)
    if shift >= REFINEMENT_TOLERANCE:
        LOGGER.warning(
            'Decay slope moved by %.3f under refinement (n=%d -> n=%d)',
            shift,
            coarse.n,
            fine.n,
        )
    return fine.model_copy(
        update={'accepted': shift < REFINEMENT_TOLERANCE}
    )


def heat_commutator_defect(
    f: grid_mod.SpectralField, kappa: float, t: float
) -> float:
    """Relative mismatch between e^(t kappa Lap) S f - S e^(t kappa Lap) f
    and its closed form 2 t kappa Lap e^(t kappa Lap) f, scalar S.

    """
    heat = calculus.heat_multiplier(f.grid, kappa, t)
    smoothed = f.multiply(heat)
    commutator = (
        calculus.s_field(f, 'scalar').multiply(heat)
        - calculus.s_field(smoothed, 'scalar')
    )
    closed = calculus.laplacian(smoothed) * (2.0 * t * kappa)
    scale = closed.l2_norm()
    mismatch = (commutator - closed).l2_norm()
    return mismatch / scale if scale > 0 else mismatch
