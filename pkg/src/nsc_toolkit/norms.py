"""
Weighted localization norms and Sobolev diagnostics

B and X are weighted sups over localization cells:

    |f|_B = sup 2^(3k+ - k-/2) 2^(-p - q/2) |P_{k,p,q} f|_2
    |f|_X = sup 2^(3k+) 2^((1+beta) l + beta p) |P_{k,p} R_l f|_2

and D combines them over the first scaling-field iterates. Floor cells
carry the exponent p_min (q_min) in their weight.
"""

import functools
import logging
import math
import typing

import numpy as np
import numpy.typing as npt

from nsc_toolkit import localization, models, settings
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Field = grid_mod.SpectralField | grid_mod.VectorField


def _exponent(index: int | models.Floor | None, floor: int) -> int:
    if index is None:
        return 0
    if index == models.FLOOR:
        return floor
    return index


def _radial_weight(k: int) -> float:
    return 2.0 ** (3 * max(k, 0) - 0.5 * max(-k, 0))


def _localized_l2(
    grid: grid_mod.Grid,
    coeffs: grid_mod.ComplexArray,
    support: npt.NDArray[np.intp],
    weights: npt.NDArray[np.float64],
) -> float:
    values = coeffs.ravel()[support] * weights
    return math.sqrt(grid.volume) * float(np.linalg.norm(values))


def b_norm(f: grid_mod.SpectralField) -> models.NormReport:
    loc = settings.get_settings().localization
    entries = []
    for cell, support, weights in localization.enumerate_cells(f.grid):
        pv = _exponent(cell.p, loc.p_min)
        qv = _exponent(cell.q, loc.q_min)
        weight = _radial_weight(cell.k) * 2.0 ** (-pv - 0.5 * qv)
        value = _localized_l2(f.grid, f.coeffs, support, weights)
        entries.append(
            models.NormEntry(
                cell=cell,
                weight=weight,
                localized_l2=value,
                product=weight * value,
            )
        )
    return models.NormReport(name='B', entries=entries)


def _max_angular_band(transform: localization.AngularTransform) -> int:
    top = transform.layout.max_degree + 1
    return max(1, math.ceil(math.log2(top)) + 1)


def x_norm(
    f: grid_mod.SpectralField, beta: float | None = None
) -> models.NormReport:
    """X norm of an axisymmetric field.

    R_l follows the three-way rule in p + l; entries with p + l = 0 use
    R_{<=l} and are flagged as ``boundary``.

    Raises:
        NotAxisymmetricError: when ``f`` is not axisymmetric

    """
    loc = settings.get_settings().localization
    if beta is None:
        beta = settings.get_settings().norms.beta
    grid = f.grid
    transform = localization.angular_transform(f)
    l_top = _max_angular_band(transform)

    @functools.cache
    def band(
        l: int,  # noqa: E741
        variant: localization.Variant,
    ) -> grid_mod.ComplexArray:
        return localization.apply_rl(
            f, l, variant=variant, transform=transform
        ).coeffs

    entries = []
    for cell, support, weights in localization.enumerate_cells(
        grid, with_q=False
    ):
        pv = _exponent(cell.p, loc.p_min)
        for l in range(max(0, -pv), l_top + 1):  # noqa: E741
            boundary = pv + l == 0
            coeffs = band(l, 'leq' if boundary else 'exact')
            value = _localized_l2(grid, coeffs, support, weights)
            weight = 2.0 ** (
                3 * max(cell.k, 0) + (1.0 + beta) * l + beta * pv
            )
            entries.append(
                models.NormEntry(
                    cell=cell.model_copy(update={'l': l}),
                    weight=weight,
                    localized_l2=value,
                    product=weight * value,
                    boundary=boundary,
                )
            )
    report = models.NormReport(name='X', entries=entries)
    top = max(entries, key=lambda e: e.product, default=None)
    if top is not None and top.boundary and top.product > 0:
        LOGGER.warning(
            'X norm attained on a p + l = 0 cell %s', top.cell.labels()
        )
    return report


def d_norm(
    f: grid_mod.SpectralField,
    a_max: int | None = None,
    b_max: int | None = None,
) -> float:
    """sup over a <= a_max, b <= b_max of |S^a f|_B + |S^b f|_X."""
    norms_settings = settings.get_settings().norms
    a_max = norms_settings.s_order_b if a_max is None else a_max
    b_max = norms_settings.s_order_x if b_max is None else b_max
    iterates = [f]
    for _ in range(max(a_max, b_max)):
        iterates.append(calculus.s_field(iterates[-1], 'scalar'))
    b_part = max(b_norm(g).value for g in iterates[: a_max + 1])
    x_part = max(x_norm(g).value for g in iterates[: b_max + 1])
    return b_part + x_part


@functools.lru_cache(maxsize=8)
def _circle_groups(
    grid: grid_mod.Grid,
) -> tuple[npt.NDArray[np.intp], npt.NDArray[np.intp], int]:
    j1, j2, j3 = np.meshgrid(grid.modes, grid.modes, grid.modes, indexing='ij')
    off_axis = grid.nyquist_mask & ~grid.axis_mask
    points = np.flatnonzero(off_axis.ravel())
    key = (j1**2 + j2**2).ravel()[points] * (2 * grid.n) + (
        j3.ravel()[points] + grid.n
    )
    _, inverse = np.unique(key, return_inverse=True)
    inverse = inverse.ravel()
    return points, inverse, int(inverse.max(initial=-1)) + 1


def axisymmetry_residual(state: grid_mod.VelocityState) -> float:
    """Share of |u|^2 that is not invariant under rotation about e_3.

    Cylindrical components (along xi_h, xi_h^perp and e_3) are compared
    with their mean on each lattice circle; on the xi_h = 0 line any
    horizontal component counts as asymmetric.

    """
    grid = state.grid
    coeffs = state.velocity.coeffs
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    points, groups, n_groups = _circle_groups(grid)
    x1, x2, _x3 = np.broadcast_arrays(*grid.xi)
    h = grid.xi_h_norm.ravel()[points]
    e1 = x1.ravel()[points] / h
    e2 = x2.ravel()[points] / h
    flat = coeffs.reshape(3, -1)[:, points]
    cylindrical = (
        e1 * flat[0] + e2 * flat[1],
        -e2 * flat[0] + e1 * flat[1],
        flat[2],
    )
    counts = np.bincount(groups, minlength=n_groups)
    asymmetric = 0.0
    for component in cylindrical:
        mean = (
            np.bincount(groups, weights=component.real, minlength=n_groups)
            + 1j
            * np.bincount(groups, weights=component.imag, minlength=n_groups)
        ) / np.maximum(counts, 1)
        asymmetric += float(np.sum(np.abs(component - mean[groups]) ** 2))
    axis = grid.axis_mask & grid.nyquist_mask
    asymmetric += float(np.sum(np.abs(coeffs[:2, axis]) ** 2))
    return asymmetric / total


def sobolev_norm(f: Field, s: float) -> float:
    """Inhomogeneous H^s norm, weight (1 + |xi|^2)^s."""
    grid = f.grid
    density = (1.0 + grid.xi_norm_sq) ** s * np.abs(f.coeffs) ** 2
    return math.sqrt(grid.volume * float(density.sum()))


def homogeneous_norm(f: Field, s: float) -> float:
    """Homogeneous H^s norm; the zero mode is left out."""
    grid = f.grid
    weight = np.zeros(grid.shape)
    nonzero = grid.xi_norm_sq > 0
    weight[nonzero] = grid.xi_norm_sq[nonzero] ** s
    density = weight * np.abs(f.coeffs) ** 2
    return math.sqrt(grid.volume * float(density.sum()))


def sup_gradient(v: grid_mod.VectorField) -> float:
    """max over the grid of the Frobenius norm of grad u."""
    grid = v.grid
    density = np.zeros(grid.shape)
    for xi in grid.xi:
        derivative = grid.to_physical(1j * xi * v.coeffs).real
        density += np.sum(derivative**2, axis=0)
    return float(np.sqrt(density.max()))


def energy_profile(
    v: grid_mod.VectorField, orders: typing.Iterable[int]
) -> list[float]:
    """One energy row: |u|^2, |grad u|^2, |grad u|_inf, then |u|_{H^m}^2
    and |grad u|_{H^m}^2 for each m in ``orders``.

    """
    grid = v.grid
    orders = list(orders)
    density = np.sum(np.abs(v.coeffs) ** 2, axis=0)
    row = [
        v.l2_norm() ** 2,
        homogeneous_norm(v, 1.0) ** 2,
        sup_gradient(v),
    ]
    for dissipative in (False, True):
        for m in orders:
            weight = (1.0 + grid.xi_norm_sq) ** m
            if dissipative:
                weight = weight * grid.xi_norm_sq
            row.append(grid.volume * float(np.sum(weight * density)))
    return row
