"""
Anisotropic frequency localization and axisymmetric angular projectors

Three multiplicative families cut Fourier space into cells:

    P_k      varphi(2^-k |xi|)               radial shells
    P_{k,p}  varphi(2^-p sqrt(1 - Lambda^2))  distance from the vertical
    P_{k,p,q} varphi(2^-q |Lambda|)          distance from the equator

The anisotropy families are truncated at ``p_min``/``q_min``; the
``'floor'`` sentinel carries the cumulative cap psi(2^-p_min s) so that the
weights of every admissible (p, q) pair add up to one at each mode.

Angular projectors act on axisymmetric fields only. Each lattice shell
|j|^2 = m is split into latitude groups (equal j_3, hence equal Lambda).
Consecutive shells are pooled into radial bins and the group means of a
bin are fitted by one weighted least-squares Legendre series in
mu = Lambda: degrees 0 and 1 are free on every shell, higher degrees
share a low-order polynomial profile in |j| across the bin. Shells with
only a few latitude levels therefore inherit their high-degree content
from their neighbours instead of aliasing it into low degrees.

Example usage:
    piece = apply_pkpq(field, k=0, p=0, q='floor')
    band = apply_rl(field, l=2, variant='exact')
"""

import dataclasses
import functools
import logging
import math
import typing
from collections import abc

import numpy as np
import numpy.typing as npt

from nsc_toolkit import errors, models, settings
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Variant = typing.Literal['leq', 'exact', 'signed']
Index = int | models.Floor
CellSupport = tuple[
    models.CellIndex, npt.NDArray[np.intp], npt.NDArray[np.float64]
]


@typing.overload
def psi(x: float) -> float: ...


@typing.overload
def psi(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]: ...


def psi(x: float | npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """Smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2)."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    out = np.where(a <= 1.0, 1.0, 0.0)
    ramp = (a > 1.0) & (a < 2.0)
    s = a[ramp] - 1.0
    out[ramp] = np.exp(1.0 - 1.0 / (1.0 - s * s))
    if np.ndim(x) == 0:
        return float(out)
    return out


@typing.overload
def varphi(x: float) -> float: ...


@typing.overload
def varphi(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]: ...


def varphi(x: float | npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """Dyadic bump psi(x) - psi(2x), supported in 1/2 < |x| < 2."""
    a = np.asarray(x, dtype=np.float64)
    out = psi(a) - psi(2.0 * a)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _anisotropy_weight(
    variable: grid_mod.RealArray, index: Index, floor_exponent: int
) -> grid_mod.RealArray:
    if index == models.FLOOR:
        return psi(2.0 ** (-floor_exponent) * variable)
    if index > 0:
        raise errors.DomainError(f'anisotropy index {index} must be <= 0')
    if index <= floor_exponent:
        raise errors.DomainError(
            f'anisotropy index {index} is below the floor {floor_exponent}'
        )
    return varphi(2.0 ** (-index) * variable)


def shell_weight(grid: grid_mod.Grid, k: int) -> grid_mod.RealArray:
    """varphi(2^-k |xi|) on the grid."""
    return varphi(2.0 ** (-k) * grid.xi_norm)


@functools.lru_cache(maxsize=32)
def _horizontal_fraction(grid: grid_mod.Grid) -> grid_mod.RealArray:
    # sqrt(1 - Lambda^2) = |xi_h| / |xi|, set to 0 at the origin
    out = np.zeros(grid.shape)
    np.divide(grid.xi_h_norm, grid.xi_norm, out=out, where=grid.xi_norm > 0)
    return out


def p_weight(
    grid: grid_mod.Grid, p: Index, p_min: int | None = None
) -> grid_mod.RealArray:
    if p_min is None:
        p_min = settings.get_settings().localization.p_min
    return _anisotropy_weight(_horizontal_fraction(grid), p, p_min)


def q_weight(
    grid: grid_mod.Grid, q: Index, q_min: int | None = None
) -> grid_mod.RealArray:
    if q_min is None:
        q_min = settings.get_settings().localization.q_min
    return _anisotropy_weight(np.abs(grid.lam), q, q_min)


def apply_pk(f: grid_mod.SpectralField, k: int) -> grid_mod.SpectralField:
    return f.multiply(shell_weight(f.grid, k))


def apply_pkp(
    f: grid_mod.SpectralField, k: int, p: Index
) -> grid_mod.SpectralField:
    return f.multiply(shell_weight(f.grid, k) * p_weight(f.grid, p))


def apply_pkpq(
    f: grid_mod.SpectralField, k: int, p: Index, q: Index
) -> grid_mod.SpectralField:
    grid = f.grid
    return f.multiply(
        shell_weight(grid, k) * p_weight(grid, p) * q_weight(grid, q)
    )


def cell_weight(
    grid: grid_mod.Grid, cell: models.CellIndex
) -> grid_mod.RealArray:
    """Product of every localized index of ``cell`` (l is ignored)."""
    weight = shell_weight(grid, cell.k)
    if cell.p is not None:
        weight = weight * p_weight(grid, cell.p)
    if cell.q is not None:
        weight = weight * q_weight(grid, cell.q)
    return weight


def index_values(floor_exponent: int) -> list[Index]:
    """Floor sentinel followed by floor_exponent + 1, ..., 0."""
    return [models.FLOOR, *range(floor_exponent + 1, 1)]


def shell_range(grid: grid_mod.Grid) -> range:
    """Every k whose shell holds at least one kept mode."""
    norms = grid.xi_norm[grid.mode_mask]
    lo = math.floor(math.log2(float(norms.min()))) - 1
    hi = math.ceil(math.log2(float(norms.max()))) + 1
    populated = [
        k
        for k in range(lo, hi + 1)
        if np.any(varphi(2.0 ** (-k) * norms) > 0)
    ]
    return range(populated[0], populated[-1] + 1)


def enumerate_cells(
    grid: grid_mod.Grid, *, with_q: bool = True
) -> abc.Iterator[CellSupport]:
    """Yield (cell, flat mode indices, weights) for each nonempty cell.

    Cells come in report order: k, then p, then q with the floor sentinel
    ahead of the finite indices. Inadmissible (p, q) pairs are skipped.

    """
    loc = settings.get_settings().localization
    norms = grid.xi_norm.ravel()
    horizontal = _horizontal_fraction(grid).ravel()
    vertical = np.abs(grid.lam).ravel()
    kept = grid.mode_mask.ravel()
    for k in shell_range(grid):
        radial = varphi(2.0 ** (-k) * norms)
        support = np.flatnonzero((radial > 0) & kept)
        if not support.size:
            continue
        radial = radial[support]
        for p in index_values(loc.p_min):
            wp = radial * _anisotropy_weight(horizontal[support], p, loc.p_min)
            if not np.any(wp > 0):
                continue
            if not with_q:
                mask = wp > 0
                yield (
                    models.CellIndex(k=k, p=p),
                    support[mask],
                    wp[mask],
                )
                continue
            for q in index_values(loc.q_min):
                cell = models.CellIndex(k=k, p=p, q=q)
                if not cell.admissible(loc.p_min, loc.q_min):
                    continue
                w = wp * _anisotropy_weight(vertical[support], q, loc.q_min)
                mask = w > 0
                if np.any(mask):
                    yield cell, support[mask], w[mask]


def anisotropy_partition(grid: grid_mod.Grid) -> grid_mod.RealArray:
    """Sum over admissible (p, q) of the anisotropy weights, per mode."""
    loc = settings.get_settings().localization
    total = np.zeros(grid.shape)
    for p in index_values(loc.p_min):
        wp = p_weight(grid, p, loc.p_min)
        for q in index_values(loc.q_min):
            cell = models.CellIndex(k=0, p=p, q=q)
            if cell.admissible(loc.p_min, loc.q_min):
                total += wp * q_weight(grid, q, loc.q_min)
    return total


def legendre_table(
    n_max: int, x: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Legendre polynomials L_0 .. L_n_max at x, stacked on axis 0."""
    values = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(values) > 1.0):
        raise errors.DomainError('Legendre argument outside [-1, 1]')
    table = np.empty((n_max + 1, *values.shape))
    table[0] = 1.0
    if n_max >= 1:
        table[1] = values
    for n in range(2, n_max + 1):
        table[n] = (
            (2.0 * n - 1.0) * values * table[n - 1]
            - (n - 1.0) * table[n - 2]
        ) / n
    return table


def legendre_zonal(n: int, x: float) -> float:
    """Zonal kernel (2n + 1) / (4 pi) L_n(x)."""
    n_max = settings.get_settings().localization.legendre_degree
    if not 0 <= n <= n_max:
        raise errors.DomainError(f'degree {n} outside [0, {n_max}]')
    return float((2 * n + 1) / (4.0 * math.pi) * legendre_table(n, x)[n])


COND_LIMIT = 1e6  # column-scaled condition number of a bin fit
BIN_SPARE = 24  # latitude levels beyond two per shell before a bin closes
RADIAL_ORDER = 2


@dataclasses.dataclass(frozen=True)
class _Bin:
    groups: slice
    degree: int
    column_degree: npt.NDArray[np.intp]
    synthesis: npt.NDArray[np.float64]  # (groups, columns)
    analysis: npt.NDArray[np.float64]  # (columns, groups)


@dataclasses.dataclass(frozen=True, eq=False)
class AngularLayout:
    """Latitude groups of a grid and the radial bins fitted over them."""

    grid: grid_mod.Grid
    points: npt.NDArray[np.intp]  # flat mode index, sorted by (m, j_3)
    group_of_point: npt.NDArray[np.intp]
    counts: npt.NDArray[np.float64]
    shell_of_group: npt.NDArray[np.intp]
    shell_m: npt.NDArray[np.int64]
    bins: tuple[_Bin, ...]

    @property
    def n_groups(self) -> int:
        return int(self.counts.size)

    @property
    def max_degree(self) -> int:
        return max((b.degree for b in self.bins), default=0)


def _bin_matrix(
    mu: npt.NDArray[np.float64],
    t: npt.NDArray[np.float64],
    shells: list[slice],
    n_top: int,
    order: int,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.intp], int]:
    # per-shell columns carry degrees 0 and 1 exactly; degrees 2..n_top
    # share a polynomial radial profile across the bin
    columns = []
    degrees = []
    for rows in shells:
        for degree in range(min(2, rows.stop - rows.start)):
            column = np.zeros(mu.size)
            column[rows] = mu[rows] ** degree
            columns.append(column)
            degrees.append(degree)
    n_local = len(columns)
    angular = legendre_table(n_top, mu)
    radial = legendre_table(order, t)
    for degree in range(2, n_top + 1):
        for k in range(order + 1):
            columns.append(angular[degree] * radial[k])
            degrees.append(degree)
    return (
        np.stack(columns, axis=1),
        np.asarray(degrees, dtype=np.intp),
        n_local,
    )


def _fit_bin(
    mu: npt.NDArray[np.float64],
    radius: npt.NDArray[np.float64],
    counts: npt.NDArray[np.float64],
    shells: list[slice],
    groups: slice,
    n_max: int,
) -> _Bin:
    r_lo, r_hi = float(radius[0]), float(radius[-1])
    half = 0.5 * (r_hi - r_lo)
    t = (
        np.clip((radius - r_lo) / half - 1.0, -1.0, 1.0)
        if half > 0
        else np.zeros_like(radius)
    )
    order = min(RADIAL_ORDER, len(shells) - 1)
    n_cap = max(1, min(n_max, math.ceil(math.pi * r_hi) + 1))
    matrix, column_degree, n_local = _bin_matrix(
        mu, t, shells, n_cap, order
    )
    weighted = np.sqrt(counts)[:, None] * matrix
    norms = np.linalg.norm(weighted, axis=0)
    norms[norms == 0.0] = 1.0
    scaled = weighted / norms

    def width(top: int) -> int:
        return n_local + max(0, top - 1) * (order + 1)

    def acceptable(top: int) -> bool:
        cols = width(top)
        if cols > mu.size:
            return False
        return bool(np.linalg.cond(scaled[:, :cols]) <= COND_LIMIT)

    # the condition number only grows as columns are added
    lo, hi = 1, n_cap
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if acceptable(mid):
            lo = mid
        else:
            hi = mid - 1
    cols = width(lo)
    analysis = (
        np.linalg.pinv(scaled[:, :cols]) / norms[:cols, None]
    ) * np.sqrt(counts)[None, :]
    return _Bin(
        groups=groups,
        degree=lo,
        column_degree=column_degree[:cols],
        synthesis=matrix[:, :cols],
        analysis=analysis,
    )


@functools.lru_cache(maxsize=4)
def angular_layout(grid: grid_mod.Grid, n_max: int) -> AngularLayout:
    n = grid.n
    j1, j2, j3 = np.meshgrid(grid.modes, grid.modes, grid.modes, indexing='ij')
    flat = np.flatnonzero(grid.mode_mask.ravel())
    m = (j1**2 + j2**2 + j3**2).ravel()[flat]
    level = j3.ravel()[flat]
    order = np.lexsort((level, m))
    points = flat[order]
    key = m[order] * (2 * n) + level[order] + n
    uniq, group_of_point, counts = np.unique(
        key, return_inverse=True, return_counts=True
    )
    group_m = uniq // (2 * n)
    group_level = uniq % (2 * n) - n
    weights = counts.astype(np.float64)
    radius = np.sqrt(group_m.astype(np.float64))
    mu = np.clip(group_level / radius, -1.0, 1.0)
    starts = np.flatnonzero(np.r_[True, np.diff(group_m) != 0])
    stops = np.r_[starts[1:], group_m.size]
    shell_of_group = np.repeat(np.arange(starts.size), stops - starts)

    bins = []
    first = 0
    spare = 0
    for index in range(starts.size):
        spare += max(0, int(stops[index] - starts[index]) - 2)
        span = radius[starts[index]] - radius[starts[first]]
        if (spare >= BIN_SPARE and span >= 1.0) or index == starts.size - 1:
            lo, hi = int(starts[first]), int(stops[index])
            shells = [
                slice(int(a) - lo, int(b) - lo)
                for a, b in zip(
                    starts[first : index + 1],
                    stops[first : index + 1],
                    strict=True,
                )
            ]
            bins.append(
                _fit_bin(
                    mu[lo:hi],
                    radius[lo:hi],
                    weights[lo:hi],
                    shells,
                    slice(lo, hi),
                    n_max,
                )
            )
            first = index + 1
            spare = 0
    LOGGER.debug(
        'Angular layout for n=%d: %d shells in %d bins, top degree %d',
        n,
        starts.size,
        len(bins),
        max((b.degree for b in bins), default=0),
    )
    return AngularLayout(
        grid=grid,
        points=points,
        group_of_point=group_of_point.ravel(),
        counts=weights,
        shell_of_group=shell_of_group,
        shell_m=group_m[starts],
        bins=tuple(bins),
    )


@dataclasses.dataclass(frozen=True, eq=False)
class AngularTransform:
    """Per-bin Legendre coefficients of an axisymmetric field.

    ``residuals`` hold the part of each bin profile outside the fitted
    span. ``energies`` give the lattice energy of every degree; the
    residual is shared between bands in those proportions, so the band
    weights of a partition of unity still reproduce the field exactly.

    """

    layout: AngularLayout
    coefficients: tuple[npt.NDArray[np.complex128], ...]
    residuals: tuple[npt.NDArray[np.complex128], ...]
    energies: tuple[npt.NDArray[np.float64], ...]

    def synthesize(
        self, weight: abc.Callable[[npt.NDArray[np.float64]], npt.ArrayLike]
    ) -> grid_mod.SpectralField:
        """Rebuild the field with degree n scaled by ``weight(n)``."""
        layout = self.layout
        values = np.zeros(layout.n_groups, dtype=np.complex128)
        for fit, coeff, residual, energy in zip(
            layout.bins,
            self.coefficients,
            self.residuals,
            self.energies,
            strict=True,
        ):
            w = np.asarray(
                weight(np.arange(fit.degree + 1, dtype=np.float64)),
                dtype=np.float64,
            )
            total = float(energy.sum())
            share = float(w @ energy) / total if total > 0 else float(w[0])
            values[fit.groups] = (
                fit.synthesis @ (w[fit.column_degree] * coeff)
                + share * residual
            )
        coeffs = np.zeros(layout.grid.n**3, dtype=np.complex128)
        coeffs[layout.points] = values[layout.group_of_point]
        return grid_mod.SpectralField(
            layout.grid, coeffs.reshape(layout.grid.shape)
        )


def _degree_energy(
    fit: _Bin,
    coeff: npt.NDArray[np.complex128],
    counts: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    selector = np.zeros((fit.column_degree.size, fit.degree + 1))
    selector[np.arange(fit.column_degree.size), fit.column_degree] = 1.0
    by_degree = (fit.synthesis * coeff[None, :]) @ selector
    return np.asarray(counts @ np.abs(by_degree) ** 2, dtype=np.float64)


def angular_transform(f: grid_mod.SpectralField) -> AngularTransform:
    """Group means, axisymmetry check and Legendre fit, bin by bin.

    Raises:
        NotAxisymmetricError: when the variation inside the latitude
            groups of a shell exceeds the configured tolerance

    """
    loc = settings.get_settings().localization
    layout = angular_layout(f.grid, loc.legendre_degree)
    data = f.coeffs.ravel()[layout.points]
    groups = layout.group_of_point
    means = (
        np.bincount(groups, weights=data.real, minlength=layout.n_groups)
        + 1j
        * np.bincount(groups, weights=data.imag, minlength=layout.n_groups)
    ) / layout.counts
    spread = np.bincount(
        groups,
        weights=np.abs(data - means[groups]) ** 2,
        minlength=layout.n_groups,
    )
    mass = np.bincount(
        groups, weights=np.abs(data) ** 2, minlength=layout.n_groups
    )
    floor = 1e-14 * float(mass.sum())
    n_shells = layout.shell_m.size
    variation = np.bincount(
        layout.shell_of_group, weights=spread, minlength=n_shells
    )
    shell_mass = (
        np.bincount(layout.shell_of_group, weights=mass, minlength=n_shells)
        + floor
    )
    bad = np.flatnonzero(
        variation > loc.axisymmetry_tolerance * shell_mass
    )
    if bad.size:
        worst = int(bad[0])
        raise errors.NotAxisymmetricError(
            int(layout.shell_m[worst]),
            float(variation[worst] / shell_mass[worst]),
        )
    coefficients = []
    residuals = []
    energies = []
    for fit in layout.bins:
        profile = means[fit.groups]
        coeff = fit.analysis @ profile
        coefficients.append(coeff)
        residuals.append(profile - fit.synthesis @ coeff)
        energies.append(
            _degree_energy(fit, coeff, layout.counts[fit.groups])
        )
    return AngularTransform(
        layout, tuple(coefficients), tuple(residuals), tuple(energies)
    )


def _degree_weight(
    l: int, variant: Variant, p: int | models.Floor | None  # noqa: E741
) -> abc.Callable[[npt.NDArray[np.float64]], npt.ArrayLike] | None:
    if l < 0:
        raise errors.DomainError('l must be >= 0')
    if variant == 'signed':
        if p is None:
            raise errors.DomainError("variant 'signed' needs p")
        p_value = (
            settings.get_settings().localization.p_min
            if p == models.FLOOR
            else p
        )
        if p_value + l < 0:
            return None
        variant = 'leq' if p_value + l == 0 else 'exact'
    scale = 2.0 ** (-l)
    if variant == 'leq':
        return lambda n: psi(scale * n)
    return lambda n: varphi(scale * n)


def apply_rl(
    f: grid_mod.SpectralField,
    l: int,  # noqa: E741
    p: int | models.Floor | None = None,
    variant: Variant = 'exact',
    *,
    transform: AngularTransform | None = None,
) -> grid_mod.SpectralField:
    """Angular projector on an axisymmetric field.

    ``leq`` keeps degrees with weight psi(2^-l n), ``exact`` uses
    varphi(2^-l n). ``signed`` picks by the sign of p + l: zero when it is
    negative, ``leq`` when it vanishes and ``exact`` otherwise. Pass a
    precomputed ``transform`` to avoid refitting the same field.

    """
    weight = _degree_weight(l, variant, p)
    if weight is None:
        return grid_mod.SpectralField.zeros(f.grid)
    if transform is None:
        transform = angular_transform(f)
    return transform.synthesize(weight)


def angular_partition(
    f: grid_mod.SpectralField, l_max: int
) -> list[grid_mod.SpectralField]:
    """Pieces R_{<=0} f, R_1 f, ..., R_{l_max} f.

    Their degree weights add up to psi(2^-l_max n), so the sum equals
    R_{<=l_max} f.

    """
    transform = angular_transform(f)
    pieces = [apply_rl(f, 0, variant='leq', transform=transform)]
    pieces.extend(
        apply_rl(f, l, variant='exact', transform=transform)
        for l in range(1, l_max + 1)  # noqa: E741
    )
    return pieces


def angular_gradient_norm(f: grid_mod.SpectralField) -> float:
    """L^2 norm of the angular derivative, weight sqrt(n (n + 1))."""
    transform = angular_transform(f)
    return transform.synthesize(lambda n: np.sqrt(n * (n + 1.0))).l2_norm()
