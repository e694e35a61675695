"""
Energy coefficient tables and energy-identity checks

With S = x.grad - 1 on vector fields the dissipation term expands as

    -<S^n u, S^n Lap u> = sum_k c(n, k) |grad S^k u|^2
     <S^n u, (S - 2)^n u> = sum_k c'(n, k) |S^k u|^2

The c(n, k) are read off a closed-form polynomial and, independently,
derived from three operator rules; c'(n, k) has no closed form and is
derived from S* = -S - 5 alone. Every table entry is an exact Fraction.

Example usage:
    table = coeff_table('c', 4)
    print(table.row(2))   # [Fraction(18, 1), Fraction(2, 1), Fraction(1, 1)]
"""

import csv
import dataclasses
import functools
import logging
import math
import pathlib
import typing
from collections import abc
from fractions import Fraction

import numpy as np
import numpy.typing as npt
from scipy import integrate

from nsc_toolkit import errors, helpers, models
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

Family = typing.Literal['c', 'd', 'a', 'a_prime', 'c_prime']
FAMILIES: tuple[Family, ...] = typing.get_args(Family)
APrimeOrder = typing.Literal['as_written', 'a_order']
ExpansionOrder = typing.Literal['left', 'right']

MAX_ORDER = 12
MAX_IDENTITY_ORDER = 4
GROWTH_LIMIT = 0.2

Polynomial = list[Fraction]  # coefficient of x^i at index i


def _check_indices(n: int, k: int) -> None:
    if not 0 <= n <= MAX_ORDER:
        raise errors.DomainError(f'n must be in [0, {MAX_ORDER}]')
    if not 0 <= k <= n:
        raise errors.DomainError('k must satisfy 0 <= k <= n')


def _times(a: Polynomial, b: Polynomial) -> Polynomial:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _power(a: Polynomial, exponent: int) -> Polynomial:
    out = [Fraction(1)]
    for _ in range(exponent):
        out = _times(out, a)
    return out


def c_polynomial(
    n: int, k: int, order: ExpansionOrder = 'left'
) -> Polynomial:
    """(x + 3/2) (-1)^(n-k) (x + 3)^(n-k-1) (x - 2)^n, expanded.

    ``left`` multiplies the factors in the order written, ``right``
    starts from (x - 2)^n and expands it term by term with binomials.

    """
    _check_indices(n, k)
    if k == n:
        raise errors.DomainError('the polynomial is defined for k < n')
    sign = Fraction((-1) ** (n - k))
    if order == 'left':
        out = [Fraction(3, 2) * sign, sign]
        out = _times(out, _power([Fraction(3), Fraction(1)], n - k - 1))
        return _times(out, _power([Fraction(-2), Fraction(1)], n))
    tail = [
        Fraction(math.comb(n, i) * (-2) ** (n - i)) for i in range(n + 1)
    ]
    middle = [
        Fraction(math.comb(n - k - 1, i) * 3 ** (n - k - 1 - i))
        for i in range(n - k)
    ]
    out = _times(middle, tail)
    shifted = [Fraction(0), *out]
    scaled = [Fraction(3, 2) * x for x in out] + [Fraction(0)]
    return [sign * (x + y) for x, y in zip(scaled, shifted, strict=True)]


@functools.lru_cache(maxsize=None)
def c_coeff(n: int, k: int) -> Fraction:
    _check_indices(n, k)
    if k == n:
        return Fraction(1)
    return c_polynomial(n, k)[k]


def d_coeff(n: int, k: int) -> Fraction:
    """min(0, c(n, k)) below the diagonal, 1 on it."""
    _check_indices(n, k)
    if k == n:
        return Fraction(1)
    return min(Fraction(0), c_coeff(n, k))


@functools.lru_cache(maxsize=None)
def a_coeff(n: int, j: int) -> Fraction:
    """a(n, j) = sum_{k=j}^{n-1} |d(n, k)| a(k, j), a(n, n) = 1."""
    _check_indices(n, j)
    if j == n:
        return Fraction(1)
    return sum(
        (abs(d_coeff(n, k)) * a_coeff(k, j) for k in range(j, n)),
        start=Fraction(0),
    )


# A combination sum_k w_k N_k of basis norms, w_k at index k.
_Combination = tuple[Fraction, ...]


def _pairing(
    a: int, b: int, diagonal: Fraction, adjacent: Fraction, shift: int
) -> _Combination:
    """Reduce <S^a u, T S^b u>, a >= b, to a combination of N_0..N_a.

    Uses <S^k u, T S^k u> = diagonal N_k, <S^(k+1) u, T S^k u> =
    adjacent N_k and <S^a u, T S^b u> = -<S^(a-1) u, T S^(b+1) u>
    + shift <S^(a-1) u, T S^b u>.

    """

    @functools.cache
    def reduce(a: int, b: int) -> _Combination:
        out = [Fraction(0)] * (a + 1)
        if a == b:
            out[a] = diagonal
        elif a == b + 1:
            out[b] = adjacent
        else:
            for i, w in enumerate(reduce(a - 1, b + 1)):
                out[i] -= w
            for i, w in enumerate(reduce(a - 1, b)):
                out[i] += shift * w
        return tuple(out)

    return reduce(a, b)


def _binomial_expansion(
    n: int, diagonal: Fraction, adjacent: Fraction, shift: int
) -> list[Fraction]:
    """<S^n u, T (S - 2)^n u> as a combination of N_0..N_n."""
    out = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        scale = math.comb(n, j) * (-2) ** (n - j)
        for i, w in enumerate(_pairing(n, j, diagonal, adjacent, shift)):
            out[i] += scale * w
    return out


@functools.lru_cache(maxsize=None)
def energy_form_coefficients(n: int) -> tuple[Fraction, ...]:
    """c(n, .) derived from the operator rules, N_k = |grad S^k u|^2.

    T is the Laplacian: S Lap = Lap (S - 2) turns -<S^n u, S^n Lap u>
    into -<S^n u, Lap (S - 2)^n u>, and moving one S across with
    S* = -S - 5 gives the shift -3.

    """
    _check_indices(n, n)
    expansion = _binomial_expansion(
        n, diagonal=Fraction(-1), adjacent=Fraction(3, 2), shift=-3
    )
    return tuple(-w for w in expansion)


@functools.lru_cache(maxsize=None)
def derive_cprime(n: int) -> tuple[Fraction, ...]:
    """c'(n, .) with N_k = |S^k u|^2.

    T is the identity; 2 <S v, v> = <(S + S*) v, v> = -5 |v|^2 gives the
    adjacent rule.

    """
    _check_indices(n, n)
    return tuple(
        _binomial_expansion(
            n, diagonal=Fraction(1), adjacent=Fraction(-5, 2), shift=-5
        )
    )


def c_prime_coeff(n: int, k: int) -> Fraction:
    _check_indices(n, k)
    return derive_cprime(n)[k]


@functools.lru_cache(maxsize=None)
def a_prime_coeff(
    n: int, k: int, order: APrimeOrder = 'as_written'
) -> Fraction:
    """a'(n, k) from the negative part of c'(n, .).

    ``as_written`` evaluates sum_{j=k}^{n-1} |min(c'(n, j), 0)| a'(k, j),
    where only j = k survives; ``a_order`` swaps the inner indices to
    a'(j, k) as in the recursion for a.

    """
    _check_indices(n, k)
    if k == n:
        return Fraction(1)
    total = Fraction(0)
    for j in range(k, n):
        weight = abs(min(c_prime_coeff(n, j), Fraction(0)))
        if order == 'as_written':
            inner = a_prime_coeff(k, j, order) if j <= k else Fraction(0)
        else:
            inner = a_prime_coeff(j, k, order)
        total += weight * inner
    return total


def reconcile_a_prime(
    n_max: int,
) -> list[tuple[int, int, Fraction, Fraction]]:
    """Entries where the two index orders of a' disagree."""
    mismatches = []
    for n in range(n_max + 1):
        for k in range(n + 1):
            written = a_prime_coeff(n, k, 'as_written')
            swapped = a_prime_coeff(n, k, 'a_order')
            if written != swapped:
                mismatches.append((n, k, written, swapped))
    for n, k, written, swapped in mismatches:
        LOGGER.warning(
            "a'(%d, %d) is %s as written but %s in the a-recursion order",
            n,
            k,
            written,
            swapped,
        )
    return mismatches


_FAMILY_FUNCTIONS: dict[Family, abc.Callable[[int, int], Fraction]] = {
    'c': c_coeff,
    'd': d_coeff,
    'a': a_coeff,
    'a_prime': a_prime_coeff,
    'c_prime': c_prime_coeff,
}


@dataclasses.dataclass(frozen=True)
class CoeffTable:
    """Lower-triangular table of one coefficient family."""

    family: Family
    entries: dict[tuple[int, int], Fraction]

    @property
    def n_max(self) -> int:
        return max((n for n, _k in self.entries), default=-1)

    def row(self, n: int) -> list[Fraction]:
        return [self.entries[n, k] for k in range(n + 1)]


def coeff_table(family: Family, n_max: int) -> CoeffTable:
    _check_indices(n_max, 0)
    function = _FAMILY_FUNCTIONS[family]
    return CoeffTable(
        family,
        {
            (n, k): function(n, k)
            for n in range(n_max + 1)
            for k in range(n + 1)
        },
    )


def write_tables_csv(
    path: pathlib.Path, tables: abc.Iterable[CoeffTable]
) -> None:
    """One row per entry: family, n, k, numerator, denominator."""
    with path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['family', 'n', 'k', 'numerator', 'denominator'])
        for table in tables:
            for (n, k), value in sorted(table.entries.items()):
                writer.writerow(
                    [table.family, n, k, value.numerator, value.denominator]
                )


def _s_iterates(
    v: grid_mod.VectorField, n: int
) -> list[grid_mod.VectorField]:
    out = [v]
    for _ in range(n):
        out.append(calculus.s_field(out[-1], 'vector'))
    return out


def _grad_sq(v: grid_mod.VectorField) -> float:
    density = v.grid.xi_norm_sq * np.abs(v.coeffs) ** 2
    return v.grid.volume * float(density.sum())


def _check_identity_order(n: int) -> None:
    if not 0 <= n <= MAX_IDENTITY_ORDER:
        raise errors.DomainError(
            f'identity checks run for 0 <= n <= {MAX_IDENTITY_ORDER}'
        )


def verify_energy_identity(
    n: int, u: grid_mod.VectorField
) -> models.DefectReport:
    """Both sides of -<S^n u, S^n Lap u> = sum_k c(n, k) |grad S^k u|^2.

    ``u`` should be a windowed field; window violations are logged by
    the scaling field.

    """
    _check_identity_order(n)
    iterates = _s_iterates(u, n)
    dissipated = _s_iterates(calculus.laplacian(u), n)[-1]
    lhs = -iterates[-1].inner(dissipated).real
    rhs = sum(
        float(c_coeff(n, k)) * _grad_sq(iterates[k]) for k in range(n + 1)
    )
    return models.DefectReport(order=n, lhs=lhs, rhs=rhs)


def verify_cprime(
    n: int, u: grid_mod.VectorField
) -> models.DefectReport:
    """Both sides of <S^n u, (S - 2)^n u> = sum_k c'(n, k) |S^k u|^2."""
    _check_identity_order(n)
    iterates = _s_iterates(u, n)
    shifted = u
    for _ in range(n):
        shifted = calculus.s_field(shifted, 'vector') - 2.0 * shifted
    lhs = iterates[-1].inner(shifted).real
    rhs = sum(
        float(c_prime_coeff(n, k)) * iterates[k].l2_norm() ** 2
        for k in range(n + 1)
    )
    return models.DefectReport(order=n, lhs=lhs, rhs=rhs)


def _cumulative(
    values: npt.NDArray[np.float64],
    times: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    if times.size < 3:
        return integrate.cumulative_trapezoid(values, times, initial=0.0)
    return integrate.cumulative_simpson(values, x=times, initial=0.0)


def growth_exponent(
    times: abc.Sequence[float], values: abc.Sequence[float]
) -> float | None:
    """Log-log slope of ``values`` against <t>, None without a fit."""
    brackets = [helpers.bracket(t) for t in times]
    try:
        return helpers.fit_loglog(brackets, values)
    except errors.DomainError:
        return None


def energy_balance_report(
    series: models.TimeSeries, m: int = 0
) -> models.BalanceReport:
    """Energy balance of a run at Sobolev order ``m``.

    For m = 0 the defect |u(t)|^2 - |u_0|^2 + 2 kappa int |grad u|^2,
    relative to |u_0|^2, vanishes up to time-stepping error. For m >= 1
    the left side is compared with int |grad u|_inf |u|_{H^m}^2 and the
    largest ratio is reported as ``constant``.

    """
    if not series.energy:
        raise errors.DomainError('time series carries no energy rows')
    rows = np.asarray(series.energy, dtype=np.float64)
    orders = (rows.shape[1] - 4) // 2
    if not 0 <= m <= orders:
        raise errors.DomainError(f'm must be in [0, {orders}]')
    times = rows[:, 0]
    if m == 0:
        energy, dissipation = rows[:, 1], rows[:, 2]
    else:
        energy = rows[:, 3 + m]
        dissipation = rows[:, 3 + orders + m]
    lhs = (
        energy
        - energy[0]
        + 2.0 * series.kappa * _cumulative(dissipation, times)
    )
    constant = None
    if m == 0:
        scale = energy[0] if energy[0] > 0 else 1.0
        defects = lhs / scale
    else:
        rhs = _cumulative(rows[:, 3] * energy, times)
        defects = lhs
        positive = rhs > 0
        if positive.any():
            constant = float(np.max(lhs[positive] / rhs[positive]))
    exponent = growth_exponent(times.tolist(), np.sqrt(energy).tolist())
    if exponent is not None and exponent > GROWTH_LIMIT:
        LOGGER.warning(
            'H^%d norm grows like <t>^%.3f, above %.2f',
            m,
            exponent,
            GROWTH_LIMIT,
        )
    return models.BalanceReport(
        m=m,
        times=times.tolist(),
        defects=defects.tolist(),
        constant=constant,
        growth_exponent=exponent,
    )
