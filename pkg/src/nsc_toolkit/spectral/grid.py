"""
Periodic grid and spectral field containers

The physical box is [-pi L, pi L)^3 sampled at n points per axis. Fields
are stored as Fourier coefficients in scipy.fft ordering so that

    f(x) = sum_xi coeffs(xi) exp(i xi . x),   xi = j / L,

with x the centered coordinate. Coefficient arrays are treated as
immutable once wrapped in a SpectralField or VectorField.

Example usage:
    grid = make_grid(32, 2.0)
    field = SpectralField.from_physical(grid, numpy.exp(-grid.radius**2))
    print(field.l2_norm())
"""

import dataclasses
import functools
import math
import typing

import numpy as np
import numpy.typing as npt
from scipy import fft

from nsc_toolkit import errors

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

MIN_MODES = 4
MAX_MODES = 1024
SPATIAL_AXES = (-3, -2, -1)


@dataclasses.dataclass(frozen=True)
class Grid:
    """n^3 Fourier modes on the box [-pi L, pi L)^3."""

    n: int
    box_scale: float

    def __post_init__(self) -> None:
        if self.n % 2:
            raise errors.ConfigurationError('n must be even')
        if not MIN_MODES <= self.n <= MAX_MODES:
            raise errors.ConfigurationError(
                f'n must be in [{MIN_MODES}, {MAX_MODES}]'
            )
        if not self.box_scale > 0 or not math.isfinite(self.box_scale):
            raise errors.ConfigurationError('box_scale must be positive')

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n, self.n, self.n

    @property
    def spacing(self) -> float:
        """Physical grid spacing 2 pi L / n."""
        return 2.0 * math.pi * self.box_scale / self.n

    @property
    def volume(self) -> float:
        return (2.0 * math.pi * self.box_scale) ** 3

    @functools.cached_property
    def modes(self) -> npt.NDArray[np.int64]:
        """Per-axis integer frequencies in transform order."""
        return np.rint(fft.fftfreq(self.n, 1.0 / self.n)).astype(np.int64)

    @functools.cached_property
    def xi(self) -> tuple[RealArray, RealArray, RealArray]:
        """Wavevector components, broadcastable to the grid shape."""
        axis = self.modes / self.box_scale
        return (
            axis.reshape(-1, 1, 1),
            axis.reshape(1, -1, 1),
            axis.reshape(1, 1, -1),
        )

    @functools.cached_property
    def xi_norm_sq(self) -> RealArray:
        x1, x2, x3 = self.xi
        return typing.cast(RealArray, x1**2 + x2**2 + x3**2)

    @functools.cached_property
    def xi_norm(self) -> RealArray:
        return np.sqrt(self.xi_norm_sq)

    @functools.cached_property
    def xi_h_norm(self) -> RealArray:
        x1, x2, _x3 = self.xi
        return typing.cast(
            RealArray, np.broadcast_to(np.hypot(x1, x2), self.shape).copy()
        )

    @functools.cached_property
    def lam(self) -> RealArray:
        """Dispersion relation xi_3/|xi| with the value 0 at xi = 0."""
        norm = self.xi_norm
        out = np.zeros(self.shape)
        np.divide(
            np.broadcast_to(self.xi[2], self.shape), norm, out=out,
            where=norm > 0,
        )
        return out

    @functools.cached_property
    def axis_mask(self) -> BoolArray:
        """True on the xi_h = 0 line."""
        return typing.cast(BoolArray, self.xi_h_norm == 0)

    @functools.cached_property
    def nyquist_mask(self) -> BoolArray:
        """True on every mode that is kept (no Nyquist index)."""
        keep = self.modes != -self.n // 2
        return typing.cast(
            BoolArray,
            keep.reshape(-1, 1, 1)
            & keep.reshape(1, -1, 1)
            & keep.reshape(1, 1, -1),
        )

    @functools.cached_property
    def dealias_mask(self) -> BoolArray:
        """Two-thirds rule: keep |j| < n/3 along every axis."""
        keep = 3 * np.abs(self.modes) < self.n
        return typing.cast(
            BoolArray,
            keep.reshape(-1, 1, 1)
            & keep.reshape(1, -1, 1)
            & keep.reshape(1, 1, -1),
        )

    @functools.cached_property
    def mode_mask(self) -> BoolArray:
        """Modes carried by dynamical fields: no Nyquist, no zero mode."""
        mask = self.nyquist_mask.copy()
        mask[0, 0, 0] = False
        return mask

    @functools.cached_property
    def coordinates(self) -> tuple[RealArray, RealArray, RealArray]:
        """Centered physical coordinates, broadcastable to the grid."""
        axis = -math.pi * self.box_scale + self.spacing * np.arange(self.n)
        return (
            axis.reshape(-1, 1, 1),
            axis.reshape(1, -1, 1),
            axis.reshape(1, 1, -1),
        )

    @functools.cached_property
    def radius(self) -> RealArray:
        x1, x2, x3 = self.coordinates
        return typing.cast(RealArray, np.sqrt(x1**2 + x2**2 + x3**2))

    @functools.cached_property
    def _parity(self) -> RealArray:
        # (-1)^(j1+j2+j3) moves the transform origin to the box centre
        sign = np.where(self.modes % 2 == 0, 1.0, -1.0)
        return typing.cast(
            RealArray,
            sign.reshape(-1, 1, 1)
            * sign.reshape(1, -1, 1)
            * sign.reshape(1, 1, -1),
        )

    def to_physical(self, coeffs: ComplexArray) -> ComplexArray:
        """Synthesize grid values from coefficients (leading axes kept)."""
        return typing.cast(
            ComplexArray,
            fft.ifftn(coeffs * self._parity, axes=SPATIAL_AXES,
                      norm='forward'),
        )

    def to_spectral(
        self, values: npt.NDArray[np.complex128] | RealArray
    ) -> ComplexArray:
        return typing.cast(
            ComplexArray,
            fft.fftn(values, axes=SPATIAL_AXES, norm='forward') * self._parity,
        )


def make_grid(n: int, box_scale: float) -> Grid:
    """Build a grid, raising ConfigurationError on invalid input."""
    return Grid(n=n, box_scale=float(box_scale))


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralField:
    """One complex scalar field given by its Fourier coefficients."""

    grid: Grid
    coeffs: ComplexArray

    def __post_init__(self) -> None:
        if self.coeffs.shape != self.grid.shape:
            raise errors.ConfigurationError(
                f'coefficient shape {self.coeffs.shape} does not match '
                f'grid {self.grid.shape}'
            )

    @classmethod
    def zeros(cls, grid: Grid) -> 'SpectralField':
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_physical(
        cls, grid: Grid, values: npt.ArrayLike
    ) -> 'SpectralField':
        coeffs = grid.to_spectral(np.asarray(values, dtype=np.complex128))
        coeffs[~grid.nyquist_mask] = 0.0
        return cls(grid, coeffs)

    def physical(self) -> ComplexArray:
        return self.grid.to_physical(self.coeffs)

    def l2_norm(self) -> float:
        """Physical L^2 norm through Parseval."""
        return float(
            math.sqrt(self.grid.volume)
            * np.sqrt(np.sum(np.abs(self.coeffs) ** 2))
        )

    def inner(self, other: 'SpectralField') -> complex:
        """<self, other> = integral of self * conj(other)."""
        return complex(
            self.grid.volume * np.vdot(other.coeffs, self.coeffs)
        )

    def multiply(self, multiplier: npt.ArrayLike) -> 'SpectralField':
        return SpectralField(self.grid, self.coeffs * multiplier)

    def __add__(self, other: 'SpectralField') -> 'SpectralField':
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: 'SpectralField') -> 'SpectralField':
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> 'SpectralField':
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclasses.dataclass(frozen=True, eq=False)
class VectorField:
    """Three Cartesian components stacked along a leading axis."""

    grid: Grid
    coeffs: ComplexArray

    def __post_init__(self) -> None:
        if self.coeffs.shape != (3, *self.grid.shape):
            raise errors.ConfigurationError(
                f'vector shape {self.coeffs.shape} does not match '
                f'grid {self.grid.shape}'
            )

    @classmethod
    def zeros(cls, grid: Grid) -> 'VectorField':
        return cls(grid, np.zeros((3, *grid.shape), dtype=np.complex128))

    @classmethod
    def from_components(
        cls, components: typing.Sequence[SpectralField]
    ) -> 'VectorField':
        grid = components[0].grid
        return cls(grid, np.stack([c.coeffs for c in components]))

    @classmethod
    def from_physical(
        cls, grid: Grid, values: npt.ArrayLike
    ) -> 'VectorField':
        coeffs = grid.to_spectral(np.asarray(values, dtype=np.complex128))
        coeffs[:, ~grid.nyquist_mask] = 0.0
        return cls(grid, coeffs)

    def component(self, index: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[index])

    def components(self) -> tuple[SpectralField, SpectralField, SpectralField]:
        return self.component(0), self.component(1), self.component(2)

    def physical(self) -> ComplexArray:
        return self.grid.to_physical(self.coeffs)

    def l2_norm(self) -> float:
        return float(
            math.sqrt(self.grid.volume)
            * np.sqrt(np.sum(np.abs(self.coeffs) ** 2))
        )

    def inner(self, other: 'VectorField') -> complex:
        return complex(
            self.grid.volume * np.vdot(other.coeffs, self.coeffs)
        )

    def __add__(self, other: 'VectorField') -> 'VectorField':
        return VectorField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: 'VectorField') -> 'VectorField':
        return VectorField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> 'VectorField':
        return VectorField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclasses.dataclass(frozen=True, eq=False)
class VelocityState:
    """Velocity field u at time t for viscosity kappa."""

    velocity: VectorField
    t: float = 0.0
    kappa: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.velocity.grid

    @property
    def u(self) -> tuple[SpectralField, SpectralField, SpectralField]:
        return self.velocity.components()
