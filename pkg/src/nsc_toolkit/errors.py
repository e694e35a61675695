"""Exception hierarchy shared by every nsc-toolkit module."""

import pathlib


class NSCError(Exception):
    """Base class for errors raised by nsc-toolkit."""


class ConfigurationError(NSCError, ValueError):
    """Invalid grid, simulation or experiment configuration."""


class DomainError(NSCError, ValueError):
    """An argument lies outside the domain of a formula."""


class NotAxisymmetricError(DomainError):
    """Angular projection was asked for on non-axisymmetric data."""

    def __init__(self, shell: int, variation: float) -> None:
        super().__init__(
            f'field is not axisymmetric on shell |j|^2={shell} '
            f'(relative azimuthal variation {variation:.3e})'
        )
        self.shell = shell
        self.variation = variation


class EmptyCellError(DomainError):
    """A localization cell contains no resolved Fourier modes."""


class GridTooLargeError(NSCError, ValueError):
    """A brute-force oracle was asked to run on a grid it cannot afford."""

    def __init__(self, n: int, limit: int) -> None:
        super().__init__(
            f'grid n={n} exceeds the direct-sum limit n<={limit}; the '
            f'cost grows as n^6'
        )
        self.n = n
        self.limit = limit


class NumericalAbort(NSCError, RuntimeError):
    """Time integration produced non-finite values."""

    def __init__(
        self, message: str, checkpoint: pathlib.Path | None = None
    ) -> None:
        super().__init__(message)
        self.checkpoint = checkpoint
