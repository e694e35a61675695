"""
Phase function, resonance functional and their derivatives

Frequencies are arrays whose last axis holds the three components, so
every function evaluates one sample or a whole batch. For a triple
xi = (xi - eta) + eta and signs (mu, mu1, mu2):

    Phi   = mu Lambda(xi) + mu1 Lambda(xi - eta) + mu2 Lambda(eta)
    sigma = xi_3 eta_h - eta_3 xi_h

Derivatives in eta are taken with xi held fixed.
"""

import dataclasses
import logging
import math
import typing

import numpy as np
import numpy.typing as npt

from nsc_toolkit import errors, settings

LOGGER = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]
Signs = tuple[int, int, int]


def _as_vectors(xi: npt.ArrayLike, name: str = 'xi') -> Array:
    values = np.asarray(xi, dtype=np.float64)
    if values.shape[-1:] != (3,):
        raise errors.DomainError(f'{name} must have 3 components')
    if np.any(np.linalg.norm(values, axis=-1) == 0.0):
        raise errors.DomainError(f'{name} must be nonzero')
    return values


def lam(xi: npt.ArrayLike) -> Array:
    """Dispersion relation xi_3 / |xi|."""
    values = _as_vectors(xi)
    return typing.cast(Array, values[..., 2] / np.linalg.norm(values, axis=-1))


def grad_lambda(xi: npt.ArrayLike) -> Array:
    """(-xi_3 xi_1, -xi_3 xi_2, |xi_h|^2) / |xi|^3."""
    values = _as_vectors(xi)
    norm = np.linalg.norm(values, axis=-1, keepdims=True)
    x1, x2, x3 = values[..., 0], values[..., 1], values[..., 2]
    out = np.stack([-x3 * x1, -x3 * x2, x1**2 + x2**2], axis=-1)
    return typing.cast(Array, out / norm**3)


def phi(xi: npt.ArrayLike, eta: npt.ArrayLike, signs: npt.ArrayLike) -> Array:
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    s = np.asarray(signs, dtype=np.float64)
    return typing.cast(
        Array,
        s[..., 0] * lam(xi_v)
        + s[..., 1] * lam(_as_vectors(xi_v - eta_v, 'xi - eta'))
        + s[..., 2] * lam(eta_v),
    )


def sigma_bar(xi: npt.ArrayLike, eta: npt.ArrayLike) -> Array:
    """xi_3 eta_h - eta_3 xi_h, a horizontal 2-vector."""
    xi_v = np.asarray(xi, dtype=np.float64)
    eta_v = np.asarray(eta, dtype=np.float64)
    out = (
        xi_v[..., 2:3] * eta_v[..., :2] - eta_v[..., 2:3] * xi_v[..., :2]
    )
    if LOGGER.isEnabledFor(logging.DEBUG):
        cross = np.cross(xi_v, eta_v)[..., :2]
        mismatch = np.abs(
            np.linalg.norm(out, axis=-1) - np.linalg.norm(cross, axis=-1)
        )
        if np.any(mismatch > 1e-12 * (1.0 + np.linalg.norm(cross, axis=-1))):
            LOGGER.warning('|sigma| differs from |(xi x eta)_h|')
    return typing.cast(Array, out)


@dataclasses.dataclass(frozen=True)
class PhaseDerivatives:
    """Vector-field derivatives of Phi in eta at fixed xi."""

    scaling: Array  # (eta . grad_eta) Phi
    rotation: Array  # (eta_1 d_eta2 - eta_2 d_eta1) Phi
    vertical: Array  # |eta| d_eta3 Phi
    horizontal_gradient: Array  # (d_eta1 Phi, d_eta2 Phi)


def eta_gradient(
    xi: npt.ArrayLike, eta: npt.ArrayLike, signs: npt.ArrayLike
) -> Array:
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    s = np.asarray(signs, dtype=np.float64)
    zeta = _as_vectors(xi_v - eta_v, 'xi - eta')
    return typing.cast(
        Array,
        -s[..., 1:2] * grad_lambda(zeta) + s[..., 2:3] * grad_lambda(eta_v),
    )


def _derivatives_from_gradient(
    eta: Array, gradient: Array
) -> PhaseDerivatives:
    return PhaseDerivatives(
        scaling=np.sum(eta * gradient, axis=-1),
        rotation=eta[..., 0] * gradient[..., 1]
        - eta[..., 1] * gradient[..., 0],
        vertical=np.linalg.norm(eta, axis=-1) * gradient[..., 2],
        horizontal_gradient=gradient[..., :2],
    )


def phase_derivatives(
    xi: npt.ArrayLike, eta: npt.ArrayLike, signs: npt.ArrayLike
) -> PhaseDerivatives:
    eta_v = _as_vectors(eta, 'eta')
    return _derivatives_from_gradient(eta_v, eta_gradient(xi, eta_v, signs))


def phase_derivatives_fd(
    xi: npt.ArrayLike,
    eta: npt.ArrayLike,
    signs: npt.ArrayLike,
    step: float = 1e-6,
) -> PhaseDerivatives:
    """Central finite differences of Phi in eta, relative step."""
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    h = step * np.linalg.norm(eta_v, axis=-1, keepdims=True)
    columns = []
    for axis in range(3):
        offset = np.zeros_like(eta_v)
        offset[..., axis] = h[..., 0]
        columns.append(
            (
                phi(xi_v, eta_v + offset, signs)
                - phi(xi_v, eta_v - offset, signs)
            )
            / (2.0 * h[..., 0])
        )
    return _derivatives_from_gradient(eta_v, np.stack(columns, axis=-1))


def derivative_scale(xi: npt.ArrayLike, eta: npt.ArrayLike) -> Array:
    """|xi_h - eta_h| |sigma| / |xi - eta|^3."""
    xi_v = np.asarray(xi, dtype=np.float64)
    eta_v = np.asarray(eta, dtype=np.float64)
    zeta = xi_v - eta_v
    return typing.cast(
        Array,
        np.linalg.norm(zeta[..., :2], axis=-1)
        * np.linalg.norm(sigma_bar(xi_v, eta_v), axis=-1)
        / np.linalg.norm(zeta, axis=-1) ** 3,
    )


def dyadic_indices(
    v: npt.ArrayLike,
) -> tuple[npt.NDArray[np.int64], ...]:
    """Nearest dyadic (k, p, q) of |v|, sqrt(1 - Lambda^2) and |Lambda|.

    Vanishing anisotropy variables are clamped to p_min and q_min.

    """
    loc = settings.get_settings().localization
    values = _as_vectors(v, 'v')
    norm = np.linalg.norm(values, axis=-1)
    horizontal = np.linalg.norm(values[..., :2], axis=-1) / norm
    vertical = np.abs(values[..., 2]) / norm

    def index(x: Array, floor: int) -> npt.NDArray[np.int64]:
        with np.errstate(divide='ignore'):
            logs = np.log2(x)
        return np.maximum(np.rint(logs), floor).astype(np.int64)

    return (
        np.rint(np.log2(norm)).astype(np.int64),
        index(horizontal, loc.p_min),
        index(vertical, loc.q_min),
    )


def normal_form_denominator(
    xi: npt.ArrayLike,
    eta: npt.ArrayLike,
    signs: npt.ArrayLike,
    kappa: float,
    a: int = 0,
    b: int = 0,
) -> npt.NDArray[np.complex128]:
    """i Phi + kappa (|xi|^2 - (2a+1) |eta|^2 - (2b+1) |xi-eta|^2)."""
    if a < 0 or b < 0:
        raise errors.DomainError('a and b must be >= 0')
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    zeta = xi_v - eta_v
    real = kappa * (
        np.sum(xi_v**2, axis=-1)
        - (2 * a + 1) * np.sum(eta_v**2, axis=-1)
        - (2 * b + 1) * np.sum(zeta**2, axis=-1)
    )
    return typing.cast(
        npt.NDArray[np.complex128], real + 1j * phi(xi_v, eta_v, signs)
    )


def polarized_denominator(
    xi: npt.ArrayLike,
    eta: npt.ArrayLike,
    signs: npt.ArrayLike,
    kappa: float,
) -> npt.NDArray[np.complex128]:
    """i Phi + 2 kappa (xi - eta) . eta."""
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    return typing.cast(
        npt.NDArray[np.complex128],
        2.0 * kappa * np.sum((xi_v - eta_v) * eta_v, axis=-1)
        + 1j * phi(xi_v, eta_v, signs),
    )


@dataclasses.dataclass(frozen=True)
class SymbolSample:
    """One frequency triple with everything derived from it."""

    xi: Array
    eta: Array
    signs: Signs

    @property
    def zeta(self) -> Array:
        return typing.cast(Array, self.xi - self.eta)

    @property
    def lambdas(self) -> tuple[float, float, float]:
        return (
            float(lam(self.xi)),
            float(lam(self.zeta)),
            float(lam(self.eta)),
        )

    @property
    def phi(self) -> float:
        return float(phi(self.xi, self.eta, self.signs))

    @property
    def sigma(self) -> Array:
        return sigma_bar(self.xi, self.eta)

    @property
    def derivatives(self) -> PhaseDerivatives:
        return phase_derivatives(self.xi, self.eta, self.signs)

    def indices(self) -> tuple[tuple[int, int, int], ...]:
        out = []
        for v in (self.xi, self.zeta, self.eta):
            k, p, q = dyadic_indices(v)
            out.append((int(k), int(p), int(q)))
        return tuple(out)


def make_sample(
    xi: npt.ArrayLike, eta: npt.ArrayLike, signs: Signs = (1, 1, 1)
) -> SymbolSample:
    """Validated sample; xi, eta and xi - eta must all be nonzero."""
    xi_v = _as_vectors(xi)
    eta_v = _as_vectors(eta, 'eta')
    _as_vectors(xi_v - eta_v, 'xi - eta')
    if any(s not in (1, -1) for s in signs):
        raise errors.DomainError('signs must be +1 or -1')
    if not all(math.isfinite(x) for x in (*xi_v, *eta_v)):
        raise errors.DomainError('frequencies must be finite')
    return SymbolSample(xi_v, eta_v, signs)
