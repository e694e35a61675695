"""Bilinear multipliers built from the angular basis factors."""

import typing

import numpy as np
import numpy.typing as npt
import pydantic

from nsc_toolkit import errors, localization
from nsc_toolkit.resonance import symbols

Vector = typing.Literal['xi', 'xi_minus_eta', 'eta']
FactorKind = typing.Literal['lambda', 'horizontal', 'cos', 'sin']
Cutoff = typing.Literal['none', 'res', 'nr']


class Factor(pydantic.BaseModel):
    """One basis factor raised to ``power``.

    ``lambda`` and ``horizontal`` are Lambda(zeta) and
    sqrt(1 - Lambda(zeta)^2); ``cos`` and ``sin`` are
    xi_h . theta_h / (|xi_h| |theta_h|) and the same with xi_h^perp, for
    theta one of xi - eta, eta.

    """

    model_config = pydantic.ConfigDict(frozen=True)

    kind: FactorKind
    vector: Vector
    power: int = pydantic.Field(default=1, ge=0)

    @pydantic.model_validator(mode='after')
    def check_vector(self) -> typing.Self:
        if self.kind in ('cos', 'sin') and self.vector == 'xi':
            raise ValueError('angle factors pair xi with xi - eta or eta')
        return self


class MultiplierSpec(pydantic.BaseModel):
    """coefficient * |xi| * product of factors, optionally cut by Phi."""

    model_config = pydantic.ConfigDict(frozen=True)

    factors: tuple[Factor, ...] = ()
    coefficient: float = 1.0
    norm_factor: bool = True
    signs: tuple[int, int, int] = (1, 1, 1)
    cutoff: Cutoff = 'none'
    lambda_cut: float | None = None

    @pydantic.model_validator(mode='after')
    def check_cutoff(self) -> typing.Self:
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError('signs must be +1 or -1')
        if self.cutoff != 'none' and not (
            self.lambda_cut is not None and self.lambda_cut > 0
        ):
            raise ValueError('a phase cutoff needs lambda_cut > 0')
        return self


def _pick(
    name: Vector,
    xi: npt.NDArray[np.float64],
    eta: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    if name == 'xi':
        return xi
    if name == 'eta':
        return eta
    return xi - eta


def _horizontal_unit(
    v: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    h = v[..., :2]
    norm = np.linalg.norm(h, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise errors.DomainError('angle factors need nonzero xi_h, theta_h')
    return h / norm


def _factor_values(
    factor: Factor,
    xi: npt.NDArray[np.float64],
    eta: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    v = _pick(factor.vector, xi, eta)
    if factor.kind == 'lambda':
        return symbols.lam(v)
    if factor.kind == 'horizontal':
        return np.sqrt(np.clip(1.0 - symbols.lam(v) ** 2, 0.0, 1.0))
    xi_h = _horizontal_unit(xi)
    theta_h = _horizontal_unit(v)
    if factor.kind == 'cos':
        return np.sum(xi_h * theta_h, axis=-1)
    return -xi_h[..., 1] * theta_h[..., 0] + xi_h[..., 0] * theta_h[..., 1]


def evaluate(
    spec: MultiplierSpec, xi: npt.ArrayLike, eta: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    xi_v = np.asarray(xi, dtype=np.float64)
    eta_v = np.asarray(eta, dtype=np.float64)
    shape = np.broadcast_shapes(xi_v.shape, eta_v.shape)[:-1]
    value = np.full(shape, spec.coefficient)
    if spec.norm_factor:
        value = value * np.linalg.norm(xi_v, axis=-1)
    for factor in spec.factors:
        value = value * _factor_values(factor, xi_v, eta_v) ** factor.power
    if spec.cutoff != 'none':
        lambda_cut = typing.cast(float, spec.lambda_cut)
        cut = localization.psi(
            symbols.phi(xi_v, eta_v, spec.signs) / lambda_cut
        )
        value = value * (cut if spec.cutoff == 'res' else 1.0 - cut)
    return typing.cast(npt.NDArray[np.float64], value)


def res_nr_split(
    spec: MultiplierSpec, lambda_cut: float
) -> tuple[MultiplierSpec, MultiplierSpec]:
    """psi(Phi / lambda) m and (1 - psi(Phi / lambda)) m."""
    if lambda_cut <= 0:
        raise errors.DomainError('lambda_cut must be > 0')
    if spec.cutoff != 'none':
        raise errors.DomainError('multiplier is already split')
    return (
        spec.model_copy(update={'cutoff': 'res', 'lambda_cut': lambda_cut}),
        spec.model_copy(update={'cutoff': 'nr', 'lambda_cut': lambda_cut}),
    )
