"""
Binary checkpoint files

Layout (little-endian): magic ``NSCK``, u32 version, u32 n, f64 box
scale, f64 t, f64 kappa, u32 component count, then each component's n^3
complex coefficients as interleaved (re, im) float64 pairs in C order.
"""

import logging
import pathlib
import struct

import numpy as np

from nsc_toolkit import errors
from nsc_toolkit.spectral import grid as grid_mod

LOGGER = logging.getLogger(__name__)

MAGIC = b'NSCK'
VERSION = 1
_HEADER = struct.Struct('<4sIIdddI')
_DTYPE = np.dtype('<c16')


def save(path: pathlib.Path, state: grid_mod.VelocityState) -> None:
    """Write a velocity state atomically (temp file then rename)."""
    grid = state.grid
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        grid.n,
        grid.box_scale,
        state.t,
        state.kappa,
        state.velocity.coeffs.shape[0],
    )
    partial = path.with_suffix(path.suffix + '.part')
    with partial.open('wb') as handle:
        handle.write(header)
        handle.write(
            np.ascontiguousarray(state.velocity.coeffs, dtype=_DTYPE)
            .tobytes()
        )
    partial.replace(path)
    LOGGER.debug('Checkpoint at t=%.6g written to %s', state.t, path)


def load(path: pathlib.Path) -> grid_mod.VelocityState:
    """Read a checkpoint written by :func:`save`.

    Raises:
        ConfigurationError: bad magic, unsupported version or truncation

    """
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise errors.ConfigurationError(
            f'cannot read checkpoint {path}: {err}'
        ) from err
    if len(raw) < _HEADER.size:
        raise errors.ConfigurationError(f'{path} is truncated')
    magic, version, n, box_scale, t, kappa, ncomp = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise errors.ConfigurationError(f'{path} is not a checkpoint')
    if version != VERSION:
        raise errors.ConfigurationError(
            f'unsupported checkpoint version {version}'
        )
    if ncomp != 3:
        raise errors.ConfigurationError(
            f'expected 3 velocity components, found {ncomp}'
        )
    grid = grid_mod.make_grid(n, box_scale)
    expected = ncomp * n**3 * _DTYPE.itemsize
    payload = raw[_HEADER.size :]
    if len(payload) != expected:
        raise errors.ConfigurationError(
            f'{path} holds {len(payload)} coefficient bytes, '
            f'expected {expected}'
        )
    coeffs = (
        np.frombuffer(payload, dtype=_DTYPE)
        .astype(np.complex128)
        .reshape(ncomp, n, n, n)
    )
    return grid_mod.VelocityState(
        grid_mod.VectorField(grid, coeffs), t=t, kappa=kappa
    )
