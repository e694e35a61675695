import hashlib
import math
import pathlib
from collections import abc

import numpy as np

from nsc_toolkit import errors


def fit_loglog(x: abc.Sequence[float], y: abc.Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x).

    Points where either value is not strictly positive are dropped.

    Raises:
        DomainError: fewer than two usable points remain

    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    keep = (xs > 0) & (ys > 0) & np.isfinite(xs) & np.isfinite(ys)
    if np.count_nonzero(keep) < 2:
        raise errors.DomainError('need two positive samples for a fit')
    slope, _intercept = np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)
    return float(slope)


def bracket(t: float) -> float:
    """Japanese bracket sqrt(1 + t^2)."""
    return math.sqrt(1.0 + t * t)


def sha256_file(path: pathlib.Path) -> str:
    digest = hashlib.sha256()
    with path.open('rb') as handle:
        for block in iter(lambda: handle.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()
