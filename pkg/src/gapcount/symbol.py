"""Pointwise 2x2 momentum-space algebra of the free operator.

The free operator acts in momentum space as the Hermitian matrix

    S(xi) = [[ m,              -(xi1 - i*xi2)^2 ],
             [ -(xi1 + i*xi2)^2,             -m ]]

with eigenvalues +-sqrt(m^2 + |xi|^4).  The off-diagonal sign follows from
d/dx_j -> i*xi_j; the opposite sign convention is unitarily conjugate by
diag(1, -1) and changes no eigenvalue count or norm, which the test suite
asserts explicitly.  The resolvent is obtained by direct 2x2 inversion
rather than copied from any tabulated form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize


@dataclass(frozen=True)
class ModelParams:
    """Mass m > 0 and a gap point lambda with |lambda| < m."""

    mass: float
    gap_point: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not abs(self.gap_point) < self.mass:
            raise ValueError(
                f"gap point must satisfy |lambda| < m, got lambda={self.gap_point}, m={self.mass}"
            )

    @property
    def gap_distance(self) -> float:
        """Distance from the gap point to the essential spectrum, m - |lambda|."""
        return self.mass - abs(self.gap_point)


def _split(xi) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(xi, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError(f"momentum must have a trailing axis of size 2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("momentum contains non-finite entries")
    return arr[..., 0], arr[..., 1]


def dirac_symbol(xi, params: ModelParams) -> np.ndarray:
    """Hermitian symbol at momentum xi; broadcasts over leading axes.

    xi may be a pair or an array of shape (..., 2); the result has shape
    (..., 2, 2).
    """
    x1, x2 = _split(xi)
    off = -((x1 - 1j * x2) ** 2)
    out = np.zeros(x1.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = params.mass
    out[..., 1, 1] = -params.mass
    out[..., 0, 1] = off
    out[..., 1, 0] = np.conj(off)
    return out


def resolvent_symbol(xi, params: ModelParams) -> np.ndarray:
    """(S(xi) - lambda I)^{-1} in closed form; shape (..., 2, 2).

    The 2x2 determinant is lambda^2 - m^2 - |xi|^4, strictly negative for
    |lambda| < m, so the inverse never degenerates.
    """
    m, lam = params.mass, params.gap_point
    x1, x2 = _split(xi)
    det = lam ** 2 - m ** 2 - (x1 ** 2 + x2 ** 2) ** 2
    off = (x1 - 1j * x2) ** 2
    out = np.zeros(x1.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = (-m - lam) / det
    out[..., 1, 1] = (m - lam) / det
    out[..., 0, 1] = off / det
    out[..., 1, 0] = np.conj(off) / det
    return out


def symbol_eigenvalues(xi, params: ModelParams) -> np.ndarray:
    """Ordered pair (-e, +e) with e = sqrt(m^2 + |xi|^4); shape (..., 2)."""
    x1, x2 = _split(xi)
    e = np.sqrt(params.mass ** 2 + (x1 ** 2 + x2 ** 2) ** 2)
    return np.stack([-e, e], axis=-1)


def bounded_factor(xi, params: ModelParams, weight_exponent: float = 1.0) -> np.ndarray:
    """(1 + |xi|^2)^w * resolvent symbol, bounded uniformly in xi.

    weight_exponent 1 corresponds to the full weight split as
    (1+|xi|^2)^{1/2} on each side of the resolvent; 1/2 to a single-sided
    half weight.  Both give a multiplier with finite sup norm.
    """
    if weight_exponent not in (1.0, 0.5):
        raise ValueError(f"weight_exponent must be 1 or 1/2, got {weight_exponent}")
    x1, x2 = _split(xi)
    w = (1.0 + x1 ** 2 + x2 ** 2) ** weight_exponent
    return w[..., None, None] * resolvent_symbol(xi, params)


def resolvent_norm_bound(params: ModelParams) -> float:
    """Analytic sup over xi of the resolvent symbol norm, 1/(m - |lambda|)."""
    return 1.0 / params.gap_distance


def _resolvent_norm_radial(t: float, params: ModelParams) -> float:
    # operator norm of the resolvent symbol at |xi|^2 = t
    return 1.0 / (np.sqrt(params.mass ** 2 + t ** 2) - abs(params.gap_point))


def bounded_factor_sup(params: ModelParams, weight_exponent: float = 1.0) -> float:
    """Analytic sup over xi of the bounded-factor norm.

    The norm depends on xi only through t = |xi|^2, so the sup reduces to a
    1D maximization of (1+t)^w / (sqrt(m^2+t^2) - |lambda|) over t >= 0.
    """
    if weight_exponent not in (1.0, 0.5):
        raise ValueError(f"weight_exponent must be 1 or 1/2, got {weight_exponent}")

    def neg(t):
        return -((1.0 + t) ** weight_exponent) * _resolvent_norm_radial(t, params)

    # coarse bracket on a log grid, then local refinement
    grid = np.concatenate([[0.0], np.geomspace(1e-8, 1e8, 1601)])
    vals = -np.array([neg(t) for t in grid])
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    if hi <= lo:
        hi = lo + 1.0
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded")
    return max(float(-res.fun), float(vals[k]), float(-neg(0.0)))
