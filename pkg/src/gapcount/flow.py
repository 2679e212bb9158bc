"""Direct count of eigenvalues crossing the gap point under coupling flow.

Because V >= 0, every eigenvalue branch of the Hermitian family
free - t*V is nonincreasing in t, so the number of crossings through the
gap point as t runs over [0, alpha] equals the difference of below-lambda
counts at the two endpoints.  No t-sweep enters the count; the sweep
exists only for trace plots.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .lattice import GridSpec
from .operators import DENSE_CAP, assemble_dense, perturbed_operator
from .potential import PotentialSpec
from .spectra import hermitian_eigenvalues
from .symbol import ModelParams

DEGENERACY_TOL = 1e-10


class DegenerateThresholdWarning(UserWarning):
    """An endpoint spectrum has an eigenvalue within 1e-10 of the gap point."""


@dataclass(frozen=True)
class CrossingResult:
    """Crossing count with degeneracy bookkeeping.

    When either endpoint spectrum carries an eigenvalue within 1e-10 of the
    gap point, the count is ill-posed at machine precision; bracket gives
    the (low, high) counts obtained by perturbing the threshold by the
    tolerance in both directions, and count reports the strict-inequality
    value.
    """

    count: int
    degenerate: bool
    bracket: tuple[int, int]


@dataclass(frozen=True)
class FlowTrace:
    """Sorted gap eigenvalues of the perturbed operator along a coupling grid."""

    t_values: np.ndarray
    gap_eigenvalues: list[np.ndarray]
    crossing_count: int


def _count_below(values: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero(values < threshold))


def _endpoint_spectrum(grid: GridSpec, params: ModelParams, spec: PotentialSpec,
                       t: float, cap: int) -> np.ndarray:
    op = perturbed_operator(grid, params, spec, t)
    dense = assemble_dense(op, cap=cap)
    return hermitian_eigenvalues(dense).values


def crossing_count_detailed(grid: GridSpec, params: ModelParams,
                            spec: PotentialSpec, alpha: float,
                            cap: int = DENSE_CAP) -> CrossingResult:
    """Crossings of the gap point on [0, alpha], with degeneracy brackets."""
    if alpha < 0:
        raise ValueError(f"coupling must be nonnegative, got {alpha}")
    lam = params.gap_point
    ev_end = _endpoint_spectrum(grid, params, spec, alpha, cap)
    ev_start = _endpoint_spectrum(grid, params, spec, 0.0, cap)
    degenerate = bool(
        np.any(np.abs(ev_end - lam) <= DEGENERACY_TOL)
        or np.any(np.abs(ev_start - lam) <= DEGENERACY_TOL)
    )
    count = _count_below(ev_end, lam) - _count_below(ev_start, lam)
    lo = _count_below(ev_end, lam - DEGENERACY_TOL) - _count_below(
        ev_start, lam + DEGENERACY_TOL
    )
    hi = _count_below(ev_end, lam + DEGENERACY_TOL) - _count_below(
        ev_start, lam - DEGENERACY_TOL
    )
    if degenerate:
        warnings.warn(
            f"eigenvalue within {DEGENERACY_TOL:.0e} of the gap point at an "
            f"endpoint; crossing count brackets to [{lo}, {hi}]",
            DegenerateThresholdWarning,
            stacklevel=2,
        )
    return CrossingResult(count=count, degenerate=degenerate, bracket=(lo, hi))


def crossing_count(grid: GridSpec, params: ModelParams, spec: PotentialSpec,
                   alpha: float, cap: int = DENSE_CAP) -> int:
    """Number of eigenvalues passing the gap point as t grows from 0 to alpha."""
    return crossing_count_detailed(grid, params, spec, alpha, cap).count


def branch_trace(grid: GridSpec, params: ModelParams, spec: PotentialSpec,
                 t_grid, cap: int = DENSE_CAP) -> FlowTrace:
    """Gap-interval eigenvalues along an increasing coupling grid.

    Adjacent-t association is by sort order only, for plotting; the
    crossing count itself comes from the endpoints.
    """
    t_values = np.asarray(t_grid, dtype=float)
    if len(t_values) == 0 or t_values[0] != 0.0 or np.any(np.diff(t_values) <= 0):
        raise ValueError("t grid must be strictly increasing and start at 0")
    m = params.mass
    gap_lists = []
    for t in t_values:
        ev = _endpoint_spectrum(grid, params, spec, float(t), cap)
        inside = ev[(ev > -m) & (ev < m)]
        gap_lists.append(np.sort(inside))
    count = crossing_count_detailed(grid, params, spec, float(t_values[-1]), cap).count
    return FlowTrace(t_values=t_values, gap_eigenvalues=gap_lists,
                     crossing_count=count)
