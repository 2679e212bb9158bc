import numpy as np
import pytest

from gapcount import (
    DegenerateThresholdWarning,
    Gaussian,
    ModelParams,
    birman_schwinger,
    branch_trace,
    build_grid,
    count_above,
    crossing_count,
    crossing_count_detailed,
    hermitian_eigenvalues,
)
from gapcount.operators import assemble_dense, perturbed_operator

GRID = build_grid(12, 12.0)
GAUSS = Gaussian(4.0, 1.0)


def test_zero_coupling_has_no_crossings():
    assert crossing_count(GRID, ModelParams(1.0, 0.0), GAUSS, 0.0) == 0


def test_crossing_count_monotone_in_coupling():
    params = ModelParams(1.0, 0.0)
    counts = [crossing_count(GRID, params, GAUSS, a) for a in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert counts[-1] > 0


@pytest.mark.parametrize("lam", [0.0, 0.3])
def test_birman_schwinger_equivalence(lam):
    params = ModelParams(1.0, lam)
    dense = assemble_dense(birman_schwinger(GRID, params, GAUSS))
    spectrum = hermitian_eigenvalues(dense)
    for alpha in np.geomspace(1.0, 24.0, 10):
        detail = crossing_count_detailed(GRID, params, GAUSS, float(alpha))
        n_bs = count_above(spectrum, 1.0 / alpha)
        if detail.degenerate:
            assert detail.bracket[0] <= n_bs <= detail.bracket[1]
        else:
            assert detail.count == n_bs


def test_negative_coupling_rejected():
    with pytest.raises(ValueError):
        crossing_count(GRID, ModelParams(1.0, 0.0), GAUSS, -1.0)


def test_degenerate_threshold_flagged_and_bracketed():
    params = ModelParams(1.0, 0.0)
    alpha = 6.0
    dense = assemble_dense(perturbed_operator(GRID, params, GAUSS, alpha))
    eigs = hermitian_eigenvalues(dense).values
    gap_eigs = eigs[(np.abs(eigs) < 1.0)]
    assert len(gap_eigs) > 0
    lam = float(gap_eigs[0]) + 3e-11  # within the 1e-10 collision tolerance
    tuned = ModelParams(1.0, lam)
    with pytest.warns(DegenerateThresholdWarning):
        detail = crossing_count_detailed(GRID, tuned, GAUSS, alpha)
    assert detail.degenerate
    assert detail.bracket[0] <= detail.count <= detail.bracket[1]
    assert detail.bracket[0] < detail.bracket[1]


def test_branch_trace_free_operator_has_empty_gap():
    params = ModelParams(1.0, 0.0)
    trace = branch_trace(GRID, params, Gaussian(0.0, 1.0), [0.0, 1.0, 2.0])
    assert all(len(g) == 0 for g in trace.gap_eigenvalues)
    assert trace.crossing_count == 0


def test_branch_trace_descent_from_upper_edge():
    # branches enter descending from +m: a refined sweep catches them
    # closer to the edge, shrinking the minimal observed edge distance
    params = ModelParams(1.0, 0.0)
    coarse = branch_trace(GRID, params, GAUSS, [0.0, 3.0])
    fine = branch_trace(GRID, params, GAUSS, [0.0, 1.0, 2.0, 3.0])
    edge_dist = lambda tr: min(
        (1.0 - g.max() for g in tr.gap_eigenvalues if len(g)), default=np.inf
    )
    assert edge_dist(fine) < edge_dist(coarse)
    for g in fine.gap_eigenvalues:
        assert np.all(np.abs(g) < 1.0)


def test_full_spectrum_weyl_monotonicity():
    # V >= 0 makes every ordered eigenvalue of the family nonincreasing in t
    params = ModelParams(1.0, 0.0)
    spectra = []
    for t in (0.0, 1.0, 2.0, 4.0):
        dense = assemble_dense(perturbed_operator(GRID, params, GAUSS, t))
        spectra.append(np.sort(hermitian_eigenvalues(dense).values))
    for a, b in zip(spectra, spectra[1:]):
        assert np.all(b <= a + 1e-10)


def test_branch_trace_kth_branch_monotone_at_constant_count():
    # between sweep points with equal branch counts (no entry/exit), the
    # k-th largest gap eigenvalue only moves down
    params = ModelParams(1.0, 0.0)
    trace = branch_trace(GRID, params, GAUSS, [0.0, 1.0, 1.25, 1.5])
    lists = trace.gap_eigenvalues
    compared = 0
    for a, b in zip(lists, lists[1:]):
        if len(a) != len(b) or len(a) == 0:
            continue
        assert np.all(b <= a + 1e-10)
        compared += 1
    assert compared >= 1


def test_branch_trace_grid_validation():
    params = ModelParams(1.0, 0.0)
    with pytest.raises(ValueError):
        branch_trace(GRID, params, GAUSS, [0.5, 1.0])
    with pytest.raises(ValueError):
        branch_trace(GRID, params, GAUSS, [0.0, 1.0, 1.0])