import numpy as np
import pytest
from scipy import integrate

from gapcount import (
    DiskBump,
    Gaussian,
    ModelParams,
    NonIntegrableError,
    PowerDecay,
    box_coefficient,
    box_symbol_region_area,
    chi_momentum_integral,
    g_matrix,
    j_integral,
    phase_space_count,
    phase_space_volume,
    weyl_coefficient,
)


def test_weyl_gaussian_closed_form():
    # int V = V0 * pi * sigma^2, so the coefficient is V0 * sigma^2 / 4
    pred = weyl_coefficient(Gaussian(4.0, 1.0))
    assert pred.value == pytest.approx(1.0, rel=1e-9)
    pred2 = weyl_coefficient(Gaussian(3.0, 2.0, center=(5.0, -1.0)))
    assert pred2.value == pytest.approx(3.0, rel=1e-9)


def test_weyl_zero_potential():
    assert weyl_coefficient(Gaussian(0.0, 1.0)).value == 0.0


def test_weyl_disk_area():
    pred = weyl_coefficient(DiskBump(1.0, 1.0, 0.0))
    assert pred.value == pytest.approx(0.25, rel=1e-9)


def test_weyl_rejects_power_decay():
    with pytest.raises(NonIntegrableError):
        weyl_coefficient(PowerDecay(1.0, 2.0))


def test_phase_space_volume_equals_weyl():
    for spec in (Gaussian(4.0, 1.0), DiskBump(1.0, 1.0), DiskBump(2.0, 1.5, 0.4),
                 Gaussian(2.5, 0.8, center=(1.0, 2.0))):
        w = weyl_coefficient(spec)
        v = phase_space_volume(spec)
        assert abs(w.value - v.value) <= 1e-6 * max(w.value, 1.0)


def test_inner_momentum_integral_is_pi_v():
    rng = np.random.default_rng(0)
    spec = Gaussian(4.0, 1.0)
    pts = rng.uniform(-2.0, 2.0, size=(100, 2))
    from gapcount.potential import eval_potential

    for x in pts:
        v = float(eval_potential(spec, x))
        got = chi_momentum_integral(spec, x, n_radial=100_000, n_theta=8)
        assert abs(got - np.pi * v) <= 1e-4 * max(np.pi * v, 1e-12)


# ---------------------------------------------------------------------------
# the angular integral of the second law
# ---------------------------------------------------------------------------

from oracles import radial_profile_integral as _radial_oracle


def test_j_integral_zero_profile():
    params = ModelParams(1.0, 0.3)
    spec = PowerDecay(1.0, 0.0)
    assert j_integral(params, spec).value == 0.0


def test_j_integral_constant_profile_closed_form():
    # Psi = 2, p = 1, lambda = 0, m = 1: J = pi/2 exactly
    params = ModelParams(1.0, 0.0)
    spec = PowerDecay(1.0, 2.0)
    pred = j_integral(params, spec)
    assert pred.value == pytest.approx(np.pi / 2.0, rel=1e-10)


@pytest.mark.parametrize("psi,p,lam", [(2.0, 1.0, 0.0), (1.5, 0.8, 0.2), (3.0, 1.4, -0.3)])
def test_j_integral_matches_radial_oracle(psi, p, lam):
    params = ModelParams(1.0, lam)
    spec = PowerDecay(p, psi)
    pred = j_integral(params, spec)
    oracle = _radial_oracle(params, psi, p)
    assert abs(pred.value - oracle) <= 1e-8 * max(oracle, 1.0)


def test_j_integral_monotone_in_profile():
    params = ModelParams(1.0, 0.0)
    low = j_integral(params, PowerDecay(1.0, 1.0)).value
    high = j_integral(params, PowerDecay(1.0, 2.0)).value
    assert high > low


def test_j_integral_rotation_invariance():
    params = ModelParams(1.0, 0.1)
    base = PowerDecay(1.0, 1.5, cos_coeffs=(0.5,), sin_coeffs=(0.0,))
    # rotating the profile by t: cos(theta - t) = cos t * cos + sin t * sin
    t = 0.7
    rotated = PowerDecay(
        1.0, 1.5, cos_coeffs=(0.5 * np.cos(t),), sin_coeffs=(0.5 * np.sin(t),)
    )
    a = j_integral(params, base)
    b = j_integral(params, rotated)
    assert abs(a.value - b.value) <= 1e-8 * max(a.value, 1.0)


def test_j_integral_scaling_in_constant_profile():
    # for lambda = 0 and Psi = c^p * Psi0, R scales by c and J by c^2
    p = 1.3
    params = ModelParams(1.0, 0.0)
    c = 1.7
    base = j_integral(params, PowerDecay(p, 1.0)).value
    scaled = j_integral(params, PowerDecay(p, c ** p)).value
    assert scaled == pytest.approx(c ** 2 * base, rel=1e-8)


def test_j_integral_requires_power_decay():
    with pytest.raises(TypeError):
        j_integral(ModelParams(1.0, 0.0), Gaussian(1.0, 1.0))


# ---------------------------------------------------------------------------
# pointwise phase-space objects
# ---------------------------------------------------------------------------

def test_g_matrix_zero_potential():
    spec = Gaussian(0.0, 1.0)
    g = g_matrix((0.0, 0.0), (1.0, 0.5), spec)
    assert np.abs(g).max() == 0.0


def test_g_matrix_eigenvalues_and_trace():
    spec = Gaussian(1.0, 1.0)
    g = g_matrix((0.0, 0.0), (1.0, 0.0), spec)
    eigs = np.linalg.eigvalsh(g)
    assert eigs == pytest.approx([-1.0, 1.0], abs=1e-14)
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        x = rng.uniform(-3, 3, size=2)
        xi = rng.uniform(-3, 3, size=2)
        if xi[0] ** 2 + xi[1] ** 2 < 1e-6:
            continue
        g = g_matrix(x, xi, spec)
        assert abs(np.trace(g)) < 1e-14
        from gapcount.potential import eval_potential

        v = float(eval_potential(spec, x))
        law = v / (xi[0] ** 2 + xi[1] ** 2)
        assert np.abs(np.linalg.eigvalsh(g) - [-law, law]).max() < 1e-12 * max(law, 1.0)
        assert np.abs(g - g.conj().T).max() < 1e-14


def test_g_matrix_rejects_zero_momentum():
    with pytest.raises(ValueError):
        g_matrix((0.0, 0.0), (0.0, 0.0), Gaussian(1.0, 1.0))


def test_phase_space_count_strict():
    spec = DiskBump(2.0, 1.0)  # V = 2 inside the unit disk
    assert phase_space_count((0.0, 0.0), (1.0, 0.0), spec) == 1
    spec1 = DiskBump(1.0, 1.0)
    assert phase_space_count((0.0, 0.0), (1.0, 0.0), spec1) == 0  # tie is out
    with pytest.raises(ValueError):
        phase_space_count((0.0, 0.0), (0.0, 0.0), spec)


def test_phase_space_count_equals_g_matrix_count():
    spec = Gaussian(3.0, 1.2)
    rng = np.random.default_rng(2)
    from gapcount import count_above

    for _ in range(10_000):
        x = rng.uniform(-3, 3, size=2)
        xi = rng.uniform(-2, 2, size=2)
        if xi[0] ** 2 + xi[1] ** 2 < 1e-9:
            continue
        g = g_matrix(x, xi, spec)
        eig_count = count_above(np.linalg.eigvalsh(g)[::-1], 1.0)
        assert phase_space_count(x, xi, spec) == eig_count


# ---------------------------------------------------------------------------
# box coefficient
# ---------------------------------------------------------------------------

def test_box_coefficient_vanishing_region():
    params = ModelParams(1.0, 0.0)
    assert box_coefficient(2.0, params, 1.0) == 0.0  # 1/tau + lambda = 0.5 < m


def test_box_coefficient_value():
    params = ModelParams(1.0, 0.0)
    expected = np.sqrt(3.0) / (4.0 * np.pi)
    assert box_coefficient(0.5, params, 1.0) == pytest.approx(expected, rel=1e-12)


def test_box_coefficient_monotone_in_tau():
    params = ModelParams(1.0, 0.2)
    taus = np.linspace(0.2, 2.0, 15)
    vals = [box_coefficient(t, params, 1.0) for t in taus]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_box_symbol_region_area_identity():
    for tau, lam in ((0.5, 0.0), (0.8, 0.3), (0.4, -0.2)):
        params = ModelParams(1.0, lam)
        shifted = max(1.0 / tau + lam, 0.0)
        exact = np.pi * np.sqrt(max(shifted ** 2 - 1.0, 0.0))
        got = box_symbol_region_area(tau, params, n_radial=200_000, n_theta=8)
        assert abs(got - exact) <= 1e-4 * max(exact, 1.0)
    assert box_symbol_region_area(2.0, ModelParams(1.0, 0.0)) == 0.0