"""Limiting-law oracles: Weyl coefficient, the angular-profile integral,
phase-space volumes, and the box-law coefficient.

These are pure quadratures and closed forms with no spectral computation;
the studies divide measured eigenvalue counts by these predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .potential import DiskBump, Gaussian, PotentialSpec, PowerDecay, eval_potential, psi_profile
from .symbol import ModelParams

_ERROR_BUDGET = 1e-6  # admissible quadrature error relative to max(value, 1)
_THETA_PANELS = 512


class NonIntegrableError(ValueError):
    """The requested coefficient needs an integrable potential family."""


@dataclass(frozen=True)
class AsymptoticPrediction:
    kind: str  # "weyl1" | "theorem2" | "box" | "phase_space"
    value: float
    error: float

    def __post_init__(self):
        if self.value < 0 or self.error < 0:
            raise ValueError("prediction value and error must be nonnegative")
        if self.error > _ERROR_BUDGET * max(self.value, 1.0):
            raise ValueError(
                f"quadrature error {self.error:.3e} exceeds the "
                f"{_ERROR_BUDGET:.0e} relative budget for value {self.value:.6e}"
            )


def _radial_profile(spec: PotentialSpec):
    """Radial evaluator about the family's own center, plus support data."""
    if isinstance(spec, Gaussian):
        fn = lambda r: spec.amplitude * np.exp(-np.asarray(r) ** 2 / spec.width ** 2)
        # exp(-R^2/sigma^2) tail of int V: pi sigma^2 V0 exp(-R^2/sigma^2)
        rmax = 9.0 * spec.width
        tail = np.pi * spec.width ** 2 * spec.amplitude * np.exp(-(rmax / spec.width) ** 2)
        return fn, rmax, [spec.width], tail
    if isinstance(spec, DiskBump):
        def fn(r):
            return eval_potential(spec, np.stack([np.asarray(r, dtype=float),
                                                  np.zeros_like(np.asarray(r, dtype=float))],
                                                 axis=-1))
        rmax = spec.radius + spec.margin
        return fn, rmax, [spec.radius], 0.0
    raise NonIntegrableError(
        f"{type(spec).__name__} is not integrable on the plane"
    )


def weyl_coefficient(spec: PotentialSpec) -> AsymptoticPrediction:
    """(1/4pi) * integral of V, by adaptive radial quadrature.

    Rejects the power-decay family: with decay exponent below 2 the
    integral diverges.
    """
    fn, rmax, points, tail = _radial_profile(spec)
    val, err = integrate.quad(lambda r: fn(r) * r, 0.0, rmax,
                              points=points, limit=200, epsabs=1e-12, epsrel=1e-12)
    total = 2.0 * np.pi * val + tail
    return AsymptoticPrediction("weyl1", total / (4.0 * np.pi),
                                (2.0 * np.pi * err + tail) / (4.0 * np.pi))


def _composite_gl_radial(fn, rmax: float, panels: int, order: int,
                         breakpoints=()) -> float:
    """Composite Gauss-Legendre quadrature of fn(r)*r on [0, rmax]."""
    edges = np.linspace(0.0, rmax, panels + 1)
    edges = np.unique(np.concatenate([edges, [b for b in breakpoints if 0 < b < rmax]]))
    u, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r = 0.5 * (b - a) * u + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.dot(w, fn(r) * r))
    return total


def phase_space_volume(spec: PotentialSpec) -> AsymptoticPrediction:
    """(2pi)^-2 volume of {(x, xi): V(x) > |xi|^2}.

    The inner momentum integral is the area pi*V(x) of a disk, so the
    volume reduces to (2pi)^-2 * pi * int V.  The remaining x-integral is
    done with a fixed-order composite rule, a deliberately different path
    from weyl_coefficient's adaptive quadrature; the two must agree.
    """
    fn, rmax, points, tail = _radial_profile(spec)
    coarse = _composite_gl_radial(fn, rmax, 64, 24, points)
    fine = _composite_gl_radial(fn, rmax, 128, 24, points)
    total = 2.0 * np.pi * fine + tail
    err = 2.0 * np.pi * abs(fine - coarse) + tail
    value = np.pi * total / (2.0 * np.pi) ** 2
    return AsymptoticPrediction("phase_space", value,
                                np.pi * err / (2.0 * np.pi) ** 2)


# ---------------------------------------------------------------------------
# the angular-profile integral of the second counting law
# ---------------------------------------------------------------------------

def radial_support(params: ModelParams, spec: PowerDecay, theta: float) -> float:
    """Largest radius with a positive integrand along the given ray.

    The integrand is positive exactly where Psi(theta) r^{-p} > m - lambda,
    i.e. r < (Psi(theta) / (m - lambda))^{1/p}.
    """
    psi = float(psi_profile(spec, theta))
    if psi <= 0.0:
        return 0.0
    return (psi / params.gap_distance) ** (1.0 / spec.exponent)


def _radial_integral(params: ModelParams, spec: PowerDecay, theta: float):
    """int_0^{R(theta)} sqrt((lambda + Psi r^-p)^2 - m^2) r dr via adaptive GK."""
    rmax = radial_support(params, spec, theta)
    if rmax == 0.0:
        return 0.0, 0.0
    m, lam = params.mass, params.gap_point
    psi = float(psi_profile(spec, theta))
    p = spec.exponent

    def f(r):
        g = lam + psi * r ** (-p)
        return np.sqrt(max(g * g - m * m, 0.0)) * r

    val, err = integrate.quad(f, 0.0, rmax, limit=400, epsabs=1e-13, epsrel=1e-12)
    return val, err


def j_integral(params: ModelParams, spec: PowerDecay) -> AsymptoticPrediction:
    """(1/4pi) * polar integral of sqrt(((lambda + Psi(theta) r^-p)+^2 - m^2)+).

    Trapezoid over theta panels (spectrally accurate for the trigonometric
    profile), adaptive Gauss-Kronrod in r on [0, R(theta)] so the
    positive-part kink sits on the panel boundary.
    """
    if not isinstance(spec, PowerDecay):
        raise TypeError("j_integral requires a PowerDecay spec")
    thetas = np.linspace(0.0, 2.0 * np.pi, _THETA_PANELS, endpoint=False)
    vals = np.empty(_THETA_PANELS)
    errs = np.empty(_THETA_PANELS)
    for k, th in enumerate(thetas):
        vals[k], errs[k] = _radial_integral(params, spec, th)
    dtheta = 2.0 * np.pi / _THETA_PANELS
    full = float(vals.sum()) * dtheta
    half = float(vals[::2].sum()) * 2.0 * dtheta  # nested coarse trapezoid
    radial_err = float(errs.sum()) * dtheta
    value = full / (4.0 * np.pi)
    error = (abs(full - half) + radial_err) / (4.0 * np.pi)
    return AsymptoticPrediction("theorem2", value, error)


# ---------------------------------------------------------------------------
# pointwise phase-space objects
# ---------------------------------------------------------------------------

def g_matrix(x, xi, spec: PotentialSpec) -> np.ndarray:
    """The traceless limit matrix with eigenvalues +-V(x)|xi|^{-2}."""
    xi = np.asarray(xi, dtype=float)
    x1, x2 = xi[..., 0], xi[..., 1]
    norm2 = x1 ** 2 + x2 ** 2
    if np.any(norm2 == 0.0):
        raise ValueError("g_matrix is undefined at xi = 0")
    v = eval_potential(spec, x)
    off = -((x1 - 1j * x2) ** 2)
    out = np.zeros(np.broadcast(np.asarray(v), x1).shape + (2, 2), dtype=complex)
    out[..., 0, 1] = v * off / norm2 ** 2
    out[..., 1, 0] = np.conj(out[..., 0, 1])
    return out


def phase_space_count(x, xi, spec: PotentialSpec):
    """n_+(1, G(x, xi)) = 1 exactly when V(x) > |xi|^2 (strict)."""
    xi = np.asarray(xi, dtype=float)
    norm2 = xi[..., 0] ** 2 + xi[..., 1] ** 2
    if np.any(norm2 == 0.0):
        raise ValueError("phase_space_count is undefined at xi = 0")
    v = eval_potential(spec, x)
    out = (v > norm2).astype(int)
    return out if out.ndim else int(out)


def chi_momentum_integral(spec: PotentialSpec, x, n_radial: int = 200_000,
                          n_theta: int = 16) -> float:
    """Numerical momentum-space integral of the phase-space indicator at x.

    Midpoint polar quadrature of chi_{V(x) > |xi|^2}; the exact value is
    pi * V(x), which this must reproduce to the midpoint-rule resolution.
    """
    v = float(eval_potential(spec, np.asarray(x, dtype=float)))
    if v <= 0.0:
        return 0.0
    rmax = 1.5 * np.sqrt(v)
    radii = (np.arange(n_radial) + 0.5) * (rmax / n_radial)
    thetas = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    total = 0.0
    for th in thetas:
        xi = np.stack([radii * np.cos(th), radii * np.sin(th)], axis=-1)
        chi = phase_space_count(x, xi, spec)
        total += float(np.sum(chi * radii)) * (rmax / n_radial)
    return total * (2.0 * np.pi / n_theta)


# ---------------------------------------------------------------------------
# box-law coefficient
# ---------------------------------------------------------------------------

def box_coefficient(tau: float, params: ModelParams, area: float) -> float:
    """(4pi)^-1 * (((1/tau + lambda)+)^2 - m^2)+^{1/2} * area, per unit beta^2."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not area > 0:
        raise ValueError(f"area must be positive, got {area}")
    shifted = max(1.0 / tau + params.gap_point, 0.0)
    root = np.sqrt(max(shifted ** 2 - params.mass ** 2, 0.0))
    return float(root * area / (4.0 * np.pi))


def box_symbol_region_area(tau: float, params: ModelParams,
                           n_radial: int = 200_000, n_theta: int = 16) -> float:
    """Momentum area of {xi : (sqrt(|xi|^4 + m^2) - lambda)^{-1} > tau}.

    Computed by midpoint polar quadrature of the indicator; the closed form
    is pi * (((1/tau + lambda)+)^2 - m^2)+^{1/2}.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    m, lam = params.mass, params.gap_point
    shifted = max(1.0 / tau + lam, 0.0)
    disc = shifted ** 2 - m ** 2
    if disc <= 0.0:
        return 0.0
    rmax = 1.5 * disc ** 0.25
    radii = (np.arange(n_radial) + 0.5) * (rmax / n_radial)
    thetas = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    total = 0.0
    for th in thetas:
        xi1 = radii * np.cos(th)
        xi2 = radii * np.sin(th)
        inside = 1.0 / (np.sqrt((xi1 ** 2 + xi2 ** 2) ** 2 + m ** 2) - lam) > tau
        total += float(np.sum(np.where(inside, radii, 0.0))) * (rmax / n_radial)
    return total * (2.0 * np.pi / n_theta)
