"""
Reference computations that do not share code with the solvers.

Everything here is built on scipy.special and scipy.integrate only, so a bug
in the recurrences or the adaptive quadrature of ``specfun`` cannot hide in a
comparison against these values.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .exceptions import InvalidArgumentError, NumericError
from .kinematics import HBAR_2M, channel


def _default_l_max(k, r0):
    return int(math.ceil(k * r0)) + 25


def _interior_log_derivative(l, U1, energy, r0, units):
    """d/dr log j_l(K r) at r0 for the static well, K^2 = 2m(E - U1)/hbar^2."""
    squared = 2.0 * units.mass * (energy - U1) / units.hbar ** 2
    if squared == 0:
        return l / r0
    if squared > 0:
        K = math.sqrt(squared)
        return K * special.spherical_jn(l, K * r0, derivative=True) / special.spherical_jn(l, K * r0)
    kappa = math.sqrt(-squared)
    return kappa * special.spherical_in(l, kappa * r0, derivative=True) / special.spherical_in(l, kappa * r0)


def static_phase_shifts(U1, k, r0=1.0, units=HBAR_2M, l_max=None):
    """Phase shifts delta_l of the static square well (height U1 inside r0)."""
    if not (k > 0):
        raise InvalidArgumentError("k must be positive")
    l_max = _default_l_max(k, r0) if l_max is None else int(l_max)
    energy = units.hbar ** 2 * k ** 2 / (2.0 * units.mass)
    x = k * r0
    deltas = np.zeros(l_max + 1)
    if U1 == 0:
        return deltas
    with np.errstate(all='ignore'):
        for l in range(l_max + 1):
            gamma = _interior_log_derivative(l, U1, energy, r0, units)
            j, dj = special.spherical_jn(l, x), special.spherical_jn(l, x, derivative=True)
            y, dy = special.spherical_yn(l, x), special.spherical_yn(l, x, derivative=True)
            numerator = k * dj - gamma * j
            denominator = k * dy - gamma * y
            delta = math.atan(numerator / denominator) if denominator != 0 else 0.5 * math.pi
            deltas[l] = delta if math.isfinite(delta) else 0.0
    return deltas


def static_beta(U1, k, l, r0=1.0, units=HBAR_2M):
    """Outgoing coefficient of partial wave l in the convention i^l (2l+1) [j_l + beta' h_l]."""
    delta = static_phase_shifts(U1, k, r0, units, l_max=l)[l]
    return (1j ** l) * (2 * l + 1) * 1j * np.exp(1j * delta) * math.sin(delta)


def static_partial_wave_amplitude(U1, k, theta, r0=1.0, units=HBAR_2M, l_max=None):
    """f(theta) = sum_l (2l+1) e^{i delta_l} sin(delta_l) P_l(cos theta) / k."""
    deltas = static_phase_shifts(U1, k, r0, units, l_max)
    ls = np.arange(deltas.size)
    weights = (2 * ls + 1) * np.exp(1j * deltas) * np.sin(deltas)
    legendre = special.eval_legendre(ls[:, None], np.cos(np.atleast_1d(theta))[None, :])
    value = weights @ legendre / k
    return complex(value[0]) if np.ndim(theta) == 0 else value


def static_sigma_partial_wave(U1, k, r0=1.0, units=HBAR_2M, l_max=None):
    """Total cross section (4 pi / k^2) sum_l (2l+1) sin^2 delta_l."""
    deltas = static_phase_shifts(U1, k, r0, units, l_max)
    ls = np.arange(deltas.size)
    return float(4.0 * math.pi / k ** 2 * np.sum((2 * ls + 1) * np.sin(deltas) ** 2))


def _quad(func, a, b):
    value, error = integrate.quad(func, a, b, epsabs=0.0, epsrel=1e-13, limit=400)
    if not math.isfinite(value):
        raise NumericError("scipy quad returned a non-finite value", estimate=value, error=error)
    return value


def static_ea_forward(U1, k, r0=1.0, units=HBAR_2M):
    """Static eikonal forward amplitude (k/i) int_0^r0 b (exp(-2i U1 L / hbar v) - 1) db.

    With L = sqrt(r0^2 - b^2) the measure b db becomes L dL.
    """
    v = units.hbar * k / units.mass
    c = 2.0 * U1 / (units.hbar * v)
    real = _quad(lambda L: L * (math.cos(c * L) - 1.0), 0.0, r0)
    imag = _quad(lambda L: -L * math.sin(c * L), 0.0, r0)
    return k / 1j * complex(real, imag)


def static_ea_sigma(U1, k, r0=1.0, units=HBAR_2M):
    """Static eikonal total cross section 4 pi int_0^r0 b (1 - cos(2 U1 L / hbar v)) db."""
    v = units.hbar * k / units.mass
    c = 2.0 * U1 / (units.hbar * v)
    return 4.0 * math.pi * _quad(lambda L: L * (1.0 - math.cos(c * L)), 0.0, r0)


def _sphere_form_factor(q, r0):
    """int_{r<r0} e^{-i q.r} d^3r = 4 pi r0^3 j_1(q r0) / (q r0)."""
    x = np.asarray(q * r0, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    ratio = np.where(small, 1.0 / 3.0 - x ** 2 / 30.0, special.spherical_jn(1, safe) / safe)
    return 4.0 * math.pi * r0 ** 3 * ratio


def born_amplitude(well, kin, n, theta):
    """First-order Born amplitude into channel n of the shaking square well.

    ``f_n = -(m / (2 pi hbar^2)) U_n F(q)`` with the sideband strengths
    U_0 = U1, U_{+-1} = U0 / 2 and ``q = |k' - k|``, ``|k'| = k_n``.
    """
    ch = channel(kin, n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
    strength = {0: well.U1, 1: 0.5 * well.U0, -1: 0.5 * well.U0}.get(int(n), 0.0)
    theta = np.asarray(theta, dtype=float)
    q = np.sqrt(np.clip(ch.k_n ** 2 + kin.k ** 2 - 2.0 * ch.k_n * kin.k * np.cos(theta), 0.0, None))
    value = -kin.units.mass / (2.0 * math.pi * kin.units.hbar ** 2) * strength * _sphere_form_factor(q, well.r0)
    return complex(value) if value.ndim == 0 else value.astype(complex)
