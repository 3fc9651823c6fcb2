"""
Generalized eikonal approximation for time-periodic potentials.

The scattering state is approximated as ``(2 pi)^{-3/2} e^{ikz} phi_EA`` with
``phi_EA = exp(i chi)`` and

    chi(b, z, t) = -(1 / (hbar v_z)) int_{-inf}^{z} U(b, z', t + (z' - z)/v_z) dz'.

Amplitudes come in four flavours: the general Floquet form (any channel,
any angle), the small-angle form over the impact-parameter plane, its
axisymmetric Bessel-J0 reduction, and the closed form of the latter for the
shaking square well.

Transverse integrals use ``b = R sin(u)`` so that the chord length
``sqrt(R^2 - b^2)`` is smooth in u; period averages double their node count
until they stop changing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from .exceptions import InvalidArgumentError
from .kinematics import Kinematics, channel
from .potentials import PotentialSpec, ShakingSquareWell
from .specfun import (
    QuadratureConfig,
    bessel_j,
    converged_periodic_average,
    integrate_adaptive,
)

logger = logging.getLogger(__name__)

SMALL_ANGLE_GUARD = 0.2

METHODS = ('general', 'small-angle', 'axisym', 'closed-form')


def _cfg(cfg):
    return cfg if cfg is not None else QuadratureConfig()


def _average_tol(cfg):
    return 0.1 * min(cfg.abs_tol, cfg.rel_tol)


def eikonal_phase(pot: PotentialSpec, kin: Kinematics, b, z, t, azimuth=0.0, cfg=None, closed_form=True):
    """Eikonal phase chi(b, z, t) (real, dimensionless).

    Uses the potential's closed-form line integral when it has one, unless
    ``closed_form=False`` forces adaptive quadrature of the defining integral.

    Raises:
        InvalidArgumentError: negative b.
        NumericError: the quadrature did not converge (estimate attached).
    """
    if b < 0:
        raise InvalidArgumentError(f"Transverse radius b must be non-negative, got {b!r}")
    args = (float(b), float(z), float(t), kin.v_z)
    if closed_form:
        integral = pot.path_integral(*args, azimuth=azimuth, cfg=_cfg(cfg))
    else:
        integral = PotentialSpec.path_integral(pot, *args, azimuth=azimuth, cfg=_cfg(cfg))
    return -float(integral) / (kin.units.hbar * kin.v_z)


def eikonal_factor(pot, kin, b, z, t, azimuth=0.0, cfg=None):
    """Slowly varying factor phi_EA = exp(i chi); modulus one."""
    return complex(np.exp(1j * eikonal_phase(pot, kin, b, z, t, azimuth=azimuth, cfg=cfg)))


def transport_residual(pot, kin, b, z, t, h, cfg=None):
    """Residual of ``i d_t phi + i v_z d_z phi - (U/hbar) phi`` by central differences.

    The z step is ``h`` and the t step ``h / v_z``; the residual shrinks as
    h^2 away from discontinuities of U.
    """
    if not (h > 0):
        raise InvalidArgumentError(f"Grid spacing must be positive, got {h!r}")
    v_z = kin.v_z
    dt = h / v_z

    def phi(zz, tt):
        return eikonal_factor(pot, kin, b, zz, tt, cfg=cfg)

    d_t = (phi(z, t + dt) - phi(z, t - dt)) / (2.0 * dt)
    d_z = (phi(z + h, t) - phi(z - h, t)) / (2.0 * h)
    potential = pot.evaluate(b, z, t)
    return abs(1j * d_t + 1j * v_z * d_z - (potential / kin.units.hbar) * phi(z, t))


# -- transverse profiles ------------------------------------------------------

def _line_integrals(pot, kin, b, z, t, azimuth, cfg):
    """Line integrals on the grid b (nb,) x z (nb,) x t (nt,) -> shape (nt, nb)."""
    if pot.vectorised_path:
        return pot.path_integral(b[None, :], z[None, :], t[:, None], kin.v_z, azimuth=azimuth)
    out = np.empty((t.size, b.size))
    for i, (bi, zi) in enumerate(zip(b, z)):
        out[:, i] = pot.path_integral(float(bi), float(zi), t, kin.v_z, azimuth=azimuth, cfg=cfg)
    return out


def chi_total(pot, kin, b, t, z_obs=0.0, azimuth=0.0, cfg=None):
    """Full-chord phase with the retarded time referred to the plane ``z_obs``.

    Array over b (axis 1) and t (axis 0).
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    R = pot.support_radius
    # Any plane past the support gives the whole chord; shift t to keep z_obs as reference.
    plane = np.full_like(b, R)
    integral = _line_integrals(pot, kin, b, plane, t + (R - z_obs) / kin.v_z, azimuth, _cfg(cfg))
    return -integral / (kin.units.hbar * kin.v_z)


def _profile(pot, kin, b, cfg, z_obs=0.0, azimuth=0.0):
    """<exp(i chi_total(b, t))>_t - 1 for an array of b."""
    b = np.asarray(b, dtype=float)

    def sample(t):
        return np.exp(1j * chi_total(pot, kin, b, t, z_obs=z_obs, azimuth=azimuth, cfg=cfg))

    average, _ = converged_periodic_average(sample, kin.T, cfg.t_nodes, _average_tol(cfg))
    return average - 1.0


def _transverse_integral(R, weight, cfg, breakpoints=()):
    """int_0^R b db weight(b) with b = R sin u."""
    cuts = [math.asin(r / R) for r in breakpoints if 0.0 < r < R]

    def integrand(u):
        b = R * np.sin(u)
        return R * R * np.sin(u) * np.cos(u) * weight(b)

    return integrate_adaptive(integrand, 0.0, 0.5 * math.pi, cfg, breakpoints=cuts).value


def _check_small_angle(q, k, guard, force):
    if not force and q > guard * k:
        raise InvalidArgumentError(
            f"Momentum transfer {q:.4g} exceeds the small-angle guard {guard:g}*k = {guard * k:.4g}; "
            "the eikonal small-angle forms are not valid there (pass force=True to override)"
        )


# -- amplitudes -----------------------------------------------------------------

def amplitude_small_angle(pot, kin, q_perp, cfg=None, guard=SMALL_ANGLE_GUARD, force=False, z_obs=0.0):
    """Elastic amplitude from the impact-parameter integral of exp(i chi) - 1.

    ``f = (k / (2 pi i)) <int d^2b e^{-i q.b} [exp(i chi_total) - 1]>_t``.
    """
    cfg = _cfg(cfg)
    qx, qy = (float(c) for c in q_perp)
    q = math.hypot(qx, qy)
    _check_small_angle(q, kin.k, guard, force)
    R = pot.support_radius

    if pot.axisymmetric:
        def weight(b):
            return bessel_j(0, q * b) * _profile(pot, kin, b, cfg, z_obs=z_obs)

        integral = 2.0 * math.pi * _transverse_integral(R, weight, cfg, pot.breakpoints)
    else:
        direction = math.atan2(qy, qx)

        def weight(b):
            def around(azimuths):
                rows = [
                    np.exp(-1j * q * b * math.cos(phi - direction))
                    * _profile(pot, kin, b, cfg, z_obs=z_obs, azimuth=phi)
                    for phi in azimuths
                ]
                return np.array(rows)

            average, _ = converged_periodic_average(around, 2.0 * math.pi, 16, _average_tol(cfg))
            return 2.0 * math.pi * average

        integral = _transverse_integral(R, weight, cfg)

    return complex(kin.k / (2j * math.pi) * integral)


def amplitude_axisym(pot, kin, n=0, theta=0.0, cfg=None, guard=SMALL_ANGLE_GUARD, force=False, z_obs=0.0):
    """Elastic small-angle amplitude of an axisymmetric potential.

    ``f = (k / i) <int_0^inf b db J0(k b theta) [exp(i chi_total(b, t)) - 1]>_t``,
    evaluated as a two-dimensional (t, b) quadrature.
    """
    if not pot.axisymmetric:
        raise InvalidArgumentError("amplitude_axisym needs an axisymmetric potential")
    if n != 0:
        raise InvalidArgumentError("The axisymmetric eikonal form only covers the elastic channel n = 0")
    if theta < 0:
        raise InvalidArgumentError(f"theta must be non-negative, got {theta!r}")
    cfg = _cfg(cfg)
    k = kin.k
    _check_small_angle(k * theta, k, guard, force)

    def weight(b):
        return bessel_j(0, k * b * theta) * _profile(pot, kin, b, cfg, z_obs=z_obs)

    integral = _transverse_integral(pot.support_radius, weight, cfg, pot.breakpoints)
    return complex(k / 1j * integral)


def closed_form_amplitude(well: ShakingSquareWell, kin, theta=0.0, cfg=None, guard=SMALL_ANGLE_GUARD, force=False):
    """Shaking-well elastic amplitude with the period average done analytically.

    Averaging exp(i chi_total) over a period turns the cos(omega t) term into
    ``J0((2 U0 / (hbar omega)) sin(omega L / v_z))`` with ``L = sqrt(r0^2 - b^2)``.
    """
    if not isinstance(well, ShakingSquareWell):
        raise InvalidArgumentError("The closed form exists for the shaking square well only")
    cfg = _cfg(cfg)
    k = kin.k
    _check_small_angle(k * theta, k, guard, force)
    hbar, v_z, omega = kin.units.hbar, kin.v_z, well.omega
    drive = 2.0 * well.U0 / (hbar * omega)

    def weight(b):
        half = well.chord_half_length(b)
        static = np.exp(-2j * well.U1 * half / (hbar * v_z))
        return bessel_j(0, k * b * theta) * (static * bessel_j(0, drive * np.sin(omega * half / v_z)) - 1.0)

    integral = _transverse_integral(well.r0, weight, cfg)
    return complex(k / 1j * integral)


def forward_closed_form(well, kin, cfg=None):
    """Forward (theta = 0) elastic amplitude of the shaking well, closed form."""
    return closed_form_amplitude(well, kin, theta=0.0, cfg=cfg)


def amplitude_general(pot, kin, kvec_out, n, cfg=None, rtol=1e-8):
    """Floquet amplitude f(k', n <- k) of the generalized eikonal approximation.

    ``f = -(m / (2 pi hbar^2)) <int d^3r e^{-i (k' - k).r} e^{i n omega t} U phi_EA>_t``

    Valid at any angle (within the eikonal approximation itself). For an
    axisymmetric potential the azimuth integral is done analytically (J0);
    otherwise it is a periodic trapezoid over the azimuth.

    Raises:
        InvalidArgumentError: closed channel, or |k'| differs from k_n.
    """
    cfg = _cfg(cfg)
    ch = channel(kin, n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
    kx, ky, kz = (float(c) for c in kvec_out)
    magnitude = math.sqrt(kx * kx + ky * ky + kz * kz)
    if abs(magnitude - ch.k_n) > rtol * max(ch.k_n, 1.0):
        raise InvalidArgumentError(
            f"|k'| = {magnitude:.10g} does not match channel momentum k_{n} = {ch.k_n:.10g}")

    q_perp = math.hypot(kx, ky)
    q_z = kz - kin.k
    direction = math.atan2(ky, kx)
    R = pot.support_radius
    hbar, mass = kin.units.hbar, kin.units.mass
    omega = pot.omega

    def column(b, azimuth):
        """Z(b) * int_{-1}^{1} ds <e^{-i q_z z} e^{i n omega t} U e^{i chi}>_t at z = Z(b) s."""
        half = pot.chord_half_length(b)

        def along(s):
            z = half[None, :] * s[:, None]
            bb = np.broadcast_to(b[None, :], z.shape)

            def sample(t):
                tt = t[:, None, None]
                chi = _phase_grid(pot, kin, bb, z, tt, azimuth, cfg)
                value = pot.evaluate(bb[None], z[None], tt, azimuth)
                return np.exp(1j * (n * omega * tt + chi)) * value

            average, _ = converged_periodic_average(sample, kin.T, cfg.t_nodes, _average_tol(cfg))
            return np.exp(-1j * q_z * z) * average

        return half * integrate_adaptive(along, -1.0, 1.0, cfg).value

    if pot.axisymmetric:
        def weight(b):
            return bessel_j(0, q_perp * b) * column(b, 0.0)

        integral = 2.0 * math.pi * _transverse_integral(R, weight, cfg)
    else:
        def weight(b):
            def around(azimuths):
                return np.array([
                    np.exp(-1j * q_perp * b * math.cos(phi - direction)) * column(b, phi)
                    for phi in azimuths
                ])

            average, _ = converged_periodic_average(around, 2.0 * math.pi, 16, _average_tol(cfg))
            return 2.0 * math.pi * average

        integral = _transverse_integral(R, weight, cfg)

    return complex(-mass / (2.0 * math.pi * hbar ** 2) * integral)


def _phase_grid(pot, kin, b, z, t, azimuth, cfg):
    """chi on broadcast grids b, z (ns, nb) and t (nt, 1, 1) -> (nt, ns, nb)."""
    scale = -1.0 / (kin.units.hbar * kin.v_z)
    if pot.vectorised_path:
        return scale * pot.path_integral(b[None], z[None], t, kin.v_z, azimuth=azimuth)
    times = t.ravel()
    out = np.empty((times.size,) + b.shape)
    for index in np.ndindex(*b.shape):
        out[(slice(None),) + index] = pot.path_integral(
            float(b[index]), float(z[index]), times, kin.v_z, azimuth=azimuth, cfg=cfg)
    return scale * out


def outgoing_vector(kin, n, theta, azimuth=0.0):
    """k' of length k_n at polar angle theta and azimuth."""
    ch = channel(kin, n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
    return (
        ch.k_n * math.sin(theta) * math.cos(azimuth),
        ch.k_n * math.sin(theta) * math.sin(azimuth),
        ch.k_n * math.cos(theta),
    )


# -- tables --------------------------------------------------------------------

AmplitudeKey = Tuple[int, float, Union[float, str]]


@dataclass
class AmplitudeTable:
    kin: Kinematics
    method: str
    entries: Dict[AmplitudeKey, complex] = field(default_factory=dict)

    def add(self, n, theta, value, azimuth='axisym'):
        if n < self.kin.n_star:
            raise InvalidArgumentError(f"Channel n={n} lies below n_star={self.kin.n_star}")
        self.entries[(int(n), float(theta), azimuth)] = complex(value)

    def rows(self):
        return [(n, theta, azimuth, value) for (n, theta, azimuth), value in sorted(
            self.entries.items(), key=lambda item: (item[0][0], item[0][1]))]


def amplitude_table(pot, kin, thetas: Sequence[float], n=0, method='axisym', cfg=None, force=False):
    """Amplitudes on a polar-angle grid with one of the eikonal methods."""
    if method not in METHODS:
        raise InvalidArgumentError(f"Unknown eikonal method {method!r}; choose from {', '.join(METHODS)}")
    if method != 'general' and n != 0:
        raise InvalidArgumentError(f"Method {method!r} covers the elastic channel only; use 'general'")
    table = AmplitudeTable(kin=kin, method=method)
    for theta in thetas:
        if method == 'general':
            _check_small_angle(kin.k * theta, kin.k, SMALL_ANGLE_GUARD, force)
            value = amplitude_general(pot, kin, outgoing_vector(kin, n, theta), n, cfg=cfg)
        elif method == 'small-angle':
            value = amplitude_small_angle(pot, kin, (kin.k * theta, 0.0), cfg=cfg, force=force)
        elif method == 'closed-form':
            value = closed_form_amplitude(pot, kin, theta=theta, cfg=cfg, force=force)
        else:
            value = amplitude_axisym(pot, kin, 0, theta, cfg=cfg, force=force)
        table.add(n, theta, value)
        logger.debug("EA amplitude n=%d theta=%.4g (%s): %r", n, theta, method, value)
    return table
