"""
Time-periodic potentials U(b, z, t) with compact support.

``b`` is the transverse distance from the beam axis, ``z`` the coordinate
along the beam and ``t`` the time. Every potential vanishes for
``sqrt(b^2 + z^2) > support_radius``; the eikonal and amplitude integrals are
truncated there.
"""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .exceptions import InvalidArgumentError
from .specfun import integrate_adaptive, periodic_average

logger = logging.getLogger(__name__)

EA_THRESHOLD = 5.0


class PotentialSpec:
    """Base class for T-periodic potentials with compact support.

    Subclasses implement ``_evaluate(b, z, t, azimuth)`` on broadcast numpy
    arrays and set ``omega``, ``support_radius`` and ``axisymmetric``.
    """

    omega: float
    support_radius: float
    axisymmetric: bool = True
    # radii of spherical shells inside the support where U jumps
    breakpoints: Tuple[float, ...] = ()
    # path_integral broadcasts over b, z and t
    vectorised_path = False

    _l_U: Optional[float] = None
    _U_star: Optional[float] = None

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    @property
    def l_U(self):
        """Characteristic length; the support radius unless overridden."""
        return self._l_U if self._l_U is not None else self.support_radius

    @property
    def U_star(self):
        """Characteristic strength; max |U| on a coarse grid unless overridden."""
        if self._U_star is None:
            self._U_star = self.sampled_max()
        return self._U_star

    def with_scales(self, l_U=None, U_star=None):
        """Copy of the potential with the characteristic scales of ea_validity overridden."""
        clone = copy.copy(self)
        clone._l_U = l_U if l_U is not None else self._l_U
        clone._U_star = U_star if U_star is not None else self._U_star
        return clone

    def evaluate(self, b, z, t, azimuth=0.0):
        b = np.asarray(b, dtype=float)
        if np.any(b < 0):
            raise InvalidArgumentError("Transverse radius b must be non-negative")
        z = np.asarray(z, dtype=float)
        t = np.asarray(t, dtype=float)
        inside = b ** 2 + z ** 2 <= self.support_radius ** 2
        values = np.where(inside, self._evaluate(b, z, t, azimuth), 0.0)
        return float(values) if values.ndim == 0 else values

    def _evaluate(self, b, z, t, azimuth):
        raise NotImplementedError

    def sampled_max(self, points=24):
        R = self.support_radius
        b = np.linspace(0.0, R, points)[:, None, None]
        z = np.linspace(-R, R, 2 * points + 1)[None, :, None]
        t = np.linspace(0.0, self.period, points, endpoint=False)[None, None, :]
        values = self.evaluate(b, z, t)
        if not self.axisymmetric:
            for azimuth in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
                values = np.maximum(np.abs(values), np.abs(self.evaluate(b, z, t, azimuth)))
        return float(np.max(np.abs(values)))

    def chord_half_length(self, b):
        """Half length of the straight line at impact parameter b inside the support."""
        b = np.asarray(b, dtype=float)
        return np.sqrt(np.clip(self.support_radius ** 2 - b ** 2, 0.0, None))

    def path_integral(self, b, z, t, v_z, azimuth=0.0, cfg=None):
        """``int_{-inf}^{z} U(b, z', t + (z' - z)/v_z) dz'`` along a straight line.

        ``b`` and ``z`` are scalars, ``t`` may be an array; the result has the
        shape of ``t``. Numerical version; closed forms override this.
        """
        b = float(b)
        z = float(z)
        t = np.asarray(t, dtype=float)
        half = float(self.chord_half_length(b))
        upper = min(z, half)
        if half == 0.0 or upper <= -half:
            return np.zeros(t.shape)

        def integrand(zp):
            zp = zp.reshape((-1,) + (1,) * t.ndim)
            return self.evaluate(b, zp, t + (zp - z) / v_z, azimuth) + 0.0 * t

        cuts = []
        for radius in self.breakpoints:
            if radius > b:
                edge = math.sqrt(radius ** 2 - b ** 2)
                cuts.extend(p for p in (-edge, edge) if -half < p < upper)
        result = integrate_adaptive(integrand, -half, upper, cfg, breakpoints=cuts)
        return np.real(np.asarray(result.value)).reshape(t.shape)

    def fourier_component(self, s, r, t_nodes=256):
        """``U_s(r) = (1/T) int_0^T U(r, t) e^{i s omega t} dt`` sampled at b = r, z = 0."""
        omega = self.omega

        def integrand(t):
            return self.evaluate(float(r), 0.0, t) * np.exp(1j * s * omega * t)

        return complex(periodic_average(integrand, self.period, t_nodes))


class ShakingSquareWell(PotentialSpec):
    """Spherical well whose depth oscillates: U = U0 cos(omega t) + U1 for r <= r0."""

    axisymmetric = True
    vectorised_path = True

    def __init__(self, U0, U1, omega, r0=1.0):
        if not (r0 > 0):
            raise InvalidArgumentError(f"Well radius must be positive, got {r0!r}")
        if not (omega > 0):
            raise InvalidArgumentError(f"Drive frequency must be positive, got {omega!r}")
        for name, value in (('U0', U0), ('U1', U1)):
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
        self.U0 = float(U0)
        self.U1 = float(U1)
        self.omega = float(omega)
        self.r0 = float(r0)
        self.support_radius = self.r0

    def __repr__(self):
        return f"ShakingSquareWell(U0={self.U0:g}, U1={self.U1:g}, omega={self.omega:g}, r0={self.r0:g})"

    @property
    def is_static(self):
        return self.U0 == 0.0

    @property
    def is_free(self):
        return self.U0 == 0.0 and self.U1 == 0.0

    def sampled_max(self, points=24):
        return abs(self.U0) + abs(self.U1)

    def _evaluate(self, b, z, t, azimuth):
        return self.U0 * np.cos(self.omega * t) + self.U1 + 0.0 * (b + z)

    def path_integral(self, b, z, t, v_z, azimuth=0.0, cfg=None):
        """Closed form of the straight-line integral through the well.

        Broadcasts over b, z and t.
        """
        b, z, t = np.broadcast_arrays(
            np.asarray(b, dtype=float), np.asarray(z, dtype=float), np.asarray(t, dtype=float))
        half = self.chord_half_length(b)
        upper = np.clip(z, -half, half)
        static = self.U1 * (upper + half)
        omega = self.omega
        if self.U0 == 0.0:
            return static
        shaking = (self.U0 * v_z / omega) * (
            np.sin(omega * (t + (upper - z) / v_z)) - np.sin(omega * (t - (half + z) / v_z)))
        return static + shaking

    def fourier_component(self, s, r, t_nodes=None):
        if r > self.r0:
            return 0j
        if s == 0:
            return complex(self.U1)
        if abs(s) == 1:
            return complex(0.5 * self.U0)
        return 0j


class FunctionPotential(PotentialSpec):
    """Axisymmetric potential given by a vectorised callable ``func(b, z, t)``.

    Values outside ``support_radius`` are cut to zero, so smooth profiles
    must be negligible there.
    """

    axisymmetric = True

    def __init__(self, func: Callable, omega, support_radius, breakpoints=(), l_U=None, U_star=None):
        if not (support_radius > 0):
            raise InvalidArgumentError("support_radius must be positive")
        if not (omega > 0):
            raise InvalidArgumentError("omega must be positive")
        self.func = func
        self.omega = float(omega)
        self.support_radius = float(support_radius)
        self.breakpoints = tuple(breakpoints)
        self._l_U = l_U
        self._U_star = U_star

    def _evaluate(self, b, z, t, azimuth):
        return self.func(b, z, t)


class CartesianPotential(PotentialSpec):
    """Adapter for potentials without axial symmetry, ``func(x, y, z, t)``.

    ``azimuth`` is the angle of the transverse vector b from the x axis.
    """

    axisymmetric = False

    def __init__(self, func: Callable, omega, support_radius, l_U=None, U_star=None):
        if not (support_radius > 0):
            raise InvalidArgumentError("support_radius must be positive")
        if not (omega > 0):
            raise InvalidArgumentError("omega must be positive")
        self.func = func
        self.omega = float(omega)
        self.support_radius = float(support_radius)
        self._l_U = l_U
        self._U_star = U_star

    def _evaluate(self, b, z, t, azimuth):
        return self.func(b * np.cos(azimuth), b * np.sin(azimuth), z, t)


def evaluate(pot, b, z, t, azimuth=0.0):
    """U(b, z, t); zero outside the support radius."""
    return pot.evaluate(b, z, t, azimuth)


def fourier_component(pot, s, r):
    """Sideband component U_s(r) with U(r, t) = sum_s U_s(r) exp(-i s omega t)."""
    return pot.fourier_component(int(s), float(r))


@dataclass(frozen=True)
class FourierComponents:
    s_range: int
    omega: float
    radii: Tuple[float, ...]
    components: Dict[Tuple[int, float], complex]

    def reconstruct(self, r, t):
        """Sum_s U_s(r) exp(-i s omega t) over the tabulated band."""
        return sum(
            self.components[(s, r)] * np.exp(-1j * s * self.omega * np.asarray(t))
            for s in range(-self.s_range, self.s_range + 1)
        )


def fourier_components(pot, s_range, radii):
    radii = tuple(float(r) for r in radii)
    components = {
        (s, r): fourier_component(pot, s, r)
        for s in range(-int(s_range), int(s_range) + 1)
        for r in radii
    }
    return FourierComponents(s_range=int(s_range), omega=pot.omega, radii=radii, components=components)


@dataclass(frozen=True)
class ValidityReport:
    momentum_ratio: float
    energy_ratio: float
    threshold: float
    recommended: bool


def ea_validity(pot, kin, threshold=EA_THRESHOLD):
    """High-energy condition k*l_U/(2 pi) >> 1 and E/U_star >> 1 as two ratios."""
    momentum_ratio = kin.k * pot.l_U / (2.0 * math.pi)
    energy_ratio = kin.E / pot.U_star if pot.U_star > 0 else math.inf
    recommended = momentum_ratio > threshold and energy_ratio > threshold
    if pot.U_star == 0:
        recommended = True
    return ValidityReport(
        momentum_ratio=momentum_ratio,
        energy_ratio=energy_ratio,
        threshold=float(threshold),
        recommended=recommended,
    )
