"""
Units, incident-beam kinematics and Floquet channel bookkeeping.

Channel ``n`` carries kinetic energy ``E_n = E + n*hbar*omega``. It is open
when ``E_n >= 0`` and closed (evanescent) otherwise; closed channels keep a
real decay constant ``kappa_n`` and a flag instead of an imaginary wavenumber.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from .exceptions import InvalidArgumentError


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 0.5
    r0_scale: float = 1.0
    name: str = field(default='custom', compare=False)

    def __post_init__(self):
        for attr in ('hbar', 'mass', 'r0_scale'):
            value = getattr(self, attr)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidArgumentError(f"UnitSystem.{attr} must be positive, got {value!r}")

    def rescaled(self, length_factor):
        """Same physics with lengths measured in units ``length_factor`` times smaller.

        Keeps hbar fixed; to keep hbar*k invariant the mass scales with the
        inverse square of the length factor (energies scale likewise).
        """
        return UnitSystem(
            hbar=self.hbar,
            mass=self.mass / length_factor ** 2,
            r0_scale=self.r0_scale * length_factor,
            name=f'{self.name}*{length_factor:g}',
        )


# hbar = 2m = r0 = 1, the convention the benchmark parameters are quoted in
HBAR_2M = UnitSystem(hbar=1.0, mass=0.5, r0_scale=1.0, name='hbar=2m=1')
HBAR_M = UnitSystem(hbar=1.0, mass=1.0, r0_scale=1.0, name='hbar=m=1')

UNIT_PRESETS = {
    HBAR_2M.name: HBAR_2M,
    HBAR_M.name: HBAR_M,
}


def unit_preset(name):
    try:
        return UNIT_PRESETS[name]
    except KeyError:
        known = ', '.join(sorted(UNIT_PRESETS))
        raise InvalidArgumentError(f"Unknown unit preset {name!r} (known: {known})") from None


@dataclass(frozen=True)
class Channel:
    n: int
    E_n: float
    k_n: float
    is_open: bool

    @property
    def kappa(self):
        """Decay constant of a closed channel (0 for open ones)."""
        return 0.0 if self.is_open else self.k_n

    @property
    def complex_k(self):
        """Wavenumber on the physical sheet: k_n if open, i*kappa_n if closed."""
        return complex(self.k_n, 0.0) if self.is_open else complex(0.0, self.k_n)


@dataclass(frozen=True)
class Kinematics:
    k: float
    omega: float
    units: UnitSystem
    E: float
    v_z: float
    T: float
    n_star: int

    @property
    def quantum(self):
        """Sideband spacing hbar*omega."""
        return self.units.hbar * self.omega

    def channel(self, n):
        return channel(self, n)


def make_kinematics(k, omega, units=HBAR_2M):
    """Build the incident kinematics for wavenumber ``k`` and drive frequency ``omega``."""
    k = float(k)
    omega = float(omega)
    if not (k > 0 and math.isfinite(k)):
        raise InvalidArgumentError(f"Incident wavenumber must be positive, got {k!r}")
    if not (omega > 0 and math.isfinite(omega)):
        raise InvalidArgumentError(f"Drive frequency must be positive, got {omega!r}")

    hbar, mass = units.hbar, units.mass
    energy = hbar ** 2 * k ** 2 / (2.0 * mass)
    quantum = hbar * omega

    n_star = -int(math.floor(energy / quantum))
    # floor() of a rounded ratio can be off by one at exact multiples
    while energy + (n_star - 1) * quantum >= 0:
        n_star -= 1
    while energy + n_star * quantum < 0:
        n_star += 1

    return Kinematics(
        k=k,
        omega=omega,
        units=units,
        E=energy,
        v_z=hbar * k / mass,
        T=2.0 * math.pi / omega,
        n_star=n_star,
    )


def channel(kin, n):
    """Sideband ``n`` of ``kin``; closed channels are returned flagged, not refused."""
    n = int(n)
    hbar, mass = kin.units.hbar, kin.units.mass
    if n == 0:
        return Channel(n=0, E_n=kin.E, k_n=kin.k, is_open=True)
    energy = kin.E + n * kin.quantum
    is_open = energy >= 0
    return Channel(
        n=n,
        E_n=energy,
        k_n=math.sqrt(2.0 * mass * abs(energy)) / hbar,
        is_open=is_open,
    )


def channels(kin, n_min, n_max) -> List[Channel]:
    return [channel(kin, n) for n in range(int(n_min), int(n_max) + 1)]


def open_channels(kin, n_max) -> List[Channel]:
    """Open channels from n_star up to ``n_max`` inclusive."""
    return channels(kin, kin.n_star, max(int(n_max), kin.n_star))
