"""
Exact Floquet scattering off the shaking spherical square well.

Inside the well the uniform drive is removed by the gauge phase
``exp(-i (U0 / (hbar omega)) sin(omega t))``, which leaves static-well modes
``j_l(q_m r) exp(-i (E + m hbar omega) t / hbar)`` with

    hbar^2 q_m^2 / 2m = E + m hbar omega - U1.

Jacobi-Anger expansion of the gauge phase couples interior mode m to
harmonic n with weight ``J_{n-m}(U0 / (hbar omega))``. Outside, harmonic n is
the incident partial wave (n = 0 only) plus ``beta_{l,n} h_l^{(1)}(k_n r)``.
Matching value and radial derivative at r0 harmonic by harmonic gives a
dense linear system per partial wave.

Radial functions enter the system normalised at r0, so only value/slope
ratios are needed there; ``beta`` is recovered through ``log h_l(k_n r0)``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from .exceptions import ConvergenceError, InvalidArgumentError, NumericError
from .kinematics import Kinematics, channel
from .potentials import ShakingSquareWell
from .specfun import (
    bessel_j_signed,
    legendre_p_all,
    outgoing_log_derivative,
    regular_boundary_pairs,
    spherical_bessel_j_orders,
    spherical_h1_log,
)
from .xsec import CrossSectionResult, sigma_total_optical

logger = logging.getLogger(__name__)

# Above this condition number (of the equilibrated matching matrix) a failed
# residual check is reported as a singular system.
CONDITION_LIMIT = 1e13


@dataclass(frozen=True)
class FloquetBasisConfig:
    """Truncation of the sideband (|n| <= n_max) and partial-wave (l <= l_max) bases.

    ``None`` truncations take the defaults ``ceil(U0/(hbar omega)) + 10`` and
    ``ceil(k r0) + 15``. With ``auto`` the driver doubles n_max and adds 10 to
    l_max until the forward amplitude changes by less than ``tol``.
    """

    n_max: Optional[int] = None
    l_max: Optional[int] = None
    tol: float = 1e-7
    auto: bool = True
    max_refinements: int = 3
    workers: int = 1

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise InvalidArgumentError(f"n_max must be at least 1, got {self.n_max}")
        if self.l_max is not None and self.l_max < 0:
            raise InvalidArgumentError(f"l_max must be non-negative, got {self.l_max}")
        if not (self.tol > 0):
            raise InvalidArgumentError("tol must be positive")


def default_truncation(well, kin):
    n_max = int(math.ceil(abs(well.U0) / kin.quantum)) + 10
    l_max = int(math.ceil(kin.k * well.r0)) + 15
    return n_max, l_max


def _check_inputs(well, kin):
    if not isinstance(well, ShakingSquareWell):
        raise InvalidArgumentError("The exact solver handles the shaking square well only")
    if not math.isclose(well.omega, kin.omega, rel_tol=1e-12):
        raise InvalidArgumentError(
            f"Well drive frequency {well.omega:g} differs from the kinematics omega {kin.omega:g}")


def _truncation(well, kin, cfg):
    n_default, l_default = default_truncation(well, kin)
    return (cfg.n_max if cfg.n_max is not None else n_default,
            cfg.l_max if cfg.l_max is not None else l_default)


@dataclass(frozen=True)
class ChannelSolution:
    """Matching solution of one partial wave.

    ``interior[m + n_max]`` multiplies the interior mode m normalised at r0,
    ``exterior[n + n_max]`` is beta_{l,n}.
    """

    l: int
    n_max: int
    interior: np.ndarray
    exterior: np.ndarray
    residual: float
    condition: float

    def beta(self, n):
        if abs(n) > self.n_max:
            return 0j
        return complex(self.exterior[n + self.n_max])


def _channel_momenta(kin, orders):
    momenta = np.empty(orders.size, dtype=complex)
    for i, n in enumerate(orders):
        ch = channel(kin, int(n))
        k_n = ch.complex_k
        if k_n == 0:
            # threshold channel: carries no flux, keep the Hankel function finite
            k_n = complex(1e-12 * kin.k, 0.0)
            logger.debug("Channel n=%d sits at threshold; using k_n=%g", n, k_n.real)
        momenta[i] = k_n
    return momenta


def solve_partial_wave(well: ShakingSquareWell, kin: Kinematics, l, cfg=None):
    """Mode-match partial wave ``l`` at r0 for all harmonics |n| <= n_max.

    Raises:
        NumericError: the solve is non-finite, or the residual check fails on
            an ill-conditioned matrix (condition attached).
        ConvergenceError: the matching residual exceeds ``cfg.tol``.
    """
    _check_inputs(well, kin)
    cfg = cfg or FloquetBasisConfig()
    l = int(l)
    if l < 0:
        raise InvalidArgumentError(f"Partial wave must be non-negative, got {l}")
    n_max, _ = _truncation(well, kin, cfg)
    return _solve(well, kin, l, n_max, cfg.tol)


def _inverse_max(magnitudes):
    return 1.0 / np.where(magnitudes > 0, magnitudes, 1.0)


def _singular(l, n_max, condition):
    return NumericError(
        f"Singular matching matrix for l={l}, n_max={n_max} (condition {condition:.3e})",
        condition=condition,
    )


def _solve(well, kin, l, n_max, tol):
    if well.is_free:
        empty = np.zeros(2 * n_max + 1, dtype=complex)
        return ChannelSolution(l=l, n_max=n_max, interior=empty, exterior=empty.copy(), residual=0.0, condition=1.0)

    hbar, mass = kin.units.hbar, kin.units.mass
    r0 = well.r0
    orders = np.arange(-n_max, n_max + 1)

    # Step 1: sideband couplings J_{n-m}(U0 / (hbar omega))
    drive = well.U0 / kin.quantum
    bessel = bessel_j_signed(2 * n_max, drive)
    coupling = bessel[orders[:, None] - orders[None, :] + 2 * n_max]

    # Step 2: interior modes, value and r0 * slope at the wall
    energies = kin.E + orders * kin.quantum - well.U1
    q = np.sqrt((2.0 * mass * energies).astype(complex)) / hbar
    inner_value, inner_slope = regular_boundary_pairs(l, q * r0)

    # Step 3: exterior channels, outgoing waves normalised to 1 at r0
    momenta = _channel_momenta(kin, orders)
    outer_slope = outgoing_log_derivative(l, momenta * r0)

    # Step 4: incident partial wave i^l (2l+1) j_l(kr), harmonic 0 only
    x = kin.k * r0
    j = spherical_bessel_j_orders(l + 1, x)
    weight = (1j ** l) * (2 * l + 1)
    incident = weight * j[l]
    incident_slope = weight * (l * j[l] - x * j[l + 1])

    # Step 5: eliminate the exterior amplitudes with the value equations
    matrix = coupling * (inner_slope[None, :] - outer_slope[:, None] * inner_value[None, :])
    rhs = np.zeros(orders.size, dtype=complex)
    centre = n_max
    rhs[centre] = incident_slope - outer_slope[centre] * incident

    # Rows and columns equilibrated to unit max; the condition is that of the scaled matrix.
    row_scale = _inverse_max(np.abs(matrix).max(axis=1))
    scaled = matrix * row_scale[:, None]
    col_scale = _inverse_max(np.abs(scaled).max(axis=0))
    scaled = scaled * col_scale[None, :]
    with np.errstate(all='ignore'):
        try:
            condition = float(np.linalg.cond(scaled))
        except np.linalg.LinAlgError:
            raise _singular(l, n_max, math.inf) from None
        lu, piv = linalg.lu_factor(scaled, check_finite=False)
        interior = col_scale * linalg.lu_solve((lu, piv), row_scale * rhs, check_finite=False)
    if not np.all(np.isfinite(interior)):
        raise _singular(l, n_max, condition)

    boundary = coupling @ (inner_value * interior)
    boundary[centre] -= incident

    # Value equations hold by construction; the slope equations carry the residual.
    slope_res = coupling @ (inner_slope * interior) - outer_slope * boundary
    slope_res[centre] -= incident_slope
    scale = max(abs(incident), abs(incident_slope))
    residual = 0.0
    if scale > 0:
        residual = float(np.max(np.abs(slope_res)) / scale)
    if residual > tol:
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise _singular(l, n_max, condition)
        raise ConvergenceError(
            f"Matching residual {residual:.3e} above tolerance {tol:.1e} for l={l}",
            estimate=boundary,
            error=residual,
            condition=condition,
        )
    if condition > CONDITION_LIMIT:
        logger.debug("l=%d: condition %.3e but residual %.1e, solution kept", l, condition, residual)

    with np.errstate(over='ignore', under='ignore'):
        log_h = spherical_h1_log(l, momenta * r0)[l]
        exterior = boundary * np.exp(-log_h)
    exterior = np.where(np.isfinite(exterior), exterior, 0.0)

    return ChannelSolution(
        l=l,
        n_max=n_max,
        interior=interior,
        exterior=exterior,
        residual=residual,
        condition=condition,
    )


@dataclass(frozen=True)
class ExactAmplitude:
    """f_n(theta) on a grid of polar angles for every open channel of a solution."""

    thetas: Tuple[float, ...]
    values: Dict[int, np.ndarray]

    def __call__(self, n):
        if n not in self.values:
            return np.zeros(len(self.thetas), dtype=complex)
        return self.values[n]

    def rows(self):
        return [(n, theta, complex(value))
                for n in sorted(self.values)
                for theta, value in zip(self.thetas, self.values[n])]


@dataclass
class FloquetSolution:
    """All partial waves l <= l_max at one truncation, with amplitude assembly."""

    well: ShakingSquareWell
    kin: Kinematics
    n_max: int
    l_max: int
    waves: List[ChannelSolution]
    history: List[Dict[str, float]] = field(default_factory=list)

    @property
    def residual(self):
        return max(wave.residual for wave in self.waves)

    @property
    def condition(self):
        return max(wave.condition for wave in self.waves)

    def betas(self, n):
        return np.array([wave.beta(n) for wave in self.waves])

    def open_orders(self):
        """Open channels inside the truncation; a channel exactly at threshold carries no flux."""
        return [n for n in range(max(-self.n_max, self.kin.n_star), self.n_max + 1)
                if channel(self.kin, n).k_n > 0]

    def amplitude(self, n, theta):
        """f_n(theta) = sum_l beta_{l,n} (-i)^{l+1} P_l(cos theta) / k_n."""
        ch = channel(self.kin, n)
        if not ch.is_open:
            raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
        if abs(n) > self.n_max:
            return np.zeros(np.shape(theta), dtype=complex)[()]
        cos_theta = np.cos(np.asarray(theta, dtype=float))
        legendre = legendre_p_all(self.l_max, np.clip(cos_theta, -1.0, 1.0))
        ls = np.arange(self.l_max + 1)
        coefficients = self.betas(n) * (-1j) ** (ls + 1) / ch.k_n
        value = np.tensordot(coefficients, legendre, axes=(0, 0))
        return complex(value) if np.ndim(value) == 0 else value

    def forward(self):
        return self.amplitude(0, 0.0)

    def amplitudes(self, thetas):
        thetas = tuple(float(theta) for theta in thetas)
        grid = np.asarray(thetas)
        return ExactAmplitude(
            thetas=thetas,
            values={n: np.atleast_1d(self.amplitude(n, grid)) for n in self.open_orders()},
        )

    def channel_cross_sections(self, nodes=None):
        """Flux-weighted sigma_n = (k_n / k) int |f_n|^2 dOmega per open channel."""
        nodes = nodes or self.l_max + 2
        x, w = leggauss(nodes)
        theta = np.arccos(x)
        result = {}
        for n in self.open_orders():
            ch = channel(self.kin, n)
            f = self.amplitude(n, theta)
            sigma = (ch.k_n / self.kin.k) * 2.0 * math.pi * float(np.sum(w * np.abs(f) ** 2))
            result[n] = (sigma, ch.k_n)
        return result

    def metadata(self):
        return {
            'l_max': self.l_max,
            'n_max': self.n_max,
            'residual': self.residual,
            'condition': self.condition,
            'refinements': len(self.history),
            'history': list(self.history),
        }


def solve_floquet(well, kin, n_max, l_max, tol=1e-7, workers=1):
    """Solve every partial wave up to ``l_max`` at sideband truncation ``n_max``."""
    _check_inputs(well, kin)

    def one(l):
        return _solve(well, kin, l, n_max, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            waves = list(pool.map(one, range(l_max + 1)))
    else:
        waves = [one(l) for l in range(l_max + 1)]
    return FloquetSolution(well=well, kin=kin, n_max=n_max, l_max=l_max, waves=waves)


def converge_floquet(well, kin, cfg=None):
    """Solve with the configured truncation, refining it until f_0(0) settles."""
    _check_inputs(well, kin)
    cfg = cfg or FloquetBasisConfig()
    return _converged(well.U0, well.U1, well.omega, well.r0, kin, cfg)


@lru_cache(maxsize=64)
def _converged(U0, U1, omega, r0, kin, cfg):
    well = ShakingSquareWell(U0, U1, omega, r0)
    n_max, l_max = _truncation(well, kin, cfg)
    solution = solve_floquet(well, kin, n_max, l_max, cfg.tol, cfg.workers)
    if not cfg.auto:
        return solution

    history = []
    forward = solution.forward()
    for _ in range(cfg.max_refinements):
        n_max, l_max = 2 * n_max, l_max + 10
        refined = solve_floquet(well, kin, n_max, l_max, cfg.tol, cfg.workers)
        refined_forward = refined.forward()
        change = abs(refined_forward - forward) / max(abs(refined_forward), 1e-300)
        history.append({'n_max': n_max, 'l_max': l_max, 'change': change})
        logger.debug("Truncation n_max=%d l_max=%d: relative change %.3e", n_max, l_max, change)
        solution, forward = refined, refined_forward
        if change < cfg.tol or refined_forward == 0:
            solution.history = history
            return solution
    raise ConvergenceError(
        f"Exact solution did not settle within {cfg.max_refinements} truncation refinements "
        f"(last relative change {history[-1]['change']:.3e} > {cfg.tol:.1e})",
        estimate=forward,
        error=history[-1]['change'],
    )


def exact_amplitude(well, kin, cfg=None, n=0, theta=0.0):
    """Exact Floquet amplitude f_n(theta) for an open channel."""
    ch = channel(kin, n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
    return converge_floquet(well, kin, cfg).amplitude(n, theta)


def sigma_total_exact(well, kin, cfg=None):
    """Optical-theorem total cross section from the exact forward amplitude."""
    solution = converge_floquet(well, kin, cfg)
    forward = solution.forward()
    sigma = sigma_total_optical(forward, kin.k)
    return CrossSectionResult(
        sigma_tot=sigma,
        method='exact',
        per_channel=solution.channel_cross_sections(),
        convergence=dict(solution.metadata(), f_forward=forward),
        warnings=('negative-sigma',) if sigma < 0 else (),
    )


def sigma_channel_sum(well, kin, cfg=None):
    """Sum over open channels of the flux-weighted angle-integrated cross sections."""
    solution = converge_floquet(well, kin, cfg)
    per_channel = solution.channel_cross_sections()
    total = sum(sigma for sigma, _ in per_channel.values())
    return CrossSectionResult(
        sigma_tot=total,
        method='exact',
        per_channel=per_channel,
        convergence=solution.metadata(),
    )


def partial_wave_table(well, kin, cfg=None) -> Dict[Tuple[int, int], complex]:
    """beta_{l,n} for every solved (l, n), keyed by (l, n)."""
    solution = converge_floquet(well, kin, cfg)
    return {
        (wave.l, n): wave.beta(n)
        for wave in solution.waves
        for n in range(-solution.n_max, solution.n_max + 1)
    }
