"""
Built-in oracle suite run by ``manage.py validate``.

Each check compares a solver result with an independent reference (closed
form vs quadrature, static limits vs phase shifts, optical theorem vs
channel sum, Born limit, transport-equation convergence order) and reports
pass/fail with the measured deviation.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .eikonal import amplitude_axisym, forward_closed_form, transport_residual
from .exact import FloquetBasisConfig, sigma_channel_sum, sigma_total_exact
from .exceptions import ScatteringError
from .kinematics import make_kinematics
from .oracles import born_amplitude, static_ea_sigma, static_sigma_partial_wave
from .potentials import FunctionPotential, ShakingSquareWell
from .xsec import relative_difference, sigma_total_ea

logger = logging.getLogger(__name__)

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ''
    seconds: float = 0.0

    def line(self):
        status = 'PASS' if self.passed else 'FAIL'
        text = f"{status} {self.name}: deviation {self.deviation:.3e} (tolerance {self.tolerance:.1e})"
        if self.detail:
            text += f" {self.detail}"
        return text


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    run: Callable[..., float]
    quick: bool = True


def closed_form_vs_quadrature(quadrature, basis, sets=10):
    """Forward closed form against the (t, b) quadrature for random wells."""
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(sets):
        U0, U1 = rng.uniform(0.0, 100.0, size=2)
        omega = rng.uniform(0.5, 20.0)
        k = rng.uniform(20.0, 60.0)
        well = ShakingSquareWell(U0, U1, omega)
        kin = make_kinematics(k, omega)
        closed = forward_closed_form(well, kin, cfg=quadrature)
        direct = amplitude_axisym(well, kin, 0, 0.0, cfg=quadrature)
        worst = max(worst, abs(closed - direct) / max(abs(direct), 1e-300))
    return worst


def static_ea_limit(quadrature, basis, depths=(1.0, 10.0, 100.0), momenta=(10.0, 37.0)):
    worst = 0.0
    for U1 in depths:
        for k in momenta:
            well = ShakingSquareWell(0.0, U1, 1.0)
            kin = make_kinematics(k, 1.0)
            sigma = sigma_total_ea(well, kin, cfg=quadrature).sigma_tot
            worst = max(worst, relative_difference(sigma, static_ea_sigma(U1, k)))
    return worst


def static_exact_limit(quadrature, basis, depths=(1.0, 10.0, 100.0), momenta=(10.0, 37.0)):
    worst = 0.0
    for U1 in depths:
        for k in momenta:
            well = ShakingSquareWell(0.0, U1, 1.0)
            kin = make_kinematics(k, 1.0)
            sigma = sigma_total_exact(well, kin, cfg=basis).sigma_tot
            worst = max(worst, relative_difference(sigma, static_sigma_partial_wave(U1, k)))
    return worst


BENCHMARK_POINTS = (
    # (U0, U1, omega, k)
    (100.0, 0.0, 10.0, 37.0),
    (10.0, 100.0, 1.0, 37.0),
    (10.0, 10.0, 1.0, 37.0),
    (100.0, 0.0, 3.0, 37.0),
)


def unitarity(quadrature, basis, points=BENCHMARK_POINTS):
    worst = 0.0
    for U0, U1, omega, k in points:
        well = ShakingSquareWell(U0, U1, omega)
        kin = make_kinematics(k, omega)
        optical = sigma_total_exact(well, kin, cfg=basis).sigma_tot
        channel_sum = sigma_channel_sum(well, kin, cfg=basis).sigma_tot
        worst = max(worst, relative_difference(optical, channel_sum))
    return worst


def born_limit(quadrature, basis, thetas=(0.0, 0.025, 0.05)):
    """Weak well: eikonal elastic amplitude against the first-order Born amplitude."""
    well = ShakingSquareWell(0.01, 0.01, 1.0)
    kin = make_kinematics(37.0, 1.0)
    worst = 0.0
    for theta in thetas:
        eikonal = amplitude_axisym(well, kin, 0, theta, cfg=quadrature)
        born = born_amplitude(well, kin, 0, theta)
        worst = max(worst, abs(eikonal - born) / abs(born))
    return worst


def gaussian_test_potential(strength=5.0, width=1.0, omega=2.0):
    """Smooth shaking Gaussian, cut at five widths."""

    def profile(b, z, t):
        return strength * np.exp(-(b ** 2 + z ** 2) / width ** 2) * np.cos(omega * t)

    return FunctionPotential(profile, omega=omega, support_radius=5.0 * width)


def transport_order(quadrature, basis, h=0.1):
    """|log2(residual(h) / residual(h/2)) - 2|, the distance from second order."""
    pot = gaussian_test_potential()
    kin = make_kinematics(5.0, pot.omega)
    coarse = transport_residual(pot, kin, 0.3, 0.2, 0.1, h, cfg=quadrature)
    fine = transport_residual(pot, kin, 0.3, 0.2, 0.1, 0.5 * h, cfg=quadrature)
    return abs(math.log2(coarse / fine) - 2.0)


CHECKS = (
    Check('closed-form-vs-quadrature', 1e-8, closed_form_vs_quadrature),
    Check('static-ea-limit', 1e-6, static_ea_limit),
    Check('static-exact-limit', 1e-6, static_exact_limit),
    Check('unitarity', 1e-4, unitarity, quick=False),
    Check('born-limit', 1e-2, born_limit),
    # ratio in [3.5, 4.5] <=> |log2 ratio - 2| below ~0.17
    Check('transport-order', 0.17, transport_order),
)

QUICK_ARGUMENTS = {
    'closed-form-vs-quadrature': {'sets': 2},
    'static-ea-limit': {'depths': (10.0,), 'momenta': (37.0,)},
    'static-exact-limit': {'depths': (10.0,), 'momenta': (10.0,)},
}


def run_checks(quadrature, basis: FloquetBasisConfig, quick=False, tolerance: Optional[float] = None,
               only=None) -> List[CheckResult]:
    """Run the suite; ``tolerance`` replaces every check's own tolerance."""
    results = []
    for check in CHECKS:
        if quick and not check.quick:
            continue
        if only and check.name not in only:
            continue
        limit = tolerance if tolerance is not None else check.tolerance
        kwargs = QUICK_ARGUMENTS.get(check.name, {}) if quick else {}
        started = time.monotonic()
        try:
            deviation = float(check.run(quadrature, basis, **kwargs))
            detail = ''
        except ScatteringError as exc:
            deviation, detail = math.inf, f"({type(exc).__name__}: {exc})"
        result = CheckResult(
            name=check.name,
            passed=deviation <= limit,
            deviation=deviation,
            tolerance=limit,
            detail=detail,
            seconds=time.monotonic() - started,
        )
        logger.info(result.line())
        results.append(result)
    return results
