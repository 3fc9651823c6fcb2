"""
Cross sections from Floquet amplitudes.

Two flux conventions for the channel-resolved differential cross section are
kept side by side:

* ``as-printed``: sqrt(k_n / k) |f|^2
* ``flux-weighted``: (k_n / k) |f|^2, the one that makes the channel sum
  equal the optical theorem.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

from .exceptions import InvalidArgumentError
from .kinematics import channel

logger = logging.getLogger(__name__)

AS_PRINTED = 'as-printed'
FLUX_WEIGHTED = 'flux-weighted'
MODES = (AS_PRINTED, FLUX_WEIGHTED)


@dataclass
class CrossSectionResult:
    sigma_tot: float
    method: str
    per_channel: Dict[int, Tuple[float, float]] = field(default_factory=dict)
    convergence: Dict[str, object] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()

    @property
    def negative(self):
        return self.sigma_tot < 0

    def channel_total(self):
        return sum(sigma for sigma, _ in self.per_channel.values())


def differential_cross_section(f, kin, n, mode=AS_PRINTED):
    """dsigma/dOmega into channel n for amplitude ``f``.

    Returns ``(value, mode)`` so the convention travels with the number.
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"Unknown flux mode {mode!r}; choose from {', '.join(MODES)}")
    ch = channel(kin, n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={n} is closed (E_n = {ch.E_n:.6g} < 0)")
    ratio = ch.k_n / kin.k
    weight = math.sqrt(ratio) if mode == AS_PRINTED else ratio
    return weight * abs(f) ** 2, mode


def sigma_total_optical(f_forward, k):
    """Optical theorem ``(4 pi / k) Im f(0)`` for the elastic forward amplitude.

    A negative value (numerical noise near U -> 0) is returned unchanged and
    logged; callers flag it in CrossSectionResult.warnings.
    """
    sigma = 4.0 * math.pi / k * complex(f_forward).imag
    if sigma < 0:
        logger.warning("Optical theorem gave a negative cross section %.3e (forward amplitude %r)",
                       sigma, f_forward)
    return sigma


def optical_result(f_forward, kin, method, convergence=None, per_channel=None):
    sigma = sigma_total_optical(f_forward, kin.k)
    warnings = ('negative-sigma',) if sigma < 0 else ()
    return CrossSectionResult(
        sigma_tot=sigma,
        method=method,
        per_channel=dict(per_channel or {}),
        convergence=dict(convergence or {}),
        warnings=warnings,
    )


def sigma_total_ea(pot, kin, cfg=None, z_obs=0.0):
    """Eikonal total cross section from the forward elastic amplitude.

    The shaking well uses the closed-form period average; other axisymmetric
    potentials the (t, b) quadrature; anything else the impact-plane form.
    """
    from .eikonal import amplitude_axisym, amplitude_small_angle, forward_closed_form
    from .potentials import ShakingSquareWell

    if isinstance(pot, ShakingSquareWell):
        if pot.is_free:
            forward, route = 0j, 'free'
        else:
            forward, route = forward_closed_form(pot, kin, cfg=cfg), 'closed-form'
    elif pot.axisymmetric:
        forward, route = amplitude_axisym(pot, kin, 0, 0.0, cfg=cfg, z_obs=z_obs), 'axisym'
    else:
        forward, route = amplitude_small_angle(pot, kin, (0.0, 0.0), cfg=cfg, z_obs=z_obs), 'small-angle'

    convergence = {'route': route, 'f_forward': forward}
    if cfg is not None:
        convergence.update(abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol, t_nodes=cfg.t_nodes)
    return optical_result(forward, kin, 'EA', convergence=convergence)


def relative_difference(a, b):
    """|a - b| / max(|a|, |b|), zero when both vanish."""
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale
