"""
Special functions and quadrature kernels used by the eikonal and exact solvers.

Bessel functions come from recurrences: Miller's downward recurrence for the
regular (minimal) solutions J_n and j_l, upward recurrence for h_l^{(1)}.
Quadrature is adaptive Gauss-Kronrod (7/15 points) with a global error
budget, plus an equal-weight periodic trapezoid rule for period averages.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError, NumericError

logger = logging.getLogger(__name__)

# Recurrence values are renormalised once they pass this magnitude.
_BIG = 1e250


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 40
    t_nodes: int = 64

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidArgumentError("Quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise InvalidArgumentError("max_depth must be at least 1")
        if self.t_nodes < 16 or self.t_nodes % 2:
            raise InvalidArgumentError(f"t_nodes must be even and >= 16, got {self.t_nodes}")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    intervals: int


def _start_order(order):
    """Starting order for Miller's recurrence, safely past the turning point."""
    order = float(order)
    top = int(order + 30 + 10 * order ** (1.0 / 3.0))
    return top + top % 2


# -- cylindrical Bessel functions of integer order ---------------------------

def bessel_j_orders(order_max, x):
    """Table ``J_n(x)`` for ``0 <= n <= order_max``, shape ``(order_max + 1,) + x.shape``."""
    order_max = int(order_max)
    if order_max < 0:
        raise InvalidArgumentError("order_max must be non-negative")
    x = np.asarray(x, dtype=float)
    shape = x.shape
    flat = np.abs(x.ravel())
    zero = flat == 0.0
    safe = np.where(zero, 1.0, flat)

    top = _start_order(max(order_max, float(flat.max()) if flat.size else 0.0))
    table = np.zeros((order_max + 1, flat.size))
    j_next = np.zeros_like(safe)
    j_cur = np.full_like(safe, 1e-30)
    norm = np.zeros_like(safe)

    for n in range(top, -1, -1):
        if n <= order_max:
            table[n] = j_cur
        if n % 2 == 0:
            norm += j_cur if n == 0 else 2.0 * j_cur
        if n == 0:
            break
        j_prev = (2.0 * n / safe) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _BIG
        if big.any():
            scale = np.where(big, 1.0 / _BIG, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm *= scale
            table *= scale

    # J_0 + 2*sum(J_2k) = 1
    table /= norm
    table[:, zero] = 0.0
    table[0, zero] = 1.0

    negative = x.ravel() < 0
    if negative.any():
        odd = np.arange(order_max + 1) % 2 == 1
        table[np.ix_(odd, negative)] *= -1.0
    return table.reshape((order_max + 1,) + shape)


def bessel_j(order, x):
    """Bessel function of the first kind ``J_order(x)`` for integer order, real x.

    Negative orders follow ``J_{-n} = (-1)^n J_n``. Scalar in, scalar out.
    """
    order = int(order)
    value = bessel_j_orders(abs(order), x)[abs(order)]
    if order < 0 and order % 2:
        value = -value
    return float(value) if np.ndim(value) == 0 else value


def bessel_j_signed(order_max, x):
    """Orders ``-order_max..order_max`` of ``J_n(x)`` for a scalar x, indexed by ``n + order_max``."""
    positive = bessel_j_orders(order_max, float(x))
    orders = np.arange(-order_max, order_max + 1)
    values = positive[np.abs(orders)]
    flip = (orders < 0) & (orders % 2 == 1)
    values[flip] = -values[flip]
    return values


# -- spherical Bessel and Hankel functions -----------------------------------

def spherical_j_ratios(l_max, z):
    """Ratios ``rho_l = j_{l+1}(z) / j_l(z)`` for ``0 <= l <= l_max``.

    Computed from the backward continued fraction, so the values are those of
    the regular solution even where j_l itself under/overflows. ``z`` may be
    an array (complex allowed); result shape is ``(l_max + 1,) + z.shape``.
    """
    z = np.asarray(z, dtype=complex)
    top = _start_order(max(int(l_max) + 1, float(np.abs(z).max()) if z.size else 0.0))
    ratios = np.zeros((int(l_max) + 1,) + z.shape, dtype=complex)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        rho = z / (2.0 * top + 3.0)
        for l in range(top, 0, -1):
            if l <= l_max:
                ratios[l] = rho
            # rho_{l-1} = j_l / j_{l-1} = 1 / ((2l+1)/z - rho_l)
            rho = 1.0 / ((2.0 * l + 1.0) / z - rho)
        ratios[0] = rho
    # z = 0: j_{l+1}/j_l -> 0
    return np.where(z == 0, 0.0, ratios)


def _sin_over_z_scaled(z, scaled):
    """``sin(z)`` and ``cos(z)``, optionally multiplied by ``exp(-|Im z|)``."""
    if not scaled:
        return np.sin(z), np.cos(z)
    y = np.abs(z.imag)
    e_plus = np.exp(1j * z.real - z.imag - y)   # e^{iz} e^{-|y|}
    e_minus = np.exp(-1j * z.real + z.imag - y)  # e^{-iz} e^{-|y|}
    return (e_plus - e_minus) / 2j, (e_plus + e_minus) / 2.0


def spherical_bessel_j_orders(l_max, z, scaled=False):
    """``j_l(z)`` for ``0 <= l <= l_max`` at a single complex point.

    With ``scaled=True`` the values are multiplied by ``exp(-|Im z|)`` so that
    purely imaginary arguments up to |z| ~ 1e3 stay representable.
    """
    l_max = int(l_max)
    z = complex(z)
    out = np.zeros(l_max + 1, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    s, c = _sin_over_z_scaled(np.asarray(z), scaled)
    s, c = complex(s), complex(c)
    j0 = s / z
    j1 = s / z ** 2 - c / z
    out[0] = j0
    if l_max == 0:
        return out
    rho = spherical_j_ratios(l_max, z)
    # Normalise on whichever of j0, j1 is further from a zero.
    if abs(j0) >= abs(j1):
        value = j0
        for l in range(0, l_max):
            value = value * rho[l]
            out[l + 1] = value
    else:
        out[1] = j1
        value = j1
        for l in range(1, l_max):
            value = value * rho[l]
            out[l + 1] = value
    return out


def spherical_bessel_j(l, z, scaled=False):
    """Spherical Bessel function ``j_l(z)`` for integer ``l >= 0`` and complex ``z``."""
    if int(l) < 0:
        raise InvalidArgumentError(f"Order must be non-negative, got {l}")
    return complex(spherical_bessel_j_orders(int(l), z, scaled=scaled)[int(l)])


def spherical_h1_ratios(l_max, z):
    """Ratios ``R_l = h_{l+1}(z) / h_l(z)`` by upward recurrence (stable for h_l)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise InvalidArgumentError("Spherical Hankel functions are singular at z = 0")
    ratios = np.zeros((int(l_max) + 1,) + z.shape, dtype=complex)
    ratio = 1.0 / z - 1j
    ratios[0] = ratio
    for l in range(1, int(l_max) + 1):
        ratio = (2.0 * l + 1.0) / z - 1.0 / ratio
        ratios[l] = ratio
    return ratios


def spherical_h1_log(l_max, z):
    """``log h_l^{(1)}(z)`` for ``0 <= l <= l_max``; finite where h_l itself overflows."""
    z = np.asarray(z, dtype=complex)
    ratios = spherical_h1_ratios(l_max, z)
    log_h0 = np.log(-1j / z) + 1j * z
    logs = np.empty_like(ratios)
    logs[0] = log_h0
    if l_max > 0:
        logs[1:] = log_h0 + np.cumsum(np.log(ratios[:-1]), axis=0)
    return logs


def spherical_hankel1(l, z, scaled=False):
    """Spherical Hankel function ``h_l^{(1)}(z) = j_l(z) + i y_l(z)``.

    ``scaled=True`` returns ``h_l(z) * exp(-iz)``, which stays finite for
    large imaginary arguments.
    """
    l = int(l)
    if l < 0:
        raise InvalidArgumentError(f"Order must be non-negative, got {l}")
    z = complex(z)
    if z == 0:
        raise InvalidArgumentError("Spherical Hankel functions are singular at z = 0")
    log_h = spherical_h1_log(l, z)[l]
    if scaled:
        log_h = log_h - 1j * z
    with np.errstate(over='ignore'):
        return complex(np.exp(log_h))


def spherical_bessel_y(l, z):
    """Spherical Bessel function of the second kind, ``(h_l - j_l) / i``."""
    return (spherical_hankel1(l, z) - spherical_bessel_j(l, z)) / 1j


def regular_boundary_pairs(l, z):
    """Value/derivative pairs ``(j_l(z), z j_l'(z))`` up to a per-point factor.

    Only the ratio matters for mode matching; pairs are normalised to unit
    maximum modulus. ``z = 0`` gives the limit ``(1, l)``.
    """
    z = np.asarray(z, dtype=complex)
    rho = spherical_j_ratios(l, z)[l]
    # z j_l' = l j_l - z j_{l+1}
    value = np.ones_like(z)
    slope = l - z * rho
    return _normalise_pairs(value, slope)


def outgoing_log_derivative(l, z):
    """``z h_l'(z) / h_l(z)`` for the outgoing spherical Hankel function."""
    z = np.asarray(z, dtype=complex)
    ratio = spherical_h1_ratios(l, z)[l]
    return l - z * ratio


def _normalise_pairs(value, slope):
    with np.errstate(invalid='ignore'):
        scale = np.maximum(np.abs(value), np.abs(slope))
        singular = ~np.isfinite(slope)
        value = np.where(singular, 0.0, value / scale)
        slope = np.where(singular, 1.0, slope / scale)
    return value, slope


# -- Legendre polynomials -----------------------------------------------------

def legendre_p_all(l_max, x):
    """``P_l(x)`` for ``0 <= l <= l_max``, shape ``(l_max + 1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise InvalidArgumentError("Legendre argument must satisfy |x| <= 1")
    table = np.empty((int(l_max) + 1,) + x.shape)
    table[0] = 1.0
    if l_max >= 1:
        table[1] = x
    for l in range(1, int(l_max)):
        table[l + 1] = ((2 * l + 1) * x * table[l] - l * table[l - 1]) / (l + 1)
    return table


def legendre_p(l, x):
    """Legendre polynomial ``P_l(x)`` by the three-term recurrence."""
    if int(l) < 0:
        raise InvalidArgumentError(f"Degree must be non-negative, got {l}")
    value = legendre_p_all(int(l), x)[int(l)]
    return float(value) if np.ndim(value) == 0 else value


# -- quadrature ---------------------------------------------------------------

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:7], _XGK[7:], _XGK[6::-1]])
_KRONROD = np.concatenate([_WGK[:7], _WGK[7:], _WGK[6::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5]] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[[9, 11, 13]] = _WG[2::-1]


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    values = np.asarray(f(centre + half * _NODES))
    kronrod = half * np.tensordot(_KRONROD, values, axes=(0, 0))
    gauss = half * np.tensordot(_GAUSS, values, axes=(0, 0))
    error = float(np.max(np.abs(kronrod - gauss)))
    return kronrod, error


def integrate_adaptive(f, a, b, cfg=None, breakpoints=()):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Args:
        f: vectorised integrand; ``f(x)`` for a 1-D array ``x`` returns an array
            whose first axis matches ``x`` (extra axes are integrated too).
        a, b: integration limits, ``a <= b``.
        cfg: QuadratureConfig with the tolerances and the depth limit.
        breakpoints: points inside (a, b) where f jumps; intervals are split
            there up front. Jumps are never detected automatically.

    Returns:
        QuadratureResult with the estimate, its error bound and interval count.

    Raises:
        NumericError: an interval at ``max_depth`` still misses its error budget.
    """
    cfg = cfg or QuadratureConfig()
    a, b = float(a), float(b)
    if b < a:
        raise InvalidArgumentError(f"Integration limits must satisfy a <= b, got [{a}, {b}]")
    if b == a:
        return QuadratureResult(0.0, 0.0, 0)

    edges = [a] + sorted(p for p in set(float(p) for p in breakpoints) if a < p < b) + [b]
    heap = []
    total = 0
    total_error = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, error = _gk15(f, lo, hi)
        total = total + value
        total_error += error
        heapq.heappush(heap, (-error, lo, hi, 0, value))

    while True:
        target = max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(total))))
        if total_error <= target:
            break
        neg_error, lo, hi, depth, value = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            raise NumericError(
                f"Adaptive quadrature reached depth {cfg.max_depth} on [{lo:.6g}, {hi:.6g}] "
                f"with error {total_error:.3e} > {target:.3e}",
                estimate=total,
                error=total_error,
            )
        mid = 0.5 * (lo + hi)
        left, left_error = _gk15(f, lo, mid)
        right, right_error = _gk15(f, mid, hi)
        total = total - value + left + right
        total_error += left_error + right_error + neg_error
        heapq.heappush(heap, (-left_error, lo, mid, depth + 1, left))
        heapq.heappush(heap, (-right_error, mid, hi, depth + 1, right))

    return QuadratureResult(total, total_error, len(heap))


def periodic_average(f, T, t_nodes):
    """Equal-weight trapezoid average of a T-periodic ``f`` over one period.

    Exact for trigonometric polynomials of degree below ``t_nodes``.
    ``f`` receives the node array and returns values with nodes on axis 0.
    """
    t_nodes = int(t_nodes)
    if t_nodes < 1:
        raise InvalidArgumentError("t_nodes must be positive")
    t = np.arange(t_nodes) * (float(T) / t_nodes)
    values = np.asarray(f(t))
    return values.mean(axis=0)


def converged_periodic_average(f, T, t_nodes, tol, max_nodes=1 << 15):
    """Periodic average with the node count doubled until it stops changing.

    Returns ``(average, nodes_used)``.
    """
    t_nodes = int(t_nodes)
    previous = periodic_average(f, T, t_nodes)
    while True:
        t_nodes *= 2
        current = periodic_average(f, T, t_nodes)
        change = float(np.max(np.abs(current - previous)))
        scale = float(np.max(np.abs(current))) if np.size(current) else 0.0
        if change <= max(tol, tol * scale):
            return current, t_nodes
        if t_nodes >= max_nodes:
            raise NumericError(
                f"Period average did not settle with {t_nodes} nodes (change {change:.3e})",
                estimate=current,
                error=change,
            )
        logger.debug("Doubling period-average nodes to %d (change %.3e)", t_nodes * 2, change)
        previous = current
