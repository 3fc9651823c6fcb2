"""
Tolerance profiles (strict, default, fast) from Django settings.
"""
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from .specfun import QuadratureConfig


def profile_names():
    return tuple(settings.TOLERANCE_PROFILES)


def active_profile(name=None):
    """Settings of profile ``name``; the FLOQUETEA_TOLERANCE_PROFILE one when omitted."""
    name = name or settings.TOLERANCE_PROFILE
    try:
        return name, settings.TOLERANCE_PROFILES[name]
    except KeyError:
        raise ImproperlyConfigured(
            f"Unknown tolerance profile {name!r}; expected one of {', '.join(profile_names())}"
        ) from None


def quadrature_config(name=None, abs_tol=None, rel_tol=None, t_nodes=None):
    _, profile = active_profile(name)
    return QuadratureConfig(
        abs_tol=abs_tol if abs_tol is not None else profile['abs_tol'],
        rel_tol=rel_tol if rel_tol is not None else profile['rel_tol'],
        max_depth=profile['max_depth'],
        t_nodes=t_nodes if t_nodes is not None else profile['t_nodes'],
    )


def exact_tolerance(name=None):
    _, profile = active_profile(name)
    return profile['exact_tol']


def basis_config(name=None, n_max=None, l_max=None, tol=None, workers=1):
    from .exact import FloquetBasisConfig

    return FloquetBasisConfig(
        n_max=n_max,
        l_max=l_max,
        tol=tol if tol is not None else exact_tolerance(name),
        workers=workers,
    )
