"""
Per-run configuration.

A run is described by a flat UTF-8 file of ``key = value`` lines (``#``
starts a comment) whose keys are exactly the RunConfig field names, e.g.::

    # driven empty well
    U0 = 100
    U1 = 0
    omega = 10
    k = 37
    method = both

Command-line flags override file values, and a preset (``preset = drive-u0``)
supplies defaults underneath both.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import InvalidArgumentError
from .kinematics import make_kinematics, unit_preset
from .potentials import ShakingSquareWell

logger = logging.getLogger(__name__)

METHODS = ('ea', 'exact', 'both')
SWEEP_AXES = ('U0', 'U1', 'k', 'omega')
EA_METHODS = ('closed-form', 'axisym', 'small-angle', 'general')
FORMATS = ('csv', 'json')


@dataclass
class RunConfig:
    # potential
    U0: float = 0.0
    U1: float = 0.0
    U1_over_U0: Optional[float] = None
    omega: float = 1.0
    r0: float = 1.0
    # kinematics
    k: float = 37.0
    units: str = 'hbar=2m=1'
    # methods
    method: str = 'both'
    ea_method: str = 'closed-form'
    flux_mode: str = 'as-printed'
    force: bool = False
    # truncation / tolerance overrides (None = profile default)
    profile: Optional[str] = None
    n_max: Optional[int] = None
    l_max: Optional[int] = None
    tol: Optional[float] = None
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None
    t_nodes: Optional[int] = None
    # sweep
    sweep: Optional[str] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    steps: int = 11
    # amplitude grid
    n: int = 0
    theta_min: float = 0.0
    theta_max: float = 0.05
    theta_steps: int = 6
    # output
    output: Optional[str] = None
    format: str = 'csv'
    workers: Optional[int] = None
    preset: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.method not in METHODS:
            raise InvalidArgumentError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.ea_method not in EA_METHODS:
            raise InvalidArgumentError(f"ea_method must be one of {', '.join(EA_METHODS)}, got {self.ea_method!r}")
        if self.format not in FORMATS:
            raise InvalidArgumentError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if self.flux_mode not in ('as-printed', 'flux-weighted'):
            raise InvalidArgumentError(f"Unknown flux_mode {self.flux_mode!r}")
        if self.sweep is not None and self.sweep not in SWEEP_AXES:
            raise InvalidArgumentError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}, got {self.sweep!r}")
        for name in ('omega', 'r0', 'k'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be positive, got {value!r}")
        for name in ('U0', 'U1'):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if self.theta_steps < 1 or self.theta_min < 0 or self.theta_max < self.theta_min:
            raise InvalidArgumentError("theta grid needs 0 <= theta_min <= theta_max and theta_steps >= 1")
        unit_preset(self.units)

    # -- derived objects ------------------------------------------------------

    def resolved_U1(self, U0=None):
        U0 = self.U0 if U0 is None else U0
        if self.U1_over_U0 is not None:
            return self.U1_over_U0 * U0
        return self.U1

    def with_value(self, axis, value):
        """Copy with the sweep axis set to ``value`` (U1 tied to U0 keeps its ratio)."""
        changes = {axis: float(value)}
        if axis == 'U1':
            changes['U1_over_U0'] = None
        return dataclasses.replace(self, **changes)

    def well(self):
        return ShakingSquareWell(self.U0, self.resolved_U1(), self.omega, self.r0)

    def kinematics(self):
        return make_kinematics(self.k, self.omega, unit_preset(self.units))

    def thetas(self):
        return tuple(float(theta) for theta in np.linspace(self.theta_min, self.theta_max, self.theta_steps))

    def sweep_values(self):
        if self.sweep is None:
            raise InvalidArgumentError("No sweep axis configured (set sweep = U0|U1|k|omega)")
        if self.start is None or self.stop is None:
            raise InvalidArgumentError("A sweep needs both start and stop")
        if self.steps < 2:
            raise InvalidArgumentError(f"A sweep needs at least 2 steps, got {self.steps}")
        if not (self.stop > self.start):
            raise InvalidArgumentError(f"Empty sweep range [{self.start:g}, {self.stop:g}]")
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]

    def as_dict(self):
        """Field values with U1 as actually used when it is tied to U0."""
        values = dataclasses.asdict(self)
        if self.U1_over_U0 is not None:
            values['U1'] = TIED_U1 if self.sweep == 'U0' else self.resolved_U1()
        return values


# U1 entry of the recorded config when a U0 sweep carries a tied depth
TIED_U1 = 'U1_over_U0 * U0'

PRESETS = {
    'drive-u0': {'U1': 0.0, 'k': 37.0, 'omega': 10.0, 'method': 'both',
              'sweep': 'U0', 'start': 0.0, 'stop': 100.0, 'steps': 11},
    'tied-u0': {'U1_over_U0': 10.0, 'k': 37.0, 'omega': 1.0, 'method': 'both',
              'sweep': 'U0', 'start': 0.0, 'stop': 20.0, 'steps': 11},
    'k-scan': {'U0': 10.0, 'U1': 10.0, 'omega': 1.0, 'method': 'both',
              'sweep': 'k', 'start': 10.0, 'stop': 60.0, 'steps': 11},
    'k-scan-strong': {'U0': 100.0, 'U1': 0.0, 'omega': 3.0, 'method': 'both',
                     'sweep': 'k', 'start': 10.0, 'stop': 60.0, 'steps': 11},
}


_FIELDS = {f.name: f for f in fields(RunConfig)}
_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def _convert(name, raw):
    field = _FIELDS[name]
    kind = field.type if isinstance(field.type, str) else str(field.type)
    text = raw.strip()
    optional = kind.startswith('Optional')
    if optional and text.lower() in ('', 'none', 'null'):
        return None
    try:
        if 'bool' in kind:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if 'int' in kind:
            return int(text)
        if 'float' in kind:
            return float(text)
    except ValueError:
        raise InvalidArgumentError(f"Config key {name!r}: cannot read {text!r} as {kind}") from None
    return text


def parse_config_text(text, source='<config>'):
    """Flat ``key = value`` text -> dict of typed values."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise InvalidArgumentError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split('=', 1))
        if key not in _FIELDS:
            raise InvalidArgumentError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise InvalidArgumentError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw)
    return values


def read_config_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidArgumentError(f"Cannot read config file {path}: {exc}") from None
    return parse_config_text(text, source=str(path))


def load_run_config(path=None, preset=None, overrides=None):
    """Preset < file < overrides; ``None`` overrides are ignored."""
    file_values = read_config_file(path) if path else {}
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    unknown = set(overrides) - set(_FIELDS)
    if unknown:
        raise InvalidArgumentError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

    preset = overrides.get('preset') or file_values.get('preset') or preset
    values = {}
    if preset is not None:
        try:
            values.update(PRESETS[preset])
        except KeyError:
            raise InvalidArgumentError(
                f"Unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}") from None
        values['preset'] = preset
    values.update(file_values)
    values.update(overrides)
    config = RunConfig(**values)
    logger.debug("Resolved run configuration: %s", config)
    return config
