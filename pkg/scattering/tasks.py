"""
Computations behind the management commands, including parallel sweep rows.

Sweep rows are independent and run in a process pool. Workers get plain
picklable inputs (RunConfig, QuadratureConfig, FloquetBasisConfig) so they
never touch Django settings; the parent collects rows and hands them to a
single ResultWriter in axis order.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional

from .eikonal import amplitude_table
from .exact import converge_floquet, sigma_total_exact
from .exceptions import InvalidArgumentError, ScatteringError
from .potentials import ea_validity
from .xsec import relative_difference, sigma_total_ea

logger = logging.getLogger(__name__)


@dataclass
class SigmaRecord:
    method: str
    sigma_tot: float
    l_max: Optional[int] = None
    n_max: Optional[int] = None
    residual: Optional[float] = None
    warning: str = ''


def compute_sigma(config, quadrature, basis):
    """sigma_tot of one configuration with every requested method."""
    well, kin = config.well(), config.kinematics()
    records = []
    if config.method in ('ea', 'both'):
        result = sigma_total_ea(well, kin, cfg=quadrature)
        warning = ';'.join(result.warnings)
        if not ea_validity(well, kin).recommended:
            warning = ';'.join(filter(None, (warning, 'ea-outside-validity')))
        records.append(SigmaRecord(method='EA', sigma_tot=result.sigma_tot, warning=warning))
    if config.method in ('exact', 'both'):
        result = sigma_total_exact(well, kin, cfg=basis)
        records.append(SigmaRecord(
            method='exact',
            sigma_tot=result.sigma_tot,
            l_max=result.convergence['l_max'],
            n_max=result.convergence['n_max'],
            residual=result.convergence['residual'],
            warning=';'.join(result.warnings),
        ))
    return records


@dataclass
class SweepRow:
    param: str
    value: float
    sigma_ea: Optional[float] = None
    sigma_exact: Optional[float] = None
    rel_diff: Optional[float] = None
    ea_valid_flag: Optional[int] = None
    error: str = ''
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def failed(self):
        return bool(self.error)

    def as_tuple(self):
        return (self.param, self.value, self.sigma_ea, self.sigma_exact, self.rel_diff, self.ea_valid_flag)


def compute_sweep_row(config, axis, value, quadrature, basis):
    """One sweep point. Failures come back as NaN sentinels, never as exceptions."""
    row = SweepRow(param=axis, value=float(value))
    try:
        point = config.with_value(axis, value)
        well, kin = point.well(), point.kinematics()
        row.ea_valid_flag = int(ea_validity(well, kin).recommended)
        for record in compute_sigma(point, quadrature, basis):
            if record.method == 'EA':
                row.sigma_ea = record.sigma_tot
            else:
                row.sigma_exact = record.sigma_tot
                row.metadata = {'l_max': record.l_max, 'n_max': record.n_max, 'residual': record.residual}
        if row.sigma_ea is not None and row.sigma_exact is not None:
            row.rel_diff = relative_difference(row.sigma_ea, row.sigma_exact)
    except ScatteringError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        if config.method in ('ea', 'both') and row.sigma_ea is None:
            row.sigma_ea = math.nan
        if config.method in ('exact', 'both') and row.sigma_exact is None:
            row.sigma_exact = math.nan
        if config.method == 'both':
            row.rel_diff = math.nan
    return row


def run_sweep(config, quadrature, basis, workers=1):
    """All sweep rows in ascending axis order."""
    values = config.sweep_values()
    # invalid points are input errors, not row failures
    for value in values:
        point = config.with_value(config.sweep, value)
        point.well(), point.kinematics()

    args = [(config, config.sweep, value, quadrature, basis) for value in values]
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(values))) as pool:
            rows = list(pool.map(compute_sweep_row, *zip(*args)))
    else:
        rows = [compute_sweep_row(*arg) for arg in args]

    for row in rows:
        if row.failed:
            logger.warning("Sweep row %s=%g failed: %s", row.param, row.value, row.error)
    return rows


def compute_amplitudes(config, quadrature, basis):
    """Rows (n, theta, method, f) for every requested method on the config's theta grid."""
    well, kin = config.well(), config.kinematics()
    ch = kin.channel(config.n)
    if not ch.is_open:
        raise InvalidArgumentError(f"Channel n={config.n} is closed (E_n = {ch.E_n:.6g} < 0)")
    thetas = config.thetas()
    rows = []
    if config.method in ('ea', 'both'):
        method = 'general' if config.n != 0 else config.ea_method
        table = amplitude_table(well, kin, thetas, n=config.n, method=method, cfg=quadrature, force=config.force)
        rows.extend((n, theta, 'EA', value) for n, theta, _, value in table.rows())
    if config.method in ('exact', 'both'):
        solution = converge_floquet(well, kin, basis)
        rows.extend((config.n, theta, 'exact', complex(solution.amplitude(config.n, theta)))
                    for theta in thetas)
    return rows
