"""
Shared plumbing of the scattering management commands.

Every command accepts a config file, a preset and per-field overrides, and
maps library errors to exit codes:

    0 success, 2 invalid input, 3 numeric failure, 4 partial sweep failure,
    5 validation failure.
"""
import logging

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from scattering import profiles
from scattering.exceptions import InvalidArgumentError, NumericError
from scattering.kinematics import UNIT_PRESETS
from scattering.runconfig import METHODS, PRESETS, load_run_config

logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4
EXIT_VALIDATION = 5

# option dest -> RunConfig field
COMMON_FIELDS = (
    'U0', 'U1', 'U1_over_U0', 'omega', 'r0', 'k', 'units', 'method', 'profile',
    'n_max', 'l_max', 'tol', 'abs_tol', 'rel_tol', 't_nodes', 'output', 'format', 'workers',
)


class ScatteringCommand(BaseCommand):
    requires_system_checks = []
    # extra RunConfig fields a subclass exposes as options
    config_fields = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Flat key = value run configuration file (UTF-8)')
        parser.add_argument('--preset', choices=sorted(PRESETS), help='Parameter set to start from')

        well = parser.add_argument_group('potential')
        well.add_argument('--U0', type=float, help='Shaking amplitude U0')
        well.add_argument('--U1', type=float, help='Static depth U1')
        well.add_argument('--U1-over-U0', dest='U1_over_U0', type=float, help='Tie U1 to U0 by this ratio')
        well.add_argument('--omega', type=float, help='Drive angular frequency')
        well.add_argument('--r0', type=float, help='Well radius')

        beam = parser.add_argument_group('kinematics')
        beam.add_argument('--k', type=float, help='Incident wavenumber')
        beam.add_argument('--units', choices=sorted(UNIT_PRESETS), help='Unit preset')

        numerics = parser.add_argument_group('numerics')
        numerics.add_argument('--method', choices=METHODS, help='ea, exact or both')
        numerics.add_argument('--profile', choices=sorted(settings.TOLERANCE_PROFILES),
                              help='Tolerance profile (default: FLOQUETEA_TOLERANCE_PROFILE)')
        numerics.add_argument('--n-max', dest='n_max', type=int, help='Sideband truncation')
        numerics.add_argument('--l-max', dest='l_max', type=int, help='Partial-wave truncation')
        numerics.add_argument('--tol', type=float, help='Exact-solver convergence tolerance')
        numerics.add_argument('--abs-tol', dest='abs_tol', type=float, help='Quadrature absolute tolerance')
        numerics.add_argument('--rel-tol', dest='rel_tol', type=float, help='Quadrature relative tolerance')
        numerics.add_argument('--t-nodes', dest='t_nodes', type=int, help='Initial period-average nodes')

        out = parser.add_argument_group('output')
        out.add_argument('--output', help='Output file (default: standard output)')
        out.add_argument('--format', choices=('csv', 'json'), help='Output format')
        out.add_argument('--workers', type=int, help='Parallel workers')

        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
            quadrature = profiles.quadrature_config(
                config.profile, abs_tol=config.abs_tol, rel_tol=config.rel_tol, t_nodes=config.t_nodes)
            basis = profiles.basis_config(config.profile, n_max=config.n_max, l_max=config.l_max, tol=config.tol)
            self.run(config, quadrature, basis, options)
        except (InvalidArgumentError, ImproperlyConfigured) as exc:
            raise CommandError(f"Invalid input: {exc}", returncode=EXIT_INVALID) from exc
        except NumericError as exc:
            detail = ''
            if exc.estimate is not None:
                detail = f" (last estimate {exc.estimate!r}, error {exc.error!r})"
            elif exc.condition is not None and 'condition' not in str(exc):
                detail = f" (condition {exc.condition:.3e})"
            raise CommandError(f"Numerical failure: {exc}{detail}", returncode=EXIT_NUMERIC) from exc

    def load_config(self, options):
        overrides = {name: options.get(name) for name in COMMON_FIELDS + tuple(self.config_fields)}
        return load_run_config(options.get('config'), preset=options.get('preset'), overrides=overrides)

    def metadata(self, config, quadrature, basis, **extra):
        name, _ = profiles.active_profile(config.profile)
        sections = {
            'config': config.as_dict(),
            'profile': {
                'name': name,
                'abs_tol': quadrature.abs_tol,
                'rel_tol': quadrature.rel_tol,
                'max_depth': quadrature.max_depth,
                't_nodes': quadrature.t_nodes,
                'exact_tol': basis.tol,
            },
        }
        sections.update(extra)
        return sections

    def run(self, config, quadrature, basis, options):
        raise NotImplementedError
