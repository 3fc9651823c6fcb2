from scattering.management.base import ScatteringCommand
from scattering.output import AMPLITUDE_COLUMNS, ResultWriter
from scattering.runconfig import EA_METHODS
from scattering.tasks import compute_amplitudes


class Command(ScatteringCommand):
    help = 'Scattering amplitudes f_n(theta) on a polar-angle grid'
    config_fields = ('n', 'theta_min', 'theta_max', 'theta_steps', 'ea_method', 'force')

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, help='Outgoing channel (sideband) index')
        parser.add_argument('--theta-min', dest='theta_min', type=float, help='First polar angle (rad)')
        parser.add_argument('--theta-max', dest='theta_max', type=float, help='Last polar angle (rad)')
        parser.add_argument('--theta-steps', dest='theta_steps', type=int, help='Number of angles')
        parser.add_argument('--ea-method', dest='ea_method', choices=EA_METHODS,
                            help='Eikonal form for the elastic channel')
        parser.add_argument('--force', action='store_true', default=None,
                            help='Evaluate eikonal small-angle forms beyond the angle guard')

    def run(self, config, quadrature, basis, options):
        rows = compute_amplitudes(config, quadrature, basis)
        metadata = self.metadata(config, quadrature, basis)
        with ResultWriter(AMPLITUDE_COLUMNS, metadata, path=config.output, stream=self.stdout,
                          fmt=config.format) as writer:
            for n, theta, method, value in rows:
                writer.write_row((n, theta, method, value.real, value.imag))
