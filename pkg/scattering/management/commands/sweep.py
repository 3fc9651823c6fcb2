from django.conf import settings
from django.core.management.base import CommandError

from scattering.management.base import EXIT_PARTIAL, ScatteringCommand
from scattering.output import SWEEP_COLUMNS, ResultWriter
from scattering.runconfig import SWEEP_AXES
from scattering.tasks import run_sweep
from scripts.sweep_summary import summarise, write_gnuplot_script


class Command(ScatteringCommand):
    help = 'Sweep sigma_tot over U0, U1, k or omega and tabulate EA against exact'
    config_fields = ('sweep', 'start', 'stop', 'steps')

    def add_command_arguments(self, parser):
        parser.add_argument('--sweep', choices=SWEEP_AXES, help='Axis to sweep')
        parser.add_argument('--start', type=float, help='First axis value')
        parser.add_argument('--stop', type=float, help='Last axis value')
        parser.add_argument('--steps', type=int, help='Number of points (>= 2)')
        parser.add_argument('--gnuplot', metavar='SCRIPT',
                            help='Also write a gnuplot script plotting the output CSV')

    def run(self, config, quadrature, basis, options):
        workers = config.workers or settings.SWEEP_WORKERS
        rows = run_sweep(config, quadrature, basis, workers=workers)

        solver = {}
        for index, row in enumerate(rows):
            for key, value in row.metadata.items():
                solver[f'row{index}.{key}'] = value
            if row.failed:
                solver[f'row{index}.error'] = row.error
        metadata = self.metadata(config, quadrature, basis, solver=solver)

        with ResultWriter(SWEEP_COLUMNS, metadata, path=config.output, stream=self.stdout,
                          fmt=config.format) as writer:
            for row in rows:
                writer.write_row(row.as_tuple())

        if options.get('gnuplot'):
            if not config.output or config.format != 'csv':
                self.stderr.write('--gnuplot needs a CSV --output file; script not written')
            else:
                write_gnuplot_script(config.output, options['gnuplot'], title=config.preset or config.sweep)

        summary = summarise([row.as_tuple() for row in rows])
        if config.output:
            self.stderr.write(summary.text())

        failed = [row for row in rows if row.failed]
        if failed:
            values = ', '.join(f'{row.value:g}' for row in failed)
            raise CommandError(
                f"{len(failed)} of {len(rows)} sweep rows failed ({config.sweep} = {values})",
                returncode=EXIT_PARTIAL,
            )
