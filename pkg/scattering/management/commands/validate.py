from django.core.management.base import CommandError

from scattering.management.base import EXIT_VALIDATION, ScatteringCommand
from scattering.validation import CHECKS, run_checks


class Command(ScatteringCommand):
    help = 'Run the built-in oracle suite and print a pass/fail report'

    def add_command_arguments(self, parser):
        parser.add_argument('--quick', action='store_true', help='Fast subset of the checks')
        parser.add_argument('--tolerance', type=float,
                            help='Use this tolerance for every check instead of its own')
        parser.add_argument('--check', action='append', dest='checks', choices=[c.name for c in CHECKS],
                            help='Run only the named check (repeatable)')

    def run(self, config, quadrature, basis, options):
        results = run_checks(quadrature, basis, quick=options['quick'], tolerance=options.get('tolerance'),
                             only=options.get('checks'))
        for result in results:
            style = self.style.SUCCESS if result.passed else self.style.ERROR
            self.stdout.write(style(result.line()) + f" [{result.seconds:.1f}s]")
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise CommandError(f"Validation failed: {', '.join(failed)}", returncode=EXIT_VALIDATION)
        self.stdout.write(f"All {len(results)} checks passed")
