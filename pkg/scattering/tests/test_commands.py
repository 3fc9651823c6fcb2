import io
import tempfile
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from scattering.exceptions import NumericError
from scattering.output import TIMESTAMP_PREFIX, read_table
from scattering.xsec import CrossSectionResult, relative_difference


def run(name, **options):
    out, err = io.StringIO(), io.StringIO()
    call_command(name, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


def data_lines(text):
    return [line for line in text.splitlines() if line and not line.startswith('#')]


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)

    def assertExitCode(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            run(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class SigmaCommandTests(CommandTestCase):

    def test_eikonal_point(self):
        out, _ = run('sigma', U0=100.0, U1=0.0, omega=10.0, k=37.0, method='ea')
        header, row = data_lines(out)
        self.assertEqual(header, 'method,U0,U1,omega,k,sigma_tot,l_max,n_max,residual,warning')
        fields = row.split(',')
        self.assertEqual(fields[:5], ['EA', '100.0', '0.0', '10.0', '37.0'])
        self.assertGreater(float(fields[5]), 0.0)

    def test_output_file_and_summary(self):
        path = self.tmp / 'sigma.csv'
        out, err = run('sigma', U0=10.0, U1=5.0, omega=10.0, k=37.0, method='ea', output=str(path))
        self.assertEqual(out, '')
        self.assertIn('EA: sigma_tot = ', err)
        metadata, rows = read_table(path)
        self.assertEqual(metadata['config.U1'], '5.0')
        self.assertEqual(metadata['profile.name'], 'default')
        self.assertEqual(rows[0]['method'], 'EA')

    def test_outside_validity_is_flagged(self):
        out, _ = run('sigma', U0=100.0, U1=0.0, omega=10.0, k=10.0, method='ea')
        self.assertIn('ea-outside-validity', data_lines(out)[1])

    def test_deterministic_apart_from_timestamp(self):
        options = dict(U0=20.0, U1=10.0, omega=1.0, k=37.0, method='ea')
        first, _ = run('sigma', **options)
        second, _ = run('sigma', **options)
        strip = [[line for line in text.splitlines() if not line.startswith(TIMESTAMP_PREFIX)]
                 for text in (first, second)]
        self.assertEqual(strip[0], strip[1])

    def test_free_potential_both_methods(self):
        out, _ = run('sigma', U0=0.0, U1=0.0, omega=1.0, k=37.0, method='both')
        sigma = [float(row.split(',')[5]) for row in data_lines(out)[1:]]
        self.assertEqual(sigma, [0.0, 0.0])

    def test_json_output(self):
        out, _ = run('sigma', U0=0.0, U1=0.0, omega=1.0, k=37.0, method='ea', format='json')
        self.assertIn('"sigma_tot": 0.0', out)

    @tag('slow')
    def test_methods_agree_on_driven_empty_well(self):
        out, _ = run('sigma', U0=100.0, U1=0.0, omega=10.0, k=37.0, method='both')
        sigma = {row.split(',')[0]: float(row.split(',')[5]) for row in data_lines(out)[1:]}
        self.assertLess(relative_difference(sigma['EA'], sigma['exact']), 0.05)

    def test_malformed_config(self):
        config = self.tmp / 'bad.cfg'
        config.write_text('U0 = 100\nomega ten\n', encoding='utf-8')
        output = self.tmp / 'never.csv'
        error = self.assertExitCode(2, 'sigma', config=str(config), output=str(output))
        self.assertIn('bad.cfg:2', str(error))
        self.assertFalse(output.exists())

    def test_unknown_profile_in_config(self):
        config = self.tmp / 'run.cfg'
        config.write_text('profile = sloppy\n', encoding='utf-8')
        self.assertExitCode(2, 'sigma', config=str(config), method='ea')

    def test_non_positive_frequency(self):
        self.assertExitCode(2, 'sigma', omega=0.0, method='ea')

    def test_numeric_failure(self):
        failure = NumericError('singular matching matrix', condition=1e14)
        with mock.patch('scattering.tasks.sigma_total_exact', side_effect=failure):
            error = self.assertExitCode(3, 'sigma', U0=1.0, omega=10.0, method='exact')
        self.assertIn('condition', str(error))

    def test_condition_reported_once(self):
        failure = NumericError('Singular matching matrix for l=0, n_max=44 (condition 3.215e+14)',
                               condition=3.215e14)
        with mock.patch('scattering.tasks.sigma_total_exact', side_effect=failure):
            error = self.assertExitCode(3, 'sigma', U0=1.0, omega=10.0, method='exact')
        self.assertEqual(str(error).count('condition'), 1)


class AmplitudeCommandTests(CommandTestCase):

    def test_elastic_grid(self):
        out, _ = run('amplitude', U0=10.0, U1=0.0, omega=10.0, k=37.0, method='ea',
                     theta_max=0.02, theta_steps=3)
        rows = data_lines(out)
        self.assertEqual(rows[0], 'n,theta,method,re_f,im_f')
        self.assertEqual([row.split(',')[1] for row in rows[1:]], ['0.0', '0.01', '0.02'])

    def test_free_potential_is_all_zero(self):
        out, _ = run('amplitude', U0=0.0, U1=0.0, omega=1.0, k=37.0, method='both', theta_steps=3)
        rows = data_lines(out)[1:]
        self.assertEqual(len(rows), 6)
        for row in rows:
            re_f, im_f = (float(value) for value in row.split(',')[3:])
            self.assertEqual((re_f, im_f), (0.0, 0.0))

    def test_static_well_methods_agree_row_by_row(self):
        out, _ = run('amplitude', U0=0.0, U1=10.0, omega=1.0, k=37.0, method='both',
                     theta_max=0.05, theta_steps=3)
        amplitudes = {}
        for row in data_lines(out)[1:]:
            n, theta, method, re_f, im_f = row.split(',')
            amplitudes.setdefault((n, theta), {})[method] = complex(float(re_f), float(im_f))
        self.assertEqual(len(amplitudes), 3)
        for key, pair in amplitudes.items():
            with self.subTest(theta=key[1]):
                self.assertLess(abs(pair['EA'] - pair['exact']), 0.02 * abs(pair['exact']))

    def test_closed_channel(self):
        self.assertExitCode(2, 'amplitude', U0=1.0, U1=1.0, omega=3.0, k=1.0, n=-1, method='ea')

    def test_angle_guard(self):
        self.assertExitCode(2, 'amplitude', U0=10.0, omega=10.0, k=37.0, method='ea',
                            theta_max=0.3, theta_steps=2)

    def test_force_lifts_angle_guard(self):
        out, _ = run('amplitude', U0=10.0, omega=10.0, k=37.0, method='ea',
                     theta_min=0.3, theta_max=0.3, theta_steps=1, force=True)
        self.assertEqual(len(data_lines(out)), 2)

    def test_exact_sidebands(self):
        out, _ = run('amplitude', U0=10.0, U1=5.0, omega=10.0, k=10.5, method='exact', n=1,
                     theta_max=0.5, theta_steps=2)
        rows = data_lines(out)[1:]
        self.assertEqual(len(rows), 2)
        self.assertTrue(all(row.startswith('1,') and ',exact,' in row for row in rows))


class SweepCommandTests(CommandTestCase):

    def sweep(self, **options):
        defaults = dict(U1=0.0, omega=10.0, k=37.0, sweep='U0', start=0.0, stop=20.0, steps=3, workers=1)
        defaults.update(options)
        return run('sweep', **defaults)

    def test_eikonal_sweep(self):
        out, _ = self.sweep(method='ea')
        rows = data_lines(out)
        self.assertEqual(rows[0], 'param,value,sigma_ea,sigma_exact,rel_diff,ea_valid_flag')
        self.assertEqual([row.split(',')[1] for row in rows[1:]], ['0.0', '10.0', '20.0'])
        self.assertEqual(rows[1], 'U0,0.0,0.0,,,1')

    def test_zero_range(self):
        self.assertExitCode(2, 'sweep', sweep='U0', start=5.0, stop=5.0, steps=3, workers=1)

    def test_invalid_point_rejected_up_front(self):
        self.assertExitCode(2, 'sweep', sweep='k', start=-1.0, stop=1.0, steps=3, workers=1, method='ea')

    def test_partial_failure(self):
        def exact(well, kin, cfg=None):
            if well.U0 == 10.0:
                raise NumericError('singular matching matrix', condition=1e14)
            return CrossSectionResult(sigma_tot=1.0, method='exact',
                                      convergence={'l_max': 40, 'n_max': 12, 'residual': 0.0})

        path = self.tmp / 'sweep.csv'
        with mock.patch('scattering.tasks.sigma_total_exact', side_effect=exact):
            error = self.assertExitCode(4, 'sweep', U1=0.0, omega=10.0, k=37.0, sweep='U0', start=0.0,
                                        stop=20.0, steps=3, workers=1, method='both', output=str(path))
        self.assertIn('1 of 3', str(error))
        metadata, rows = read_table(path)
        self.assertEqual([row['sigma_exact'] for row in rows], ['1.0', 'NaN', '1.0'])
        self.assertEqual(rows[1]['rel_diff'], 'NaN')
        self.assertIn('NumericError', metadata['solver.row1.error'])
        self.assertEqual(metadata['solver.row0.l_max'], '40')

    def test_gnuplot_script(self):
        path = self.tmp / 'sweep.csv'
        script = self.tmp / 'sweep.gp'
        _, err = self.sweep(method='ea', output=str(path), gnuplot=str(script))
        self.assertIn('3 points over U0 (0 failed)', err)
        text = script.read_text(encoding='utf-8')
        self.assertIn(f"plot '{path}' using 2:3", text)

    def test_preset(self):
        out, _ = run('sweep', preset='drive-u0', method='ea', steps=2, workers=1)
        values = [row.split(',')[1] for row in data_lines(out)[1:]]
        self.assertEqual(values, ['0.0', '100.0'])

    def test_tied_preset_records_depth_rule(self):
        path = self.tmp / 'tied.csv'
        run('sweep', preset='tied-u0', method='ea', steps=2, workers=1, output=str(path))
        metadata, _ = read_table(path)
        self.assertEqual(metadata['config.U1'], 'U1_over_U0 * U0')
        self.assertEqual(metadata['config.U1_over_U0'], '10.0')


class ValidateCommandTests(CommandTestCase):

    def test_single_check_passes(self):
        out, _ = run('validate', checks=['transport-order'])
        self.assertIn('PASS transport-order', out)
        self.assertIn('All 1 checks passed', out)

    def test_tight_tolerance_fails(self):
        self.assertExitCode(5, 'validate', checks=['born-limit'], tolerance=1e-15)

    @tag('slow')
    def test_quick_suite(self):
        out, _ = run('validate', quick=True)
        self.assertIn('checks passed', out)
