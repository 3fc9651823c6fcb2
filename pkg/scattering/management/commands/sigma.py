from scattering.management.base import ScatteringCommand
from scattering.output import SIGMA_COLUMNS, ResultWriter
from scattering.tasks import compute_sigma


class Command(ScatteringCommand):
    help = 'Total cross section of one shaking-well configuration (EA, exact or both)'

    def run(self, config, quadrature, basis, options):
        records = compute_sigma(config, quadrature, basis)
        U1 = config.resolved_U1()
        metadata = self.metadata(config, quadrature, basis)
        with ResultWriter(SIGMA_COLUMNS, metadata, path=config.output, stream=self.stdout,
                          fmt=config.format) as writer:
            for record in records:
                writer.write_row((
                    record.method, config.U0, U1, config.omega, config.k, record.sigma_tot,
                    record.l_max, record.n_max, record.residual, record.warning,
                ))
        if config.output:
            for record in records:
                self.stderr.write(f"{record.method}: sigma_tot = {record.sigma_tot:.10g}")
