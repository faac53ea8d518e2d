"""
Management command: run

Runs one experiment config and writes its report files:

    python manage.py run configs/quad_stability.yaml
    python manage.py run configs/quad_stability.yaml --out /tmp/htstab --parallelism 4

Files go to <out>/<experiment name>/ (report.json, a CSV table and, for
sweeps with `charts: true`, SVG charts). --out defaults to HTSTAB_OUTPUT_DIR
and --parallelism to HTSTAB_PARALLELISM.

Exit codes: 0 when the report was written (failed cells are listed in it),
1 for an invalid config, 2 when the run itself fails or every cell failed.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from apps.core_math.errors import ConfigError, HeavyTailLabError

# Imported at module level so tests can patch
# apps.experiments.management.commands.run.run_experiment
from apps.experiments.runner import run_experiment

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run an experiment config and write its JSON report, CSV table and charts.'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path to the experiment YAML file.')
        parser.add_argument('--out', default=None, help='Output directory (default: HTSTAB_OUTPUT_DIR).')
        parser.add_argument(
            '--parallelism',
            type=int,
            default=None,
            help='Sweep cells to run at once (default: HTSTAB_PARALLELISM).',
        )

    def handle(self, *args, **options):
        try:
            result = run_experiment(options['config'], output_dir=options['out'],
                                    parallelism=options['parallelism'])
        except ConfigError as exc:
            for path, message in exc.errors:
                self.stderr.write(self.style.ERROR(f'{path}: {message}'))
            raise CommandError('invalid experiment config', returncode=1)
        except (HeavyTailLabError, OSError) as exc:
            logger.exception('run: %s failed', options['config'])
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=2)

        self.stdout.write(f'report: {result.report_path}')
        self.stdout.write(f'table:  {result.csv_path}')
        for path in result.chart_paths:
            self.stdout.write(f'chart:  {path}')

        if result.all_cells_failed:
            raise CommandError('every sweep cell failed; see the report for details', returncode=2)
        if result.failed_cells:
            self.stdout.write(self.style.WARNING(f'{result.failed_cells} cell(s) failed; see the report.'))
        if result.report['lemmas'] and not result.lemmas_passed:
            failed = [c['name'] for c in result.report['lemmas'] if not c['passed']]
            self.stdout.write(self.style.WARNING(f'failed checks: {", ".join(failed)}'))
        self.stdout.write(self.style.SUCCESS(f'Done. {result.config.name} ({result.config.kind.value})'))
