"""
Management command: chart

Redraws the SVG charts of a sweep from its CSV table:

    python manage.py chart htstab-output/quad-stability/sweep.csv
    python manage.py chart sweep.csv --out charts/

--out defaults to the directory holding the CSV.
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.core_math.errors import MalformedFile
from apps.experiments.charts import render_charts
from apps.experiments.reports import read_sweep_csv


class Command(BaseCommand):
    help = 'Render log-log SVG charts from a sweep CSV.'

    def add_arguments(self, parser):
        parser.add_argument('csv', help='Path to a sweep.csv written by `run`.')
        parser.add_argument('--out', default=None, help='Directory for the SVG files.')

    def handle(self, *args, **options):
        csv_path = Path(options['csv'])
        try:
            frame = read_sweep_csv(csv_path)
        except FileNotFoundError:
            raise CommandError(f'{csv_path}: no such file', returncode=1)
        except MalformedFile as exc:
            raise CommandError(str(exc), returncode=1)

        out_dir = Path(options['out']) if options['out'] else csv_path.parent
        try:
            written = render_charts(frame, out_dir)
        except OSError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=2)
        if not written:
            self.stdout.write(self.style.WARNING('No usable cells in the table; nothing drawn.'))
            return
        for path in written:
            self.stdout.write(f'chart: {path}')
        self.stdout.write(self.style.SUCCESS(f'Done. {len(written)} chart(s).'))
