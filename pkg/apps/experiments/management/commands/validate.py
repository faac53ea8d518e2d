"""
Management command: validate

Checks an experiment config against the schema without running anything:

    python manage.py validate configs/quad_stability.yaml

Every problem is printed as `<dotted field path>: <message>`; the exit code
is 1 when there is at least one.
"""
from django.core.management.base import BaseCommand, CommandError

from apps.core_math.errors import ConfigError
from apps.experiments.config import load_config


class Command(BaseCommand):
    help = 'Validate an experiment config file and print any errors with their field paths.'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path to the experiment YAML file.')

    def handle(self, *args, **options):
        try:
            config = load_config(options['config'])
        except ConfigError as exc:
            for path, message in exc.errors:
                self.stderr.write(self.style.ERROR(f'{path}: {message}'))
            raise CommandError(f'{len(exc.errors)} problem(s) in {options["config"]}', returncode=1)

        self.stdout.write(f'name:        {config.name}')
        self.stdout.write(f'kind:        {config.kind.value}')
        self.stdout.write(f'config_hash: {config.config_hash}')
        if config.is_sweep:
            self.stdout.write(f'cells:       {len(config.algorithms) * len(config.n_grid)}')
        self.stdout.write(self.style.SUCCESS('OK'))
