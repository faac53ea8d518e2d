"""
Management command: lemmas

Runs the invariant suite and prints one line per check:

    python manage.py lemmas
    python manage.py lemmas --instances 1000 --trials 10000 --seed 7

Exit code 1 when any check fails.
"""
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

# Imported at module level so tests can patch
# apps.experiments.management.commands.lemmas.run_lemma_suite
from apps.experiments.lemmas import DEFAULT_INSTANCES, DEFAULT_TRIALS, run_lemma_suite


class Command(BaseCommand):
    help = 'Run the clipping, constant, moment and smoothness invariant checks.'

    def add_arguments(self, parser):
        parser.add_argument('--instances', type=int, default=DEFAULT_INSTANCES,
                            help='Random instances per inequality check.')
        parser.add_argument('--trials', type=int, default=DEFAULT_TRIALS,
                            help='Monte Carlo draws for the moment and truncation checks.')
        parser.add_argument('--seed', type=int, default=None, help='Seed (default: HTSTAB_DEFAULT_SEED).')

    def handle(self, *args, **options):
        if options['instances'] < 1 or options['trials'] < 100:
            raise CommandError('--instances must be >= 1 and --trials >= 100', returncode=1)
        seed = settings.HTSTAB_DEFAULT_SEED if options['seed'] is None else options['seed']
        result = run_lemma_suite(options['instances'], options['trials'], seed)

        for check in result.checks:
            status = self.style.SUCCESS('PASS') if check.passed else self.style.ERROR('FAIL')
            self.stdout.write(
                f'{status} {check.name:<26} instances={check.instances:<7} '
                f'worst_margin={check.worst_margin:.3g}  {check.description}'
            )
        if not result.passed:
            names = ', '.join(check.name for check in result.failures)
            raise CommandError(f'failed checks: {names}', returncode=1)
        self.stdout.write(self.style.SUCCESS(f'All {len(result.checks)} checks passed.'))
