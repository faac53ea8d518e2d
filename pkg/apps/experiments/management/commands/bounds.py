"""
Management command: bounds

Prints the schedule, the stability bounds and the term-by-term
population-gradient bound for one algorithm and sample size:

    python manage.py bounds nsgd_m --n 4096 --p 1.5
    python manage.py bounds clipped_sgd --n 1000 --scale 2 --L 1.5 --G 3 --delta 10 --sigma 2
"""
import json

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.core_math.bounds import argument_stability_bound, stability_bound
from apps.core_math.constants import generalization_bound, tau_star
from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, TailParams, TheoryParams
from apps.core_math.schedules import predicted_rate_exponent, schedule_exponents, schedule_for
from apps.experiments.reports import json_safe
from apps.stability.theory import MOMENT, OPTIMIZATION, STABILITY, theoretical_report


class Command(BaseCommand):
    help = 'Print the schedule and theoretical bounds for an algorithm at a given n and p.'

    def add_arguments(self, parser):
        parser.add_argument('algorithm', choices=Algorithm.values)
        parser.add_argument('--n', type=int, required=True, help='Sample size.')
        parser.add_argument('--p', type=float, default=2.0, help='Tail exponent in (1, 2].')
        parser.add_argument('--scale', type=float, default=None,
                            help='Schedule constant (default: HTSTAB_SCHEDULE_SCALE).')
        parser.add_argument('--L', dest='L', type=float, default=1.0, help='Smoothness constant.')
        parser.add_argument('--G', dest='G', type=float, default=1.0, help='p-th gradient moment bound.')
        parser.add_argument('--delta', type=float, default=0.0, help='Initial suboptimality.')
        parser.add_argument('--sigma', type=float, default=1.0, help='Noise moment bound sigma_p.')
        parser.add_argument('--json', action='store_true', default=False, help='Print one JSON object.')

    def handle(self, *args, **options):
        algorithm = Algorithm(options['algorithm'])
        n, p = options['n'], options['p']
        scale = settings.HTSTAB_SCHEDULE_SCALE if options['scale'] is None else options['scale']
        try:
            schedule = schedule_for(algorithm, n, p, scale)
            theory = TheoryParams(options['L'], options['G'], options['delta'])
            tail = TailParams(p, options['sigma'])
            breakdown = theoretical_report(algorithm, schedule, theory, tail, n)
            epsilon = stability_bound(algorithm, schedule, theory.L, n)
            summary = {
                'algorithm': algorithm.value,
                'n': n,
                'p': p,
                'scale': scale,
                'exponents': schedule_exponents(algorithm, p),
                'schedule': schedule.as_dict(),
                'stability_bound': epsilon,
                'argument_stability_bound': argument_stability_bound(algorithm, schedule, n),
                'generalization_bound': generalization_bound(epsilon, tail, n),
                'tau_star': tau_star(p, n, tail.sigma_p) if tail.sigma_p > 0 else None,
                'predicted_rate_exponent': predicted_rate_exponent(algorithm, p),
                'breakdown': breakdown.as_dict(),
            }
        except InvalidArgument as exc:
            raise CommandError(str(exc), returncode=1)

        if options['json']:
            self.stdout.write(json.dumps(json_safe(summary), indent=2, sort_keys=True))
            return

        self.stdout.write(f'{algorithm.label} at n={n}, p={p:g}, scale={scale:g}')
        fields = ', '.join(f'{k}={v:.6g}' if isinstance(v, float) else f'{k}={v}'
                           for k, v in summary['schedule'].items() if v is not None)
        self.stdout.write(f'schedule: {fields}')
        self.stdout.write(f'stability bound (epsilon):  {summary["stability_bound"]:.6g}')
        self.stdout.write(f'argument stability bound:   {summary["argument_stability_bound"]:.6g}')
        self.stdout.write(f'generalization bound:       {summary["generalization_bound"]:.6g}')
        if summary['tau_star'] is not None:
            self.stdout.write(f'tau_star:                   {summary["tau_star"]:.6g}')
        self.stdout.write(f'predicted rate:             n^{summary["predicted_rate_exponent"]:.4f}')
        self.stdout.write('population-gradient bound:')
        for term in breakdown.terms:
            self.stdout.write(f'  {term.name:<18} {term.category:<13} {term.value:.6g}')
        for category in (OPTIMIZATION, STABILITY, MOMENT):
            self.stdout.write(f'  {category + " total":<32} {breakdown.by_category(category):.6g}')
        self.stdout.write(self.style.SUCCESS(f'  {"total":<32} {breakdown.total:.6g}'))
