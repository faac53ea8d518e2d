"""
run_experiment: config file in, report files out.

Output layout under <output dir>/<experiment name>/:

    report.json   full report (schema version 1)
    sweep.csv     one row per (algorithm, n) cell; lemmas.csv or
                  random_walk.csv for the other kinds
    *.svg         charts drawn from sweep.csv when the config asks for them
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
from django.conf import settings

from apps.core_math.errors import InvalidArgument
from apps.core_math.schedules import predicted_rate_exponent

from .charts import render_charts
from .comparison import compare_rows
from .config import load_config
from .lemmas import run_lemma_suite
from .random_walk import random_walk_table
from .rates import fit_rate
from .reports import build_report, read_sweep_csv, sweep_frame, write_csv, write_json
from .kinds import ExperimentKind
from .sweeps import cell_specs, resolve_sigma, run_cells

logger = logging.getLogger(__name__)

# the metric each sweep kind fits a rate to
SWEEP_METRICS = {
    ExperimentKind.STABILITY_SWEEP: 'epsilon_hat',
    ExperimentKind.GEN_GAP_SWEEP: 'gen_gap_hat',
    ExperimentKind.RATE_COMPARISON: 'population_grad_norm',
}


@dataclass
class RunResult:
    config: object
    output_dir: Path
    report: dict
    report_path: Path
    csv_path: Path
    chart_paths: list = field(default_factory=list)

    @property
    def failed_cells(self):
        return sum(1 for cell in self.report['cells'] if cell['status'] == 'failed')

    @property
    def all_cells_failed(self):
        cells = self.report['cells']
        return bool(cells) and self.failed_cells == len(cells)

    @property
    def lemmas_passed(self):
        return all(check['passed'] for check in self.report['lemmas'])


def fit_rates(rows, algorithms, p, metric):
    fits = []
    for algorithm in algorithms:
        points = [
            (row['n'], row[metric]) for row in rows
            if row['algorithm'] == algorithm.value and row['status'] == 'ok'
            and row.get(metric) is not None and row[metric] > 0
        ]
        if len(points) < 2:
            logger.warning('fit_rates: algorithm=%s metric=%s has %d usable cells, skipped',
                           algorithm.value, metric, len(points))
            continue
        try:
            fit = fit_rate(points, predicted_rate_exponent(algorithm, p))
        except InvalidArgument:
            logger.exception('fit_rates: algorithm=%s metric=%s fit failed', algorithm.value, metric)
            continue
        fits.append({'algorithm': algorithm.value, 'metric': metric, **fit.as_dict()})
    return fits


def _run_sweep(config, out_dir, parallelism):
    cells = run_cells(cell_specs(config, resolve_sigma(config)), parallelism)
    rows = [cell['row'] for cell in cells]
    csv_path = write_csv(sweep_frame(rows), out_dir / 'sweep.csv')

    metric = SWEEP_METRICS[config.kind]
    comparison = None
    if config.kind == ExperimentKind.RATE_COMPARISON:
        comparison = compare_rows(rows, config.algorithms, config.p, metric).as_dict()
    chart_paths = []
    if config.charts:
        chart_paths = render_charts(read_sweep_csv(csv_path), out_dir)
    report = build_report(
        config,
        cells=[
            {
                'algorithm': cell['row']['algorithm'],
                'n': cell['row']['n'],
                'status': cell['row']['status'],
                'error': cell['row']['error'] or None,
                'report': cell['report'],
            }
            for cell in cells
        ],
        fits=fit_rates(rows, config.algorithms, config.p, metric),
        comparison=comparison,
    )
    return report, csv_path, chart_paths


def _run_lemmas(config, out_dir):
    result = run_lemma_suite(config.lemmas.instances, config.lemmas.trials, config.seed)
    frame = pd.DataFrame(
        [
            {'name': c.name, 'passed': c.passed, 'instances': c.instances, 'worst_margin': c.worst_margin}
            for c in result.checks
        ],
        columns=['name', 'passed', 'instances', 'worst_margin'],
    )
    csv_path = write_csv(frame, out_dir / 'lemmas.csv')
    return build_report(config, lemmas=result.as_dict()), csv_path, []


def _run_random_walk(config, out_dir):
    walk = config.random_walk
    result = random_walk_table(walk.eta, walk.horizon, walk.seeds, walk.every, config.seed)
    table = result.as_dict()
    frame = pd.DataFrame(table['table'], columns=['t', 'variance', 'predicted', 'ratio', 'mean_abs_gradient'])
    csv_path = write_csv(frame, out_dir / 'random_walk.csv')
    return build_report(config, random_walk=table), csv_path, []


def run_experiment(config_path, output_dir=None, parallelism=None):
    """
    Validate the config, run it and write its report files. Raises ConfigError
    for an invalid config; per-cell failures are recorded in the report.
    """
    config = load_config(config_path)
    base = Path(output_dir or settings.HTSTAB_OUTPUT_DIR)
    out_dir = base / config.name
    out_dir.mkdir(parents=True, exist_ok=True)
    parallelism = settings.HTSTAB_PARALLELISM if parallelism is None else parallelism
    logger.info('run_experiment: name=%s kind=%s out=%s parallelism=%d',
                config.name, config.kind.value, out_dir, parallelism)

    if config.is_sweep:
        report, csv_path, chart_paths = _run_sweep(config, out_dir, parallelism)
    elif config.kind == ExperimentKind.LEMMA_SUITE:
        report, csv_path, chart_paths = _run_lemmas(config, out_dir)
    else:
        report, csv_path, chart_paths = _run_random_walk(config, out_dir)

    report_path = write_json(report, out_dir / 'report.json')
    result = RunResult(config, out_dir, report, report_path, csv_path, chart_paths)
    logger.info('run_experiment: name=%s done, failed_cells=%d', config.name, result.failed_cells)
    return result
