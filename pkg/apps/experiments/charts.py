"""
Log-log charts of sweep metrics against n, rendered from the sweep CSV.

Each chart plots the measured metric per algorithm with its standard error,
the matching theoretical bound where one exists, and a dashed reference line
of slope equal to the predicted rate exponent anchored at the first point.
"""
import logging
from pathlib import Path

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from apps.core_math.params import Algorithm  # noqa: E402
from apps.core_math.schedules import predicted_rate_exponent  # noqa: E402

logger = logging.getLogger(__name__)

# metric column -> (stderr column, theory column, axis label)
CHART_METRICS = {
    'epsilon_hat': ('epsilon_stderr', 'epsilon_theory', 'stability in gradients'),
    'gen_gap_hat': ('gen_gap_stderr', 'gen_bound_theory', 'generalization gap'),
    'population_grad_norm': ('population_grad_norm_stderr', None, 'population gradient norm'),
}

RC = {'svg.hashsalt': 'htstab', 'svg.fonttype': 'none'}


def _usable(frame, metric):
    if metric not in frame.columns:
        return frame.iloc[0:0]
    ok = frame[(frame['status'] == 'ok') & frame[metric].notna()]
    return ok[ok[metric] > 0]


def render_chart(frame, metric, path):
    stderr_column, theory_column, label = CHART_METRICS[metric]
    data = _usable(frame, metric)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        for algorithm, group in data.groupby('algorithm', sort=False):
            group = group.sort_values('n')
            ns = group['n'].to_numpy(dtype=float)
            values = group[metric].to_numpy(dtype=float)
            yerr = group[stderr_column].fillna(0.0).to_numpy(dtype=float) if stderr_column in group else None
            line = ax.errorbar(ns, values, yerr=yerr, marker='o', capsize=3, label=algorithm)
            color = line[0].get_color()
            exponent = predicted_rate_exponent(Algorithm(algorithm), float(group['p'].iloc[0]))
            ax.plot(ns, values[0] * (ns / ns[0]) ** exponent, linestyle='--', color=color, alpha=0.6,
                    label=f'{algorithm} reference n^{exponent:.3f}')
            if theory_column and theory_column in group and group[theory_column].notna().all():
                ax.plot(ns, group[theory_column].to_numpy(dtype=float), linestyle=':', color=color,
                        label=f'{algorithm} bound')
        ax.set_xscale('log')
        ax.set_yscale('log')
        ax.set_xlabel('n')
        ax.set_ylabel(label)
        ax.legend(fontsize='small')
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    logger.info('render_chart: metric=%s path=%s', metric, path)
    return path


def render_charts(frame, out_dir):
    """One SVG per metric with at least one usable cell; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for metric in CHART_METRICS:
        if _usable(frame, metric).empty:
            continue
        written.append(render_chart(frame, metric, out_dir / f'{metric}.svg'))
    if not written:
        logger.warning('render_charts: no usable cells, nothing drawn')
    return written
