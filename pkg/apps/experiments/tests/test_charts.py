"""
Unit tests for apps.experiments.charts.
"""
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from apps.experiments.charts import render_charts
from apps.experiments.reports import sweep_frame
from apps.experiments.sweeps import CSV_COLUMNS


def _rows():
    rows = []
    for algorithm, scale in (('nsgd_m', 1.0), ('clipped_sgd', 2.0)):
        for n in (256, 1024, 4096):
            row = dict.fromkeys(CSV_COLUMNS)
            row.update({
                'experiment': 'demo', 'kind': 'stability_sweep', 'algorithm': algorithm, 'n': n,
                'p': 1.5, 'sigma_p': 1.0, 'epsilon_hat': scale * n ** -0.2,
                'epsilon_stderr': 0.001, 'epsilon_theory': 10 * scale * n ** -0.2,
                'status': 'ok', 'error': '',
            })
            rows.append(row)
    return rows


class RenderChartsTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_writes_svg_per_usable_metric(self):
        written = render_charts(sweep_frame(_rows()), self.dir)
        self.assertEqual([p.name for p in written], ['epsilon_hat.svg'])
        text = written[0].read_text(encoding='utf-8')
        self.assertIn('<svg', text)
        self.assertNotIn('<dc:date>', text)

    def test_deterministic_bytes(self):
        a = render_charts(sweep_frame(_rows()), self.dir / 'a')[0].read_bytes()
        b = render_charts(sweep_frame(_rows()), self.dir / 'b')[0].read_bytes()
        self.assertEqual(a, b)

    def test_nothing_usable(self):
        rows = _rows()
        for row in rows:
            row.update({'status': 'failed', 'epsilon_hat': None})
        with self.assertLogs('apps.experiments.charts', level='WARNING'):
            self.assertEqual(render_charts(sweep_frame(rows), self.dir), [])
