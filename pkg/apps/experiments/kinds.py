"""
Experiment kinds. Kept apart from the serializers so sweep workers can
import it without pulling in the schema layer.
"""
from django.db import models


class ExperimentKind(models.TextChoices):
    STABILITY_SWEEP = 'stability_sweep', 'Stability sweep over n'
    GEN_GAP_SWEEP = 'gen_gap_sweep', 'Generalization gap sweep over n'
    RATE_COMPARISON = 'rate_comparison', 'Rate comparison across algorithms'
    LEMMA_SUITE = 'lemma_suite', 'Invariant suite'
    RANDOM_WALK_DEMO = 'random_walk_demo', 'Random-walk counterexample'


SWEEP_KINDS = (
    ExperimentKind.STABILITY_SWEEP,
    ExperimentKind.GEN_GAP_SWEEP,
    ExperimentKind.RATE_COMPARISON,
)

# Kinds whose metric is built on the population gradient.
POPULATION_KINDS = (ExperimentKind.GEN_GAP_SWEEP, ExperimentKind.RATE_COMPARISON)
