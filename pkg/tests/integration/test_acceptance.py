"""End-to-end acceptance runs on synthetic corpora."""
import math
import statistics

import pytest

pytestmark = pytest.mark.slow

SEEDS = (0, 1, 2)


def synthetic(seed, structure=True, text=False):
    from glan.services.synthetic_service import SyntheticConfig, generate_synthetic

    return generate_synthetic(
        SyntheticConfig(
            n_cascades=256,
            n_users=64,
            structure_signal=structure,
            text_signal=text,
            seed=seed,
        )
    )


def train_and_score(corpus, config):
    from glan.services.evaluation_service import EvaluationService
    from glan.services.training_service import TrainingService

    result = TrainingService(config).train(*corpus)
    return result.bundle, EvaluationService().evaluate(result.bundle, *corpus).accuracy


def test_end_to_end_gradient_check():
    """Test every model gradient agrees with central differences."""
    from glan.services.gradcheck_service import end_to_end_grad_check

    report = end_to_end_grad_check()

    assert report.valid
    assert report.passed, report.worst_entry


def test_structure_signal_needs_the_graph(small_config):
    """Test only the graph path recovers labels carried by the participating users."""
    from glan.config import Ablation

    scores = {mode: [] for mode in (Ablation.FULL, Ablation.ONLY_TEXT, Ablation.NO_GRE)}
    for seed in SEEDS:
        corpus = synthetic(seed)
        for mode in scores:
            _, accuracy = train_and_score(corpus, small_config.replace(seed=seed, ablation=mode))
            scores[mode].append(accuracy)

    assert statistics.mean(scores[Ablation.FULL]) >= 0.90
    assert statistics.mean(scores[Ablation.ONLY_TEXT]) <= 0.65
    assert statistics.mean(scores[Ablation.NO_GRE]) <= 0.65


def test_text_signal_alone(small_config):
    """Test the text path by itself recovers labels carried by the tokens."""
    corpus = synthetic(0, structure=False, text=True)

    _, accuracy = train_and_score(corpus, small_config.replace(ablation="only_text"))

    assert accuracy >= 0.90


def test_early_detection_curve(small_config):
    """Test the delay sweep ends at the plain accuracy and four hours stays close."""
    from glan.services.evaluation_service import EvaluationService

    corpus = synthetic(0)
    bundle, plain = train_and_score(corpus, small_config)

    reports = EvaluationService().early_detection_sweep(
        bundle, *corpus, delays=[0.0, 3600.0, 4 * 3600.0, math.inf]
    )
    by_delay = {report.delay: report.accuracy for report in reports}

    assert by_delay[math.inf] == plain
    assert abs(by_delay[4 * 3600.0] - plain) <= 0.02
