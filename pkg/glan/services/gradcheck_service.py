"""Gradient check service - end-to-end finite-difference check of the full model."""
import logging

from glan.config import TrainConfig
from glan.layers.glan import GlanModel, cross_entropy
from glan.models.vocabulary import PAD_ID
from glan.numerics.gradcheck import GradCheckReport, grad_check
from glan.services.encoding_service import participants_of, prepare_corpus
from glan.services.synthetic_service import SyntheticConfig, generate_synthetic
from glan.services.training_service import seeded

logger = logging.getLogger(__name__)

EMBEDDING = "text_encoder.embedding.weight"


def end_to_end_grad_check(
    seed: int = 0,
    eps: float = 1e-5,
    tolerance: float = 1e-4,
    n_cascades: int = 3,
    config: TrainConfig | None = None,
) -> GradCheckReport:
    """
    Check every parameter of a tiny 64-bit model on a few synthetic cascades.

    The padding row of the embedding table is fixed at zero and is skipped.

    Args:
        seed: Seed of the corpus and the initialization
        eps: Central-difference step
        tolerance: Pass threshold on the maximum relative error
        n_cascades: Number of cascades in the loss
        config: Model configuration, TrainConfig.tiny() by default

    Returns:
        GradCheckReport over all parameter groups
    """
    config = (config or TrainConfig.tiny()).replace(seed=seed, min_count=1, precision=64)
    cascades, users = generate_synthetic(
        SyntheticConfig(
            n_cascades=8,
            n_users=8,
            vocab_size=40,
            structure_signal=True,
            text_signal=True,
            seed=seed,
            min_retweets=1,
            max_retweets=3,
            tokens_per_text=6,
        )
    )
    cascades = cascades[:n_cascades]
    active = set(participants_of(cascades))
    users = [user for user in users if user.id in active]
    ids = [cascade.id for cascade in cascades]

    with seeded(seed):
        prepared = prepare_corpus(cascades, users, config, splits=(ids, [], []))
        model = GlanModel(
            config,
            vocab_size=len(prepared.vocab),
            n_classes=len(prepared.labels),
            tweet_ids=ids,
            user_ids=prepared.train_user_ids,
        )
        corpus = prepared.encoded
        rows = corpus.rows(ids)

        def loss_fn():
            return cross_entropy(model(corpus, rows), corpus.labels[rows], config.loss_reduction)

        params = dict(model.named_parameters())
        exclude = {EMBEDDING: range(PAD_ID * config.d, (PAD_ID + 1) * config.d)}
        report = grad_check(loss_fn, params, eps=eps, tolerance=tolerance, exclude=exclude)
    logger.info(
        "End-to-end gradient check: %d entries, max relative error %.3e",
        report.checked,
        report.max_rel_error,
    )
    return report
