"""Training service - optimization loop, checkpoints and prediction."""
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict

from glan.config import TrainConfig
from glan.exceptions import CheckpointError, DivergenceError
from glan.layers.glan import GlanModel, cross_entropy
from glan.models.cascade import Cascade, Label, UserRecord
from glan.models.encoded import EncodedCorpus
from glan.models.report import Prediction, TrainLogRecord
from glan.models.vocabulary import Vocabulary
from glan.numerics.checkpoint import load_checkpoint, save_checkpoint
from glan.numerics.optim import AdamState, adam_step
from glan.services.encoding_service import (
    PreparedCorpus,
    UserFeatureEncoder,
    encode_corpus,
    prepare_corpus,
)
from glan.services.graph_service import build_graph
from glan.storage import RunStore
from glan.utils.text import read_embedding_file

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = "checkpoint.glan"
TRAIN_LOG_FILE = "train_log.jsonl"


class ModelBundle(BaseModel):
    """A model together with everything needed to encode new inputs for it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: GlanModel
    config: TrainConfig
    vocab: Vocabulary
    labels: tuple[Label, ...]
    feature_encoder: UserFeatureEncoder
    train_ids: list[str]
    dev_ids: list[str]
    test_ids: list[str]
    train_user_ids: list[str]


class TrainResult(BaseModel):
    """Best-dev model, prepared corpus and per-epoch log of one training run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    bundle: ModelBundle
    prepared: PreparedCorpus
    log: list[TrainLogRecord]
    best_epoch: int
    best_dev_accuracy: float


@contextmanager
def seeded(seed: int) -> Iterator[None]:
    """Seed torch and enable deterministic kernels, restoring the previous mode on exit."""
    enabled = torch.are_deterministic_algorithms_enabled()
    warn_only = torch.is_deterministic_algorithms_warn_only_enabled()
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)
    try:
        yield
    finally:
        torch.use_deterministic_algorithms(enabled, warn_only=warn_only)


@torch.no_grad()
def accuracy(model: GlanModel, corpus: EncodedCorpus, rows: torch.Tensor) -> float:
    """Share of rows whose argmax class equals the gold class."""
    if rows.numel() == 0:
        return 0.0
    predicted = model(corpus, rows).argmax(dim=-1)
    return float((predicted == corpus.labels[rows]).double().mean())


class TrainingService:
    """Service for training models and running saved ones."""

    def __init__(self, config: TrainConfig, store: Optional[RunStore] = None):
        """Initialize service with a configuration and an optional run directory."""
        self.config = config
        self.store = store

    def build_model(self, prepared: PreparedCorpus) -> GlanModel:
        """Fresh model over the prepared vocabulary, labels and training nodes."""
        model = GlanModel(
            self.config,
            vocab_size=len(prepared.vocab),
            n_classes=len(prepared.labels),
            tweet_ids=prepared.train_ids,
            user_ids=prepared.train_user_ids,
        )
        if self.config.embedding_file:
            vectors = read_embedding_file(Path(self.config.embedding_file), self.config.d)
            model.text_encoder.load_pretrained(vectors, prepared.vocab)
        return model

    def train(
        self,
        cascades: list[Cascade],
        users: list[UserRecord],
        splits: Optional[tuple[list[str], list[str], list[str]]] = None,
    ) -> TrainResult:
        """
        Train on the training split, selecting the epoch with the best dev accuracy.

        Each epoch shuffles the training cascades, takes one Adam step per
        batch, then evaluates dev accuracy. The learning rate is halved when
        dev accuracy stalls and training stops after `patience` epochs
        without improvement.

        Args:
            cascades: All cascades (every one becomes a graph node)
            users: User records
            splits: Optional fixed (train, dev, test) id lists

        Returns:
            TrainResult holding the best-dev model

        Raises:
            DivergenceError: If a batch loss is not finite
        """
        with seeded(self.config.seed):
            return self._fit(cascades, users, splits)

    def _fit(
        self,
        cascades: list[Cascade],
        users: list[UserRecord],
        splits: Optional[tuple[list[str], list[str], list[str]]],
    ) -> TrainResult:
        config = self.config
        prepared = prepare_corpus(cascades, users, config, splits)
        model = self.build_model(prepared)
        corpus = prepared.encoded

        state = AdamState(
            model.named_parameters(),
            lr=config.lr,
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.adam_eps,
        )
        scheduler = torch.optim.lr_scheduler.ReduceLROnPlateau(
            state.optimizer,
            mode="max",
            factor=config.lr_decay_factor,
            patience=config.lr_decay_patience - 1,
            threshold=0.0,
            threshold_mode="abs",
            min_lr=config.min_lr,
            eps=0.0,
        )
        rng = np.random.default_rng(config.seed)
        train_rows = corpus.rows(prepared.train_ids)
        dev_rows = corpus.rows(prepared.dev_ids)

        if self.store is not None:
            self.store.write_records(TRAIN_LOG_FILE, [])

        log: list[TrainLogRecord] = []
        best_dev = -1.0
        best_epoch = 0
        best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
        stale_epochs = 0

        for epoch in range(1, config.max_epochs + 1):
            lr = state.lr
            order = train_rows[torch.from_numpy(rng.permutation(len(train_rows)))]
            total_loss = 0.0
            for batch, start in enumerate(range(0, len(order), config.batch_size)):
                rows = order[start:start + config.batch_size]
                state.zero_grad()
                probs = model(corpus, rows)
                loss = cross_entropy(probs, corpus.labels[rows], config.loss_reduction)
                if not torch.isfinite(loss):
                    raise DivergenceError(epoch, batch, float(loss))
                loss.backward()
                grads = {
                    name: param.grad
                    for name, param in state.params.items()
                    if param.grad is not None
                }
                adam_step(state, grads)
                batch_loss = float(loss.detach())
                total_loss += batch_loss * (len(rows) if config.loss_reduction == "mean" else 1)
                logger.debug("epoch %d batch %d loss %.6f", epoch, batch, batch_loss)

            dev_accuracy = accuracy(model, corpus, dev_rows)
            improved = dev_accuracy > best_dev
            if improved:
                best_dev = dev_accuracy
                best_epoch = epoch
                best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
                stale_epochs = 0
            else:
                stale_epochs += 1
            scheduler.step(dev_accuracy)

            record = TrainLogRecord(
                epoch=epoch,
                train_loss=total_loss / len(train_rows),
                train_accuracy=accuracy(model, corpus, train_rows),
                dev_accuracy=dev_accuracy,
                lr=lr,
                best=improved,
            )
            log.append(record)
            if self.store is not None:
                self.store.append_record(TRAIN_LOG_FILE, record)
            logger.info(
                "epoch %d loss %.4f train %.4f dev %.4f lr %.2e",
                epoch,
                record.train_loss,
                record.train_accuracy,
                dev_accuracy,
                lr,
            )
            if stale_epochs >= config.patience:
                logger.info("Stopping after %d epochs without dev improvement", stale_epochs)
                break

        model.load_state_dict(best_state)
        bundle = ModelBundle(
            model=model,
            config=config,
            vocab=prepared.vocab,
            labels=prepared.labels,
            feature_encoder=prepared.feature_encoder,
            train_ids=prepared.train_ids,
            dev_ids=prepared.dev_ids,
            test_ids=prepared.test_ids,
            train_user_ids=prepared.train_user_ids,
        )
        return TrainResult(
            bundle=bundle,
            prepared=prepared,
            log=log,
            best_epoch=best_epoch,
            best_dev_accuracy=best_dev,
        )


def save_bundle(path: Path, bundle: ModelBundle) -> None:
    """Write a model bundle as a checkpoint with its encoding metadata."""
    metadata = {
        "config": bundle.config.model_dump(mode="json"),
        "vocab": bundle.vocab.tokens,
        "labels": [label.value for label in bundle.labels],
        "feature_encoder": bundle.feature_encoder.model_dump(mode="json"),
        "splits": {
            "train": bundle.train_ids,
            "dev": bundle.dev_ids,
            "test": bundle.test_ids,
        },
        "train_user_ids": bundle.train_user_ids,
    }
    save_checkpoint(path, bundle.model.state_dict(), bundle.config.precision, metadata)


def load_bundle(path: Path) -> ModelBundle:
    """
    Rebuild a model bundle from a checkpoint.

    Raises:
        CheckpointError: If the file is unreadable or its tensors do not fit the model
    """
    checkpoint = load_checkpoint(path)
    meta = checkpoint.metadata
    try:
        config = TrainConfig(**meta["config"])
        vocab = Vocabulary(tokens=meta["vocab"])
        labels = tuple(Label(value) for value in meta["labels"])
        splits = meta["splits"]
        bundle_fields = dict(
            config=config,
            vocab=vocab,
            labels=labels,
            feature_encoder=UserFeatureEncoder(**meta["feature_encoder"]),
            train_ids=splits["train"],
            dev_ids=splits["dev"],
            test_ids=splits["test"],
            train_user_ids=meta["train_user_ids"],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"Checkpoint metadata is incomplete: {e}")
    if config.precision != checkpoint.precision:
        raise CheckpointError(
            f"Checkpoint holds {checkpoint.precision}-bit tensors, "
            f"config asks for {config.precision}-bit"
        )

    model = GlanModel(
        config,
        vocab_size=len(vocab),
        n_classes=len(labels),
        tweet_ids=bundle_fields["train_ids"],
        user_ids=bundle_fields["train_user_ids"],
    )
    try:
        model.load_state_dict(checkpoint.tensors)
    except RuntimeError as e:
        raise CheckpointError(f"Checkpoint tensors do not fit the model: {e}")
    return ModelBundle(model=model, **bundle_fields)


@torch.no_grad()
def predict(
    bundle: ModelBundle,
    cascades: list[Cascade],
    users: list[UserRecord],
    target_ids: Optional[Sequence[str]] = None,
    vocab: Optional[Vocabulary] = None,
) -> list[Prediction]:
    """
    Classify cascades with a trained model.

    The graph is rebuilt from `cascades`, so every cascade given contributes
    graph context; only `target_ids` (all cascades by default) are returned.
    Ties go to the lower class index.

    Args:
        bundle: Trained model bundle
        cascades: Cascades forming the graph
        users: User records
        target_ids: Optional cascade ids to classify
        vocab: Optional vocabulary the inputs were prepared with

    Returns:
        One Prediction per target cascade, in target order

    Raises:
        CheckpointError: If `vocab` differs from the model's vocabulary
    """
    if vocab is not None and vocab.tokens != bundle.vocab.tokens:
        raise CheckpointError("Vocabulary does not match the checkpoint")
    graph = build_graph(cascades, users)
    corpus = encode_corpus(
        cascades, users, graph, bundle.vocab, bundle.labels, bundle.feature_encoder, bundle.config
    )
    ids = list(target_ids) if target_ids is not None else list(corpus.tweet_ids)
    bundle.model.eval()
    probs = bundle.model(corpus, corpus.rows(ids))
    predicted = probs.argmax(dim=-1).tolist()
    return [
        Prediction(
            cascade_id=cascade_id,
            label=bundle.labels[k].value,
            probabilities={
                label.value: float(p) for label, p in zip(bundle.labels, row.tolist())
            },
        )
        for cascade_id, k, row in zip(ids, predicted, probs)
    ]
