"""Evaluation service - metrics, early detection, ablations and sensitivity sweeps."""
import logging
import math
import re
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel
from sklearn.metrics import accuracy_score, confusion_matrix, precision_recall_fscore_support

from glan.config import Ablation, TrainConfig
from glan.exceptions import ConfigurationError, DomainError, describe_error
from glan.models.cascade import Cascade, UserRecord
from glan.models.report import AblationRow, ClassMetrics, EvalReport, SweepRow
from glan.services.corpus_service import time_filter
from glan.services.training_service import (
    CHECKPOINT_FILE,
    ModelBundle,
    TrainingService,
    predict,
    save_bundle,
)
from glan.storage import RunStore
from glan.utils.tables import format_table

logger = logging.getLogger(__name__)

HOUR = 3600.0
DEFAULT_DELAYS_HOURS = (0, 1, 2, 4, 8, 12, 24, 36)
SWEEP_AXES = ("tweet_length", "kernel_sizes")

_DELAY_PATTERN = re.compile(r"^(\d+(?:\.\d*)?)\s*([smhd]?)$")
_DELAY_UNITS = {"": 1.0, "s": 1.0, "m": 60.0, "h": HOUR, "d": 24 * HOUR}


def metrics(predicted: Sequence[str], gold: Sequence[str], labels: Sequence[str]) -> EvalReport:
    """
    Accuracy, one-vs-rest precision/recall/F1 and the confusion matrix.

    Classes never predicted get precision 0; F1 is 0 when P + R = 0.

    Args:
        predicted: Predicted label per item
        gold: Gold label per item
        labels: Class set, in report order

    Returns:
        EvalReport

    Raises:
        DomainError: On empty or unequal inputs, or a label outside the class set
    """
    if len(predicted) != len(gold):
        raise DomainError(f"{len(predicted)} predictions for {len(gold)} gold labels")
    if not gold:
        raise DomainError("Cannot evaluate an empty set")
    known = set(labels)
    for label in [*gold, *predicted]:
        if label not in known:
            raise DomainError(f"Unknown label {label}")

    labels = list(labels)
    precision, recall, f1, support = precision_recall_fscore_support(
        gold, predicted, labels=labels, zero_division=0
    )
    confusion = confusion_matrix(gold, predicted, labels=labels)
    return EvalReport(
        accuracy=float(accuracy_score(gold, predicted)),
        labels=labels,
        per_class=[
            ClassMetrics(
                label=label,
                precision=float(precision[i]),
                recall=float(recall[i]),
                f1=float(f1[i]),
                support=int(support[i]),
            )
            for i, label in enumerate(labels)
        ],
        confusion=confusion.tolist(),
        total=len(gold),
    )


def parse_delay(text: str) -> float:
    """
    Delay in seconds from '90', '30m', '4h', '1d' or 'inf'.

    Raises:
        DomainError: If the text is not a delay
    """
    value = text.strip().lower()
    if value in ("inf", "infinity", "all"):
        return math.inf
    match = _DELAY_PATTERN.match(value)
    if match is None:
        raise DomainError(f"Invalid delay '{text}'")
    return float(match.group(1)) * _DELAY_UNITS[match.group(2)]


def sweep_config(config: TrainConfig, axis: str, value: str) -> TrainConfig:
    """
    Base config with one sweep value applied.

    Kernel-size values are a single width ('3') or a combination ('3,4,5');
    filters per width are set so that all widths together fill d.

    Raises:
        ConfigurationError: On an unknown axis or a combination that cannot fill d
        ValidationError: If the resulting config is invalid
    """
    if axis == "tweet_length":
        return config.replace(max_len=int(value))
    if axis == "kernel_sizes":
        widths = [int(w) for w in value.split(",") if w.strip()]
        if not widths or config.d % len(widths) != 0:
            raise ConfigurationError(f"d={config.d} is not divisible by {len(widths)} widths")
        return config.replace(
            kernel_sizes=",".join(str(w) for w in widths),
            filters_per_width=config.d // len(widths),
        )
    raise ConfigurationError(f"Unknown sweep axis {axis}; expected one of {SWEEP_AXES}")


class EvaluationService:
    """Service for evaluating trained models and comparing training variants."""

    def __init__(self, store: Optional[RunStore] = None):
        """Initialize service with an optional run directory for per-variant outputs."""
        self.store = store

    def evaluate(
        self,
        bundle: ModelBundle,
        cascades: list[Cascade],
        users: list[UserRecord],
        target_ids: Optional[Sequence[str]] = None,
        delay: Optional[float] = None,
    ) -> EvalReport:
        """
        Evaluate a model on the target cascades (its test split by default).

        Args:
            bundle: Trained model bundle
            cascades: Cascades forming the graph
            users: User records
            target_ids: Cascade ids to score
            delay: Delay to stamp on the report

        Returns:
            EvalReport
        """
        targets = list(target_ids) if target_ids is not None else bundle.test_ids
        by_id = {cascade.id: cascade for cascade in cascades}
        predictions = predict(bundle, cascades, users, targets)
        report = metrics(
            [p.label for p in predictions],
            [by_id[cascade_id].label.value for cascade_id in targets],
            [label.value for label in bundle.labels],
        )
        return report.model_copy(update={"delay": delay})

    def early_detection_sweep(
        self,
        bundle: ModelBundle,
        cascades: list[Cascade],
        users: list[UserRecord],
        delays: Sequence[float],
        target_ids: Optional[Sequence[str]] = None,
    ) -> list[EvalReport]:
        """
        Accuracy when only retweets within each delay of their source are visible.

        Target cascades are truncated and the graph is rebuilt from them; all
        other cascades keep their full history. The model is not retrained.

        Raises:
            DomainError: If delays are not ascending
        """
        if list(delays) != sorted(delays):
            raise DomainError("Delays must be ascending")
        targets = list(target_ids) if target_ids is not None else bundle.test_ids
        target_set = set(targets)
        reports = []
        for delay in delays:
            truncated = [
                time_filter(cascade, delay) if cascade.id in target_set else cascade
                for cascade in cascades
            ]
            report = self.evaluate(bundle, truncated, users, targets, delay=delay)
            logger.info("delay %s: accuracy %.4f", delay, report.accuracy)
            reports.append(report)
        return reports

    def _train_and_test(
        self,
        config: TrainConfig,
        cascades: list[Cascade],
        users: list[UserRecord],
        name: str,
    ):
        store = RunStore(self.store.path(name)).open() if self.store is not None else None
        result = TrainingService(config, store).train(cascades, users)
        if store is not None:
            save_bundle(store.path(CHECKPOINT_FILE), result.bundle)
        return result, self.evaluate(result.bundle, cascades, users)

    def ablation_study(
        self,
        cascades: list[Cascade],
        users: list[UserRecord],
        modes: Iterable[Ablation],
        config: TrainConfig,
    ) -> list[AblationRow]:
        """Train one model per ablation mode on the same split; test metrics per mode."""
        rows = []
        for mode in modes:
            _, report = self._train_and_test(
                config.replace(ablation=mode), cascades, users, mode.value
            )
            logger.info("ablation %s: accuracy %.4f", mode.value, report.accuracy)
            rows.append(AblationRow(mode=mode.value, report=report))
        return rows

    def sensitivity_sweep(
        self,
        cascades: list[Cascade],
        users: list[UserRecord],
        axis: str,
        values: Iterable[str],
        config: TrainConfig,
    ) -> list[SweepRow]:
        """
        Train one model per value of a hyper-parameter axis.

        Values the configuration rejects are reported as skipped rows.

        Raises:
            ConfigurationError: On an unknown axis
        """
        if axis not in SWEEP_AXES:
            raise ConfigurationError(f"Unknown sweep axis {axis}; expected one of {SWEEP_AXES}")
        rows = []
        for value in values:
            try:
                value_config = sweep_config(config, axis, value)
            except ValueError as e:
                reason = describe_error(e)
                logger.warning("Skipping %s=%s: %s", axis, value, reason)
                rows.append(SweepRow(axis=axis, value=value, skipped=reason))
                continue
            result, report = self._train_and_test(
                value_config, cascades, users, f"{axis}-{value.replace(',', '_')}"
            )
            rows.append(
                SweepRow(
                    axis=axis,
                    value=value,
                    dev_accuracy=result.best_dev_accuracy,
                    test_accuracy=report.accuracy,
                )
            )
        return rows


def render_reports(reports: Sequence[EvalReport]) -> str:
    """Delay (hours), accuracy and per-class P/R/F1, one row per report."""
    labels = reports[0].labels if reports else []
    headers = ["delay_h", "accuracy"]
    for label in labels:
        headers += [f"{label}_P", f"{label}_R", f"{label}_F1"]
    rows = []
    for report in reports:
        delay = None if report.delay is None else report.delay / HOUR
        row = [delay, report.accuracy]
        for label in labels:
            m = report.metrics_for(label)
            row += [m.precision, m.recall, m.f1]
        rows.append(row)
    return format_table(headers, rows)


def render_ablation(rows: Sequence[AblationRow]) -> str:
    """Mode, accuracy and per-class F1, one row per ablation mode."""
    labels = rows[0].report.labels if rows else []
    headers = ["mode", "accuracy", *[f"{label}_F1" for label in labels]]
    return format_table(
        headers,
        [
            [row.mode, row.report.accuracy, *[row.report.metrics_for(lb).f1 for lb in labels]]
            for row in rows
        ],
    )


def render_sweep(rows: Sequence[SweepRow]) -> str:
    return format_table(
        ["axis", "value", "dev_accuracy", "test_accuracy", "skipped"],
        [[r.axis, r.value, r.dev_accuracy, r.test_accuracy, r.skipped] for r in rows],
    )


def render_records(items: Iterable[BaseModel]) -> str:
    """One JSON object per line."""
    return "\n".join(item.model_dump_json() for item in items)
