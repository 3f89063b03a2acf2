"""Evaluation report and training log model definitions."""
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class ClassMetrics(BaseModel):
    """One-vs-rest metrics of a single class."""

    label: str
    precision: float
    recall: float
    f1: float
    support: int


class EvalReport(BaseModel):
    """Accuracy, per-class metrics and confusion matrix (rows gold, columns predicted)."""

    accuracy: float
    labels: list[str]
    per_class: list[ClassMetrics]
    confusion: list[list[int]]
    total: int
    delay: Optional[float] = None  # seconds; None means all data

    @model_validator(mode="after")
    def check_confusion(self) -> "EvalReport":
        if sum(sum(row) for row in self.confusion) != self.total:
            raise ValueError("Confusion matrix total does not match the number of items")
        return self

    def metrics_for(self, label: str) -> ClassMetrics:
        for metrics in self.per_class:
            if metrics.label == label:
                return metrics
        raise KeyError(label)


class TrainLogRecord(BaseModel):
    """One line of the training log."""

    epoch: int
    train_loss: float
    train_accuracy: float
    dev_accuracy: float
    lr: float
    best: bool = False


class SweepRow(BaseModel):
    """Result of one sensitivity-sweep value."""

    axis: str
    value: str
    dev_accuracy: Optional[float] = None
    test_accuracy: Optional[float] = None
    skipped: Optional[str] = None


class AblationRow(BaseModel):
    """Test metrics of one ablation mode."""

    mode: str
    report: EvalReport


class Prediction(BaseModel):
    """Predicted label and class probabilities of one cascade."""

    cascade_id: str
    label: str
    probabilities: dict[str, float] = Field(default_factory=dict)
