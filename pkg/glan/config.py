"""Model, training and runtime configuration using Pydantic Settings."""
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import torch
from dotenv import dotenv_values
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from glan.exceptions import ConfigurationError


class Ablation(str, Enum):
    """Which relation encoders take part in the forward pass."""

    FULL = "full"
    NO_LRE = "no_lre"
    NO_GRE = "no_gre"
    ONLY_TEXT = "only_text"

    @property
    def uses_local(self) -> bool:
        return self in (Ablation.FULL, Ablation.NO_GRE)

    @property
    def uses_global(self) -> bool:
        return self in (Ablation.FULL, Ablation.NO_LRE)


class TrainConfig(BaseSettings):
    """Hyper-parameters of one training run.

    Defaults are full-corpus settings; `small()` and `tiny()` give
    desk-scale presets.
    """

    model_config = SettingsConfigDict(env_prefix="GLAN_", extra="forbid")

    # Text encoder
    d: int = Field(default=300, ge=1)
    max_len: int = Field(default=50, ge=1)
    kernel_sizes: str = "3,4,5"
    filters_per_width: int = Field(default=100, ge=1)
    min_count: int = Field(default=2, ge=1)
    embedding_file: Optional[str] = None

    # Attention
    local_heads: int = Field(default=8, ge=1)
    global_heads: int = Field(default=8, ge=1)
    layers: int = Field(default=2, ge=1)
    user_dim: int = Field(default=64, ge=1)
    scale_per_head: bool = True
    max_retweets: int = Field(default=128, ge=1)
    neighbor_cap: int = Field(default=256, ge=1)

    # Optimization
    batch_size: int = Field(default=64, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)
    lr_decay_factor: float = Field(default=0.5, gt=0, lt=1)
    lr_decay_patience: int = Field(default=3, ge=1)
    min_lr: float = Field(default=1e-5, ge=0)
    max_epochs: int = Field(default=100, ge=1)
    patience: int = Field(default=10, ge=1)
    loss_reduction: str = "mean"
    init_range: float = Field(default=0.1, gt=0)

    # Run
    seed: int = 0
    precision: int = 32
    ablation: Ablation = Ablation.FULL

    @property
    def widths(self) -> tuple[int, ...]:
        """Parse kernel widths from comma-separated string."""
        return tuple(int(w.strip()) for w in self.kernel_sizes.split(",") if w.strip())

    @property
    def dtype(self) -> torch.dtype:
        return torch.float64 if self.precision == 64 else torch.float32

    @field_validator("precision")
    @classmethod
    def check_precision(cls, value: int) -> int:
        if value not in (32, 64):
            raise ValueError("precision must be 32 or 64")
        return value

    @field_validator("loss_reduction")
    @classmethod
    def check_reduction(cls, value: str) -> str:
        if value not in ("mean", "sum"):
            raise ValueError("loss_reduction must be 'mean' or 'sum'")
        return value

    @model_validator(mode="after")
    def check_dimensions(self) -> "TrainConfig":
        widths = self.widths
        if not widths or min(widths) < 1:
            raise ValueError("kernel_sizes must list positive widths")
        if len(widths) * self.filters_per_width != self.d:
            raise ValueError(
                f"{len(widths)} widths x {self.filters_per_width} filters != d={self.d}"
            )
        if self.d % self.local_heads != 0:
            raise ValueError(f"d={self.d} not divisible by local_heads={self.local_heads}")
        if self.d % self.global_heads != 0:
            raise ValueError(f"d={self.d} not divisible by global_heads={self.global_heads}")
        if self.max_len < max(widths):
            raise ValueError(f"max_len={self.max_len} shorter than widest kernel {max(widths)}")
        return self

    def replace(self, **changes: Any) -> "TrainConfig":
        """Return a validated copy with some fields changed."""
        return TrainConfig(**{**self.model_dump(), **changes})

    @classmethod
    def small(cls, **overrides: Any) -> "TrainConfig":
        """Desk-scale preset used for synthetic corpora."""
        values: dict[str, Any] = dict(
            d=24,
            max_len=20,
            kernel_sizes="3,4,5",
            filters_per_width=8,
            local_heads=4,
            global_heads=4,
            layers=2,
            user_dim=24,
            batch_size=16,
            max_epochs=60,
            patience=15,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def tiny(cls, **overrides: Any) -> "TrainConfig":
        """Smallest preset, used by gradient checks."""
        values: dict[str, Any] = dict(
            d=12,
            max_len=10,
            kernel_sizes="3,4,5",
            filters_per_width=4,
            local_heads=2,
            global_heads=2,
            layers=1,
            user_dim=12,
            precision=64,
        )
        values.update(overrides)
        return cls(**values)


class RuntimeSettings(BaseSettings):
    """Process-level settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="GLAN_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    threads: Optional[int] = None
    log_level: str = "INFO"


def load_config(path: Optional[Path] = None, **overrides: Any) -> TrainConfig:
    """
    Resolve a TrainConfig from a key=value file, environment and overrides.

    Precedence: overrides > file > GLAN_* environment > defaults.

    Args:
        path: Optional flat key=value config file
        **overrides: Values given on the command line (None entries are ignored)

    Returns:
        Validated TrainConfig

    Raises:
        ConfigurationError: If the file does not exist
        ValidationError: If a value is invalid or a key is unknown
    """
    values: dict[str, Any] = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigurationError(f"Config file {path} not found")
        values.update(
            {key.lower(): value for key, value in dotenv_values(path).items() if value is not None}
        )
    values.update({key: value for key, value in overrides.items() if value is not None})
    return TrainConfig(**values)
