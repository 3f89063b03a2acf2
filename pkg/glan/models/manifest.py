"""Run manifest model definition."""
from typing import Any

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Everything needed to reproduce a run, written before any computation."""

    command: str
    config: dict[str, Any] = Field(default_factory=dict)
    inputs: dict[str, str] = Field(default_factory=dict)  # path -> content hash
    seed: int
    out_dir: str
    options: dict[str, Any] = Field(default_factory=dict)
