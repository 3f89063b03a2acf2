"""Microblog, cascade and user model definitions."""
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Label(str, Enum):
    """Veracity classes (binary corpora use NR and FR only)."""

    NR = "NR"  # non-rumor
    FR = "FR"  # false rumor
    UR = "UR"  # unverified rumor
    TR = "TR"  # true rumor (debunks another post)


BINARY_LABELS: tuple[Label, ...] = (Label.NR, Label.FR)
FOUR_LABELS: tuple[Label, ...] = (Label.NR, Label.FR, Label.UR, Label.TR)


class Microblog(BaseModel):
    """A source tweet or a retweet."""

    id: str
    author: str
    tokens: list[str] = Field(default_factory=list)
    ts: float  # seconds since epoch
    parent: Optional[str] = None  # None for source tweets

    @property
    def is_source(self) -> bool:
        return self.parent is None


class Cascade(BaseModel):
    """A source microblog with its retweets, sorted by time."""

    source: Microblog
    retweets: list[Microblog] = Field(default_factory=list)
    label: Label

    @model_validator(mode="after")
    def check_retweets(self) -> "Cascade":
        if not self.source.is_source:
            raise ValueError(f"Source {self.source.id} has a parent")
        previous = self.source.ts
        for retweet in self.retweets:
            if retweet.parent != self.source.id:
                raise ValueError(f"Retweet {retweet.id} does not belong to {self.source.id}")
            if retweet.ts < self.source.ts:
                raise ValueError(f"Retweet {retweet.id} predates its source {self.source.id}")
            if retweet.ts < previous:
                raise ValueError(f"Retweets of {self.source.id} are not sorted by time")
            previous = retweet.ts
        return self

    @property
    def id(self) -> str:
        return self.source.id

    def participants(self) -> list[str]:
        """Author of the source followed by every retweeting user, with repeats."""
        return [self.source.author] + [retweet.author for retweet in self.retweets]


class UserRecord(BaseModel):
    """A user with optional behavior/profile features."""

    id: str
    features: Optional[list[float]] = None

    @field_validator("features")
    @classmethod
    def check_features(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None:
            if not all(math.isfinite(entry) for entry in value):
                raise ValueError("User features must be finite")
        return value
