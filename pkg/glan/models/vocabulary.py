"""Vocabulary model definition."""
from functools import cached_property

from pydantic import BaseModel, field_validator

PAD = "<pad>"
UNK = "<unk>"
PAD_ID = 0
UNK_ID = 1


class Vocabulary(BaseModel):
    """Token list in index order; index 0 is padding, index 1 is unknown."""

    tokens: list[str]

    @field_validator("tokens")
    @classmethod
    def check_reserved(cls, value: list[str]) -> list[str]:
        if value[:2] != [PAD, UNK]:
            raise ValueError("Vocabulary must start with the padding and unknown tokens")
        if len(set(value)) != len(value):
            raise ValueError("Vocabulary tokens must be unique")
        return value

    @cached_property
    def index(self) -> dict[str, int]:
        return {token: i for i, token in enumerate(self.tokens)}

    def lookup(self, token: str) -> int:
        """Index of a token, or the unknown index."""
        return self.index.get(token, UNK_ID)

    def __len__(self) -> int:
        return len(self.tokens)
