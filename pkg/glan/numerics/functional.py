"""Softmax and the activations used by the model.

Each function accepts a Python float or a tensor and returns the same kind.
"""
from typing import Optional, Sequence, Union

import torch
import torch.nn.functional as F

from glan.exceptions import DomainError

Real = Union[float, torch.Tensor]

LEAKY_SLOPE = 0.2


def dtype_for(precision: int) -> torch.dtype:
    """Map a 32/64 precision flag to a torch dtype."""
    if precision == 64:
        return torch.float64
    if precision == 32:
        return torch.float32
    raise DomainError(f"Unsupported precision {precision}")


def _apply(fn, x: Real) -> Real:
    if isinstance(x, torch.Tensor):
        return fn(x)
    return float(fn(torch.tensor(float(x), dtype=torch.float64)))


def softmax(
    v: Union[torch.Tensor, Sequence[float]],
    dim: int = -1,
    mask: Optional[torch.Tensor] = None,
) -> torch.Tensor:
    """
    Normalize scores into a probability vector along `dim`.

    Uses max-subtraction, so the result is invariant to adding a constant.
    Positions where `mask` is False get exactly zero weight.

    Args:
        v: Scores (tensor or list of floats)
        dim: Dimension to normalize over
        mask: Optional boolean tensor broadcastable to `v`, True = keep

    Returns:
        Tensor of the same shape whose slices along `dim` sum to 1

    Raises:
        DomainError: If the normalized dimension is empty or a slice is fully masked
    """
    if not isinstance(v, torch.Tensor):
        v = torch.tensor(list(v), dtype=torch.float64)
    if v.dim() == 0 or v.shape[dim] == 0:
        raise DomainError("softmax of an empty vector")
    if mask is not None:
        if not bool(torch.broadcast_to(mask, v.shape).any(dim=dim).all()):
            raise DomainError("softmax over a fully masked vector")
        v = v.masked_fill(~mask, float("-inf"))
    shifted = v - v.amax(dim=dim, keepdim=True).detach()
    weights = torch.exp(shifted)
    return weights / weights.sum(dim=dim, keepdim=True)


def leaky_relu(x: Real, slope: float = LEAKY_SLOPE) -> Real:
    """x for x >= 0, slope * x otherwise."""
    return _apply(lambda t: F.leaky_relu(t, negative_slope=slope), x)


def elu(x: Real) -> Real:
    """x for x >= 0, exp(x) - 1 otherwise."""
    return _apply(F.elu, x)


def sigmoid(x: Real) -> Real:
    return _apply(torch.sigmoid, x)
