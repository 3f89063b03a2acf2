"""Differentiable numeric core shared by all layers."""
from glan.numerics.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from glan.numerics.functional import dtype_for, elu, leaky_relu, sigmoid, softmax
from glan.numerics.gradcheck import GradCheckReport, grad_check
from glan.numerics.optim import AdamState, adam_step

__all__ = [
    "AdamState",
    "Checkpoint",
    "GradCheckReport",
    "adam_step",
    "dtype_for",
    "elu",
    "grad_check",
    "leaky_relu",
    "load_checkpoint",
    "save_checkpoint",
    "sigmoid",
    "softmax",
]
