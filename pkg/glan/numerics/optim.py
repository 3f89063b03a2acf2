"""Adam state and update step (bias-corrected, as in torch.optim.Adam)."""
from typing import Iterable, Mapping, Union

import torch

from glan.exceptions import DomainError


class AdamState:
    """Per-parameter moments, step counter and hyper-parameters."""

    def __init__(
        self,
        params: Union[Mapping[str, torch.Tensor], Iterable[tuple[str, torch.Tensor]]],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        """Initialize moments for the given named parameters."""
        self.params = dict(params.items() if isinstance(params, Mapping) else params)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.optimizer = torch.optim.Adam(
            list(self.params.values()), lr=lr, betas=(beta1, beta2), eps=eps
        )

    @property
    def lr(self) -> float:
        return self.optimizer.param_groups[0]["lr"]

    @lr.setter
    def lr(self, value: float) -> None:
        for group in self.optimizer.param_groups:
            group["lr"] = value

    def moments(self, name: str) -> tuple[torch.Tensor, torch.Tensor]:
        """First and second moment accumulators of a parameter (zeros before its first update)."""
        param = self.params[name]
        state = self.optimizer.state.get(param, {})
        if "exp_avg" not in state:
            return torch.zeros_like(param), torch.zeros_like(param)
        return state["exp_avg"], state["exp_avg_sq"]

    def zero_grad(self) -> None:
        self.optimizer.zero_grad(set_to_none=True)


def adam_step(
    state: AdamState, grads: Mapping[str, torch.Tensor]
) -> dict[str, torch.Tensor]:
    """
    Apply one Adam update.

    Parameters without an entry in `grads` are left untouched.

    Args:
        state: Optimizer state holding the parameters
        grads: Gradient per parameter name

    Returns:
        The updated parameters by name

    Raises:
        DomainError: If a gradient names an unknown parameter or mismatches its shape
    """
    for name, grad in grads.items():
        if name not in state.params:
            raise DomainError(f"Gradient for unknown parameter {name}")
        if grad.shape != state.params[name].shape:
            raise DomainError(
                f"Gradient shape {tuple(grad.shape)} does not match "
                f"parameter {name} {tuple(state.params[name].shape)}"
            )

    for name, param in state.params.items():
        grad = grads.get(name)
        param.grad = None if grad is None else grad.detach().to(param.dtype)

    state.optimizer.step()
    state.step += 1
    return state.params
