"""Central-difference verification of analytic gradients."""
import logging
from typing import Callable, Iterable, Mapping, Optional

import torch
from pydantic import BaseModel, Field

from glan.exceptions import DomainError

logger = logging.getLogger(__name__)


class GradCheckReport(BaseModel):
    """Outcome of one gradient check."""

    valid: bool = True
    passed: bool
    max_rel_error: float
    worst_entry: Optional[str] = None
    checked: int = 0
    flagged: list[str] = Field(default_factory=list)
    tolerance: float
    reason: Optional[str] = None


def grad_check(
    loss_fn: Callable[[], torch.Tensor],
    params: Mapping[str, torch.Tensor],
    eps: float = 1e-5,
    tolerance: float = 1e-4,
    kink_tol: float = 1e-4,
    exclude: Optional[Mapping[str, Iterable[int]]] = None,
) -> GradCheckReport:
    """
    Compare autograd gradients with central differences, entry by entry.

    The error of an entry is |analytic - numeric| / max(1, |numeric|). Entries
    whose one-sided differences disagree by more than `kink_tol` sit on a
    non-differentiable point; they are flagged and left out of the maximum.

    Args:
        loss_fn: Zero-argument function returning a scalar loss
        params: Named float64 leaf tensors that loss_fn depends on
        eps: Perturbation size, in [1e-6, 1e-3]
        tolerance: Pass threshold on the maximum relative error
        kink_tol: Threshold on |forward - backward| difference quotients
        exclude: Flat entry indices to skip per parameter, e.g. a fixed padding row

    Returns:
        GradCheckReport

    Raises:
        DomainError: If eps is out of range or a parameter is not float64
    """
    if not 1e-6 <= eps <= 1e-3:
        raise DomainError(f"eps={eps} outside [1e-6, 1e-3]")
    for name, param in params.items():
        if param.dtype != torch.float64:
            raise DomainError(f"Parameter {name} is {param.dtype}; gradient checks need float64")

    names = list(params)
    skipped = {name: set(indices) for name, indices in (exclude or {}).items()}
    tensors = [params[name] for name in names]

    loss = loss_fn()
    if loss.dim() != 0 and loss.numel() != 1:
        raise DomainError("loss_fn must return a scalar")
    analytic = torch.autograd.grad(loss.reshape(()), tensors, allow_unused=True)
    base = float(loss.detach())

    with torch.no_grad():
        again = float(loss_fn())
    if again != base:
        return GradCheckReport(
            valid=False,
            passed=False,
            max_rel_error=float("nan"),
            tolerance=tolerance,
            reason=f"loss_fn is not deterministic ({base!r} then {again!r})",
        )

    max_error = 0.0
    worst: Optional[str] = None
    checked = 0
    flagged: list[str] = []
    with torch.no_grad():
        for name, tensor, grad in zip(names, tensors, analytic):
            flat = tensor.detach().view(-1)
            grad_flat = (
                torch.zeros_like(flat) if grad is None else grad.detach().reshape(-1)
            )
            for index in range(flat.numel()):
                if index in skipped.get(name, ()):
                    continue
                original = float(flat[index])
                flat[index] = original + eps
                plus = float(loss_fn())
                flat[index] = original - eps
                minus = float(loss_fn())
                flat[index] = original

                numeric = (plus - minus) / (2 * eps)
                scale = max(1.0, abs(numeric))
                forward = (plus - base) / eps
                backward = (base - minus) / eps
                entry = f"{name}[{index}]"
                if abs(forward - backward) > kink_tol * scale:
                    flagged.append(entry)
                    continue

                error = abs(float(grad_flat[index]) - numeric) / scale
                checked += 1
                if error > max_error:
                    max_error = error
                    worst = entry

    if flagged:
        logger.warning("Gradient check skipped %d kink entries", len(flagged))
    logger.debug("Gradient check over %d entries, max relative error %.3e", checked, max_error)
    return GradCheckReport(
        passed=max_error <= tolerance,
        max_rel_error=max_error,
        worst_entry=worst,
        checked=checked,
        flagged=flagged,
        tolerance=tolerance,
    )
