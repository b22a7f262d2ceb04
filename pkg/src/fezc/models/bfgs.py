"""Gradient accuracy needed for linear convergence of BFGS with inexact gradients."""

from __future__ import annotations

import math
import warnings

from ..errors import UsageError


class ToleranceConditionWarning(UserWarning):
    pass


def bfgs_gradient_tolerance(eps: float, kappa: float, g_norm: float) -> float:
    """Admissible gradient error ``eps * g_norm / sqrt(kappa)``.

    The convergence guarantee needs ``eps < 1/2``; larger values still return
    the bound but emit :class:`ToleranceConditionWarning`.
    """
    if not eps > 0:
        raise UsageError("eps must be positive")
    if not kappa >= 1:
        raise UsageError(f"condition number must be at least 1, got {kappa}")
    if not g_norm >= 0:
        raise UsageError("gradient norm must be nonnegative")
    if eps >= 0.5:
        warnings.warn(f"eps = {eps} >= 1/2: linear convergence is not guaranteed",
                      ToleranceConditionWarning, stacklevel=2)
    return eps * g_norm / math.sqrt(kappa)
