"""Finite-difference oracle for verifying reverse-mode gradients."""

from __future__ import annotations

import numpy as np

from .tensor import ConfigurationError, Tensor, no_grad


def grad_check(f, x: Tensor, eps: float = 1e-5, max_coords: int | None = None,
               rng: np.random.Generator | None = None) -> float:
    """Compare the tape gradient of ``f`` at ``x`` against central differences.

    ``f`` maps a tensor to a scalar tensor and must be re-evaluable (it is
    called twice per checked coordinate).  Requires the 64-bit build mode.
    Returns the worst relative error ``|a - b| / max(1e-8, |a| + |b|)``.
    When ``max_coords`` is given, a random subset of coordinates is checked
    (for large inputs such as whole-network checks).
    """
    if x.data.dtype != np.float64:
        raise ConfigurationError("grad_check requires float64 tensors")
    x.requires_grad = True
    x.grad = None
    out = f(x)
    if not isinstance(out, Tensor) or out.data.size != 1:
        raise ConfigurationError("grad_check needs a scalar-valued function")
    out.backward()
    analytic = x.grad.reshape(-1).copy()
    x.grad = None

    flat = x.data.reshape(-1)
    coords = np.arange(flat.size)
    if max_coords is not None and flat.size > max_coords:
        rng = rng or np.random.default_rng(0)
        coords = rng.choice(flat.size, size=max_coords, replace=False)

    worst = 0.0
    with no_grad():
        for i in coords:
            orig = flat[i]
            flat[i] = orig + eps
            f_plus = float(f(x).data.reshape(()))
            flat[i] = orig - eps
            f_minus = float(f(x).data.reshape(()))
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * eps)
            err = abs(analytic[i] - numeric) / max(1e-8, abs(analytic[i]) + abs(numeric))
            worst = max(worst, err)
    return worst
