"""Batch normalisation over the channel axis (works for 2D and 3D maps)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import ShapeMismatchError, Tensor, _node, grad_enabled


@dataclass
class BatchNormState:
    """Running statistics plus the two fixed constants of the layer."""

    channels: int
    eps: float = 1e-5
    momentum: float = 0.1
    running_mean: np.ndarray = field(default=None)
    running_var: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.running_mean is None:
            self.running_mean = np.zeros(self.channels, dtype=np.float64)
        if self.running_var is None:
            self.running_var = np.ones(self.channels, dtype=np.float64)


def batchnorm(x: Tensor, gamma: Tensor, beta: Tensor, state: BatchNormState,
              training: bool) -> Tensor:
    """Normalise per channel; batch statistics in training, running in eval.

    Running statistics are updated only when training with gradients enabled,
    so repeated no-grad evaluations (finite differences, validation) leave the
    state untouched.  The running variance uses the unbiased estimator.
    """
    if x.ndim < 3:
        raise ShapeMismatchError(f"batchnorm expects (B, C, ...), got {x.shape}")
    channels = x.shape[1]
    if channels != state.channels or gamma.shape != (channels,) or beta.shape != (channels,):
        raise ShapeMismatchError(
            f"batchnorm channel mismatch: input {channels}, state {state.channels}, "
            f"gamma {gamma.shape}, beta {beta.shape}")

    axes = (0,) + tuple(range(2, x.ndim))
    bshape = (1, channels) + (1,) * (x.ndim - 2)
    n = x.data.size // channels

    if training:
        mu = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        if grad_enabled():
            m = state.momentum
            unbiased = var * n / (n - 1) if n > 1 else var
            state.running_mean = (1 - m) * state.running_mean + m * mu.astype(np.float64)
            state.running_var = (1 - m) * state.running_var + m * unbiased.astype(np.float64)
    else:
        mu = state.running_mean.astype(x.data.dtype)
        var = state.running_var.astype(x.data.dtype)

    inv_std = 1.0 / np.sqrt(var + state.eps)
    xhat = (x.data - mu.reshape(bshape)) * inv_std.reshape(bshape)
    out_data = gamma.data.reshape(bshape) * xhat + beta.data.reshape(bshape)

    out = _node(out_data, (x, gamma, beta))
    if out.requires_grad:
        def bw():
            g = out.grad
            if beta.requires_grad:
                beta.accumulate_grad(g.sum(axis=axes))
            if gamma.requires_grad:
                gamma.accumulate_grad((g * xhat).sum(axis=axes))
            if x.requires_grad:
                scale = (gamma.data * inv_std).reshape(bshape)
                if training:
                    gm = g.mean(axis=axes).reshape(bshape)
                    gxm = (g * xhat).mean(axis=axes).reshape(bshape)
                    x.accumulate_grad(scale * (g - gm - xhat * gxm))
                else:
                    x.accumulate_grad(scale * g)
        out._backward_fn = bw
    return out
