"""Minimal dense tensor engine with reverse-mode autodiff."""

from .tensor import (
    ConfigurationError,
    EngineError,
    ShapeMismatchError,
    Tensor,
    concat_channels,
    default_dtype,
    get_default_dtype,
    grad_enabled,
    leaky_relu,
    no_grad,
    set_default_dtype,
    softmax_channels,
)
from .conv import ConvSpec, conv2d, conv3d, conv_output_extent, conv_transpose2d, maxpool2d
from .norm import BatchNormState, batchnorm
from .gradcheck import grad_check

__all__ = [
    "BatchNormState",
    "ConfigurationError",
    "ConvSpec",
    "EngineError",
    "ShapeMismatchError",
    "Tensor",
    "batchnorm",
    "concat_channels",
    "conv2d",
    "conv3d",
    "conv_output_extent",
    "conv_transpose2d",
    "default_dtype",
    "get_default_dtype",
    "grad_check",
    "grad_enabled",
    "leaky_relu",
    "maxpool2d",
    "no_grad",
    "set_default_dtype",
    "softmax_channels",
]
