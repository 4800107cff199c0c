"""Building blocks shared by the multi-view architectures.

Every module consumes and produces lists of tensors and can also map input
*shapes* to output shapes, so a network can be traced symbolically (for the
layer-table audits) with exactly the wiring used at runtime.
"""

from __future__ import annotations

import numpy as np

from ..engine import (
    BatchNormState,
    ConfigurationError,
    ConvSpec,
    Tensor,
    batchnorm,
    concat_channels,
    conv2d,
    conv3d,
    conv_output_extent,
    conv_transpose2d,
    get_default_dtype,
    leaky_relu,
    maxpool2d,
    softmax_channels,
)

LEAKY_SLOPE = 0.01


class Module:
    """Minimal layer interface: parameters, buffers, forward, shape rule."""

    def parameters(self):
        return ()

    def buffers(self):
        return ()

    def forward(self, xs: list[Tensor], training: bool) -> Tensor:
        raise NotImplementedError

    def out_shape(self, shapes: list[tuple]) -> tuple:
        raise NotImplementedError


def _single(xs):
    if len(xs) != 1:
        raise ConfigurationError(f"expected one input, got {len(xs)}")
    return xs[0]


class Conv(Module):
    """n-dimensional convolution (pointwise when kernel is all ones)."""

    def __init__(self, in_channels, out_channels, kernel, stride=1, padding=0,
                 dilation=1, rng=None):
        kernel = (kernel,) if isinstance(kernel, int) else tuple(kernel)
        self.spec = ConvSpec.create(in_channels, out_channels, kernel,
                                    stride=stride, padding=padding,
                                    dilation=dilation, rng=rng)
        self.n_spatial = len(kernel)

    def parameters(self):
        yield "weight", self.spec.weights
        yield "bias", self.spec.bias

    def forward(self, xs, training):
        x = _single(xs)
        return conv3d(x, self.spec) if self.n_spatial == 3 else conv2d(x, self.spec)

    def out_shape(self, shapes):
        shape = _single(shapes)
        spatial = shape[1:]
        out = tuple(conv_output_extent(s, k, st, p, d) for s, k, st, p, d in zip(
            spatial, self.spec.kernel, self.spec.stride, self.spec.padding,
            self.spec.dilation))
        return (self.spec.out_channels,) + out


class ConvTranspose(Module):
    """2D up-convolution; output extent = (in-1)*stride - 2*pad + kernel."""

    def __init__(self, in_channels, out_channels, kernel, stride, padding=0,
                 rng=None):
        self.spec = ConvSpec.create(in_channels, out_channels, kernel,
                                    stride=stride, padding=padding, rng=rng)

    def parameters(self):
        yield "weight", self.spec.weights
        yield "bias", self.spec.bias

    def forward(self, xs, training):
        return conv_transpose2d(_single(xs), self.spec)

    def out_shape(self, shapes):
        shape = _single(shapes)
        out = tuple((s - 1) * st - 2 * p + k for s, st, p, k in zip(
            shape[1:], self.spec.stride, self.spec.padding, self.spec.kernel))
        return (self.spec.out_channels,) + out


class MaxPool(Module):
    def __init__(self, kernel, stride=None):
        self.kernel = (kernel,) * 2 if isinstance(kernel, int) else tuple(kernel)
        self.stride = self.kernel if stride is None else (
            (stride,) * 2 if isinstance(stride, int) else tuple(stride))

    def forward(self, xs, training):
        return maxpool2d(_single(xs), self.kernel, self.stride)

    def out_shape(self, shapes):
        shape = _single(shapes)
        out = tuple((s - k) // st + 1 for s, k, st in zip(
            shape[1:], self.kernel, self.stride))
        return (shape[0],) + out


class BatchNorm(Module):
    def __init__(self, channels, eps=1e-5, momentum=0.1):
        dtype = get_default_dtype()
        self.gamma = Tensor(np.ones(channels, dtype=dtype), requires_grad=True)
        self.beta = Tensor(np.zeros(channels, dtype=dtype), requires_grad=True)
        self.state = BatchNormState(channels, eps=eps, momentum=momentum)

    def parameters(self):
        yield "gamma", self.gamma
        yield "beta", self.beta

    def buffers(self):
        yield "running_mean", self.state.running_mean
        yield "running_var", self.state.running_var

    def load_buffer(self, name, value):
        setattr(self.state, name, value.astype(np.float64))

    def forward(self, xs, training):
        return batchnorm(_single(xs), self.gamma, self.beta, self.state, training)

    def out_shape(self, shapes):
        return _single(shapes)


class ConvBlock(Module):
    """Two (conv + BN + leaky ReLU) sequences, 2D or 3D."""

    def __init__(self, in_channels, out_channels, kernel, padding, rng):
        self.conv1 = Conv(in_channels, out_channels, kernel, padding=padding, rng=rng)
        self.bn1 = BatchNorm(out_channels)
        self.conv2 = Conv(out_channels, out_channels, kernel, padding=padding, rng=rng)
        self.bn2 = BatchNorm(out_channels)

    def parameters(self):
        for tag, sub in (("conv1", self.conv1), ("bn1", self.bn1),
                         ("conv2", self.conv2), ("bn2", self.bn2)):
            for name, p in sub.parameters():
                yield f"{tag}.{name}", p

    def buffers(self):
        for tag, sub in (("bn1", self.bn1), ("bn2", self.bn2)):
            for name, b in sub.buffers():
                yield f"{tag}.{name}", b

    def load_buffer(self, name, value):
        tag, sub = name.split(".", 1)
        getattr(self, tag).load_buffer(sub, value)

    def forward(self, xs, training):
        x = _single(xs)
        x = leaky_relu(self.bn1.forward([self.conv1.forward([x], training)], training),
                       LEAKY_SLOPE)
        x = leaky_relu(self.bn2.forward([self.conv2.forward([x], training)], training),
                       LEAKY_SLOPE)
        return x

    def out_shape(self, shapes):
        shape = self.conv1.out_shape(shapes)
        return self.conv2.out_shape([shape])


class SqueezeDepth(Module):
    """Drop a depth axis that the temporal convolutions collapsed to 1."""

    def forward(self, xs, training):
        x = _single(xs)
        if x.shape[2] != 1:
            raise ConfigurationError(
                f"depth after temporal convolutions is {x.shape[2]}, expected 1")
        b, c, _, h, w = x.shape
        return x.reshape(b, c, h, w)

    def out_shape(self, shapes):
        shape = _single(shapes)
        if shape[1] != 1:
            raise ConfigurationError(
                f"depth after temporal convolutions is {shape[1]}, expected 1")
        return (shape[0],) + shape[2:]


class Concat(Module):
    """Channel concatenation of any number of same-extent maps."""

    def forward(self, xs, training):
        return concat_channels(list(xs))

    def out_shape(self, shapes):
        spatial = shapes[0][1:]
        for s in shapes[1:]:
            if s[1:] != spatial:
                raise ConfigurationError(f"concat spatial mismatch: {shapes}")
        return (sum(s[0] for s in shapes),) + spatial


class Softmax(Module):
    def forward(self, xs, training):
        return softmax_channels(_single(xs))

    def out_shape(self, shapes):
        return _single(shapes)


class Aspp(Module):
    """Atrous spatial pyramid pooling block.

    Five parallel 128-wide branches in the reference configuration: one
    pointwise convolution, three 3x3 convolutions with increasing dilation
    rates, and a global-average-pooling branch (pool, pointwise convolution,
    broadcast back).  The outputs are concatenated; the fusing pointwise
    convolution is a separate layer in the architecture tables.
    """

    def __init__(self, in_channels, branch_channels, rates=(6, 12, 18), rng=None):
        self.rates = tuple(rates)
        self.point = Conv(in_channels, branch_channels, (1, 1), rng=rng)
        self.dilated = [
            Conv(in_channels, branch_channels, (3, 3), padding=r, dilation=r, rng=rng)
            for r in self.rates
        ]
        self.pool_conv = Conv(in_channels, branch_channels, (1, 1), rng=rng)
        self.branch_channels = branch_channels

    def parameters(self):
        for name, p in self.point.parameters():
            yield f"point.{name}", p
        for i, conv in enumerate(self.dilated):
            for name, p in conv.parameters():
                yield f"dilated{i}.{name}", p
        for name, p in self.pool_conv.parameters():
            yield f"pool.{name}", p

    def forward(self, xs, training):
        x = _single(xs)
        branches = [self.point.forward([x], training)]
        branches += [conv.forward([x], training) for conv in self.dilated]
        pooled = x.mean(axis=(2, 3), keepdims=True)
        pooled = self.pool_conv.forward([pooled], training)
        branches.append(pooled.broadcast_to(branches[0].shape))
        return concat_channels(branches)

    def out_shape(self, shapes):
        shape = _single(shapes)
        return ((2 + len(self.rates)) * self.branch_channels,) + shape[1:]
