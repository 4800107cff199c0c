"""Convolution, transposed convolution and max pooling with gradients.

All kernels share one strategy: loop over the (small) set of kernel
positions and express each position as a strided slice, so the heavy
lifting is a handful of BLAS matmuls instead of Python-level loops over
pixels.  The same n-dimensional core serves both 2D and 3D convolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .tensor import (
    ConfigurationError,
    ShapeMismatchError,
    Tensor,
    _node,
    get_default_dtype,
)


def _axes_tuple(value, n: int, name: str) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,) * n
    t = tuple(int(v) for v in value)
    if len(t) != n:
        raise ConfigurationError(f"{name} needs {n} entries, got {t}")
    return t


@dataclass
class ConvSpec:
    """Parameters of one (possibly transposed) convolution layer.

    ``weights`` has shape (out_channels, in_channels, *kernel) for both the
    forward and the transposed direction.
    """

    in_channels: int
    out_channels: int
    kernel: tuple[int, ...]
    stride: tuple[int, ...]
    padding: tuple[int, ...]
    dilation: tuple[int, ...]
    weights: Tensor
    bias: Tensor

    def __post_init__(self):
        n = len(self.kernel)
        self.stride = _axes_tuple(self.stride, n, "stride")
        self.padding = _axes_tuple(self.padding, n, "padding")
        self.dilation = _axes_tuple(self.dilation, n, "dilation")
        if self.in_channels <= 0 or self.out_channels <= 0:
            raise ConfigurationError("channel counts must be positive")
        expected = (self.out_channels, self.in_channels) + tuple(self.kernel)
        if self.weights.shape != expected:
            raise ShapeMismatchError(
                f"weights shape {self.weights.shape} != {expected}")
        if self.bias.shape != (self.out_channels,):
            raise ShapeMismatchError(
                f"bias shape {self.bias.shape} != ({self.out_channels},)")

    @classmethod
    def create(cls, in_channels: int, out_channels: int, kernel, stride=1,
               padding=0, dilation=1, rng: np.random.Generator | None = None,
               dtype=None) -> "ConvSpec":
        """Build a spec with fan-in scaled Gaussian weights and zero bias."""
        kernel = (kernel,) if isinstance(kernel, int) else tuple(kernel)
        dtype = dtype or get_default_dtype()
        fan_in = in_channels * int(np.prod(kernel))
        std = float(np.sqrt(2.0 / fan_in))
        if rng is None:
            w = np.zeros((out_channels, in_channels) + kernel)
        else:
            w = rng.normal(0.0, std, (out_channels, in_channels) + kernel)
        return cls(
            in_channels=in_channels,
            out_channels=out_channels,
            kernel=kernel,
            stride=stride,
            padding=padding,
            dilation=dilation,
            weights=Tensor(w.astype(dtype), requires_grad=True),
            bias=Tensor(np.zeros(out_channels, dtype=dtype), requires_grad=True),
        )


def conv_output_extent(size: int, kernel: int, stride: int, padding: int,
                       dilation: int) -> int:
    return (size + 2 * padding - dilation * (kernel - 1) - 1) // stride + 1


def _check_input(x: Tensor, spec: ConvSpec, n_spatial: int, op: str) -> tuple:
    if x.ndim != 2 + n_spatial:
        raise ShapeMismatchError(
            f"{op} expects a (batch, channels, {n_spatial} spatial) tensor, "
            f"got shape {x.shape}")
    if x.shape[1] != spec.in_channels:
        raise ShapeMismatchError(
            f"{op}: input has {x.shape[1]} channels, spec expects {spec.in_channels}")
    return x.shape[2:]


def _conv_nd(x: Tensor, spec: ConvSpec, n_spatial: int, op: str) -> Tensor:
    spatial = _check_input(x, spec, n_spatial, op)
    out_spatial = tuple(
        conv_output_extent(s, k, st, p, d)
        for s, k, st, p, d in
        zip(spatial, spec.kernel, spec.stride, spec.padding, spec.dilation))
    if any(e < 1 for e in out_spatial):
        raise ConfigurationError(
            f"{op}: computed output extent {out_spatial} from input {spatial} "
            f"kernel={spec.kernel} stride={spec.stride} padding={spec.padding} "
            f"dilation={spec.dilation}")

    w, b = spec.weights, spec.bias
    batch = x.shape[0]
    n_out = int(np.prod(out_spatial))
    pads = ((0, 0), (0, 0)) + tuple((p, p) for p in spec.padding)
    xp = np.pad(x.data, pads) if any(spec.padding) else x.data

    def pos_slices(pos):
        return tuple(
            slice(pos[i] * spec.dilation[i],
                  pos[i] * spec.dilation[i] + out_spatial[i] * spec.stride[i],
                  spec.stride[i])
            for i in range(n_spatial))

    head = (slice(None), slice(None))
    acc = np.zeros((batch, spec.out_channels, n_out), dtype=x.data.dtype)
    for pos in product(*(range(k) for k in spec.kernel)):
        seg = xp[head + pos_slices(pos)].reshape(batch, spec.in_channels, n_out)
        acc += np.matmul(w.data[head + pos], seg)
    out_data = acc.reshape((batch, spec.out_channels) + out_spatial)
    out_data += b.data.reshape((1, spec.out_channels) + (1,) * n_spatial)

    out = _node(out_data, (x, w, b))
    if out.requires_grad:
        def bw():
            g3 = out.grad.reshape(batch, spec.out_channels, n_out)
            if b.requires_grad:
                b.accumulate_grad(g3.sum(axis=(0, 2)))
            need_x = x.requires_grad
            need_w = w.requires_grad
            dw = np.zeros_like(w.data) if need_w else None
            dxp = np.zeros_like(xp) if need_x else None
            for pos in product(*(range(k) for k in spec.kernel)):
                sl = head + pos_slices(pos)
                if need_w:
                    seg = xp[sl].reshape(batch, spec.in_channels, n_out)
                    dw[head + pos] += np.matmul(
                        g3, seg.transpose(0, 2, 1)).sum(axis=0)
                if need_x:
                    chunk = np.matmul(w.data[head + pos].T, g3)
                    dxp[sl] += chunk.reshape(
                        (batch, spec.in_channels) + out_spatial)
            if need_w:
                w.accumulate_grad(dw)
            if need_x:
                if any(spec.padding):
                    crop = head + tuple(
                        slice(p, p + s) for p, s in zip(spec.padding, spatial))
                    x.accumulate_grad(dxp[crop])
                else:
                    x.accumulate_grad(dxp)
        out._backward_fn = bw
    return out


def conv2d(x: Tensor, spec: ConvSpec) -> Tensor:
    """Cross-correlation over (batch, channels, H, W) with bias."""
    return _conv_nd(x, spec, 2, "conv2d")


def conv3d(x: Tensor, spec: ConvSpec) -> Tensor:
    """Cross-correlation over (batch, channels, D, H, W); padding may differ per axis."""
    return _conv_nd(x, spec, 3, "conv3d")


def conv_transpose2d(x: Tensor, spec: ConvSpec) -> Tensor:
    """Transposed convolution (gradient-of-convolution semantics).

    Output extent per axis is (in - 1) * stride - 2 * padding + kernel.
    """
    spatial = _check_input(x, spec, 2, "conv_transpose2d")
    if any(d != 1 for d in spec.dilation):
        raise ConfigurationError("conv_transpose2d supports dilation 1 only")
    full = tuple((s - 1) * st + k
                 for s, st, k in zip(spatial, spec.stride, spec.kernel))
    out_spatial = tuple(f - 2 * p for f, p in zip(full, spec.padding))
    if any(e < 1 for e in out_spatial):
        raise ConfigurationError(
            f"conv_transpose2d: output extent {out_spatial} from input {spatial} "
            f"kernel={spec.kernel} stride={spec.stride} padding={spec.padding}")

    w, b = spec.weights, spec.bias
    batch = x.shape[0]
    n_in = int(np.prod(spatial))
    head = (slice(None), slice(None))
    x3 = x.data.reshape(batch, spec.in_channels, n_in)

    def pos_slices(pos):
        return tuple(
            slice(pos[i], pos[i] + spatial[i] * spec.stride[i], spec.stride[i])
            for i in range(2))

    buf = np.zeros((batch, spec.out_channels) + full, dtype=x.data.dtype)
    for pos in product(*(range(k) for k in spec.kernel)):
        buf[head + pos_slices(pos)] += np.matmul(
            w.data[head + pos], x3).reshape((batch, spec.out_channels) + spatial)
    crop = head + tuple(slice(p, f - p) for p, f in zip(spec.padding, full))
    out_data = np.ascontiguousarray(buf[crop])
    out_data += b.data.reshape(1, spec.out_channels, 1, 1)

    out = _node(out_data, (x, w, b))
    if out.requires_grad:
        def bw():
            if b.requires_grad:
                b.accumulate_grad(out.grad.sum(axis=(0, 2, 3)))
            gfull = np.zeros((batch, spec.out_channels) + full,
                             dtype=out.grad.dtype)
            gfull[crop] = out.grad
            need_x = x.requires_grad
            need_w = w.requires_grad
            dx3 = np.zeros_like(x3) if need_x else None
            dw = np.zeros_like(w.data) if need_w else None
            for pos in product(*(range(k) for k in spec.kernel)):
                gseg = gfull[head + pos_slices(pos)].reshape(
                    batch, spec.out_channels, n_in)
                if need_x:
                    dx3 += np.matmul(w.data[head + pos].T, gseg)
                if need_w:
                    dw[head + pos] += np.matmul(
                        gseg, x3.transpose(0, 2, 1)).sum(axis=0)
            if need_x:
                x.accumulate_grad(dx3.reshape(x.data.shape))
            if need_w:
                w.accumulate_grad(dw)
        out._backward_fn = bw
    return out


def maxpool2d(x: Tensor, kernel, stride=None) -> Tensor:
    """Per-window maximum; gradient routes to the first argmax in row-major order."""
    if x.ndim != 4:
        raise ShapeMismatchError(f"maxpool2d expects (B, C, H, W), got {x.shape}")
    kernel = _axes_tuple(kernel, 2, "kernel")
    stride = kernel if stride is None else _axes_tuple(stride, 2, "stride")
    spatial = x.shape[2:]
    if any(k > s for k, s in zip(kernel, spatial)):
        raise ConfigurationError(
            f"maxpool2d window {kernel} exceeds input extents {spatial}")
    out_spatial = tuple(
        (s - k) // st + 1 for s, k, st in zip(spatial, kernel, stride))
    if any(e < 1 for e in out_spatial):
        raise ConfigurationError(
            f"maxpool2d: output extent {out_spatial} from {spatial}")

    head = (slice(None), slice(None))
    positions = list(product(range(kernel[0]), range(kernel[1])))

    def pos_slice(pos):
        return head + tuple(
            slice(pos[i], pos[i] + out_spatial[i] * stride[i], stride[i])
            for i in range(2))

    windows = np.stack([x.data[pos_slice(p)] for p in positions], axis=2)
    idx = windows.argmax(axis=2)
    out_data = np.take_along_axis(windows, idx[:, :, None], axis=2)[:, :, 0]

    out = _node(out_data, (x,))
    if out.requires_grad:
        def bw():
            dx = np.zeros_like(x.data)
            for flat, p in enumerate(positions):
                mask = idx == flat
                dx[pos_slice(p)] += out.grad * mask
            x.accumulate_grad(dx)
        out._backward_fn = bw
    return out
