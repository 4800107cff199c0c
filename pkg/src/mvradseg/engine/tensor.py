"""Dense tensor type with reverse-mode automatic differentiation.

Values are stored as contiguous numpy arrays (float32 for training, float64
for gradient checking; see :func:`set_default_dtype`).  Every differentiable
operation builds a closure that scatters the output gradient back onto its
inputs; :meth:`Tensor.backward` runs the closures in reverse topological
order.  The op set is intentionally small: exactly what encoder-decoder
segmentation networks and their losses need.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


class EngineError(Exception):
    """Base class for tensor-engine failures."""


class ShapeMismatchError(EngineError):
    """Operands have incompatible extents."""


class ConfigurationError(EngineError):
    """An operation was configured so that no valid output exists."""


_FLOAT_DTYPES = (np.float32, np.float64)
_default_dtype = np.float32
_grad_enabled = True


def set_default_dtype(dtype) -> None:
    """Select the build mode: float32 for training, float64 for grad checks."""
    dt = np.dtype(dtype).type
    if dt not in _FLOAT_DTYPES:
        raise ConfigurationError(f"default dtype must be float32 or float64, got {dtype}")
    global _default_dtype
    _default_dtype = dt


def get_default_dtype():
    return _default_dtype


@contextmanager
def default_dtype(dtype):
    """Temporarily switch build mode (used by tests and gradcheck)."""
    prev = _default_dtype
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(prev)


def grad_enabled() -> bool:
    return _grad_enabled


@contextmanager
def no_grad():
    """Disable graph construction (evaluation, parameter updates)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce a gradient back to ``shape`` after numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    """N-dimensional dense array, optionally participating in the gradient tape."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data)
        if dtype is not None:
            arr = np.ascontiguousarray(arr, dtype=dtype)
        elif arr.dtype.type not in _FLOAT_DTYPES:
            arr = np.ascontiguousarray(arr, dtype=_default_dtype)
        else:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._parents: tuple = ()
        self._backward_fn = None

    # ------------------------------------------------------------------ basics

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{flag})"

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeMismatchError(f"item() needs a single element, shape is {self.shape}")
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, g: np.ndarray) -> None:
        g = _unbroadcast(np.asarray(g, dtype=self.data.dtype), self.data.shape)
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype)
        else:
            self.grad += g

    # ---------------------------------------------------------------- backward

    def backward(self) -> None:
        """Reverse-mode sweep from a scalar output.

        Frees the recorded graph afterwards so long training loops do not
        accumulate closures across steps.
        """
        if self.data.size != 1:
            raise ShapeMismatchError("backward() requires a scalar output tensor")
        topo: list[Tensor] = []
        seen = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward_fn is not None:
                node._backward_fn()
        for node in topo:
            node._backward_fn = None
            node._parents = ()

    # ------------------------------------------------------------- arithmetic

    def __add__(self, other):
        other = _as_tensor(other, self.data.dtype)
        out = _node(self.data + other.data, (self, other))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad)
                other.accumulate_grad(out.grad)
            out._backward_fn = bw
        return out

    __radd__ = __add__

    def __neg__(self):
        out = _node(-self.data, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(-out.grad)
            out._backward_fn = bw
        return out

    def __sub__(self, other):
        other = _as_tensor(other, self.data.dtype)
        out = _node(self.data - other.data, (self, other))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad)
                other.accumulate_grad(-out.grad)
            out._backward_fn = bw
        return out

    def __rsub__(self, other):
        return _as_tensor(other, self.data.dtype) - self

    def __mul__(self, other):
        other = _as_tensor(other, self.data.dtype)
        out = _node(self.data * other.data, (self, other))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad * other.data)
                other.accumulate_grad(out.grad * self.data)
            out._backward_fn = bw
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_tensor(other, self.data.dtype)
        out = _node(self.data / other.data, (self, other))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad / other.data)
                other.accumulate_grad(-out.grad * self.data / (other.data * other.data))
            out._backward_fn = bw
        return out

    def __rtruediv__(self, other):
        return _as_tensor(other, self.data.dtype) / self

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise ConfigurationError("only scalar exponents are supported")
        out = _node(self.data ** exponent, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad * exponent * self.data ** (exponent - 1))
            out._backward_fn = bw
        return out

    def log(self):
        out = _node(np.log(self.data), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad / self.data)
            out._backward_fn = bw
        return out

    def clamp_min(self, floor: float):
        """Elementwise max(x, floor); gradient passes only where x > floor."""
        mask = self.data > floor
        out = _node(np.where(mask, self.data, floor), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad * mask)
            out._backward_fn = bw
        return out

    # -------------------------------------------------------------- reductions

    def sum(self, axis=None, keepdims: bool = False):
        out = _node(self.data.sum(axis=axis, keepdims=keepdims), (self,))
        if out.requires_grad:
            shape = self.data.shape

            def bw():
                g = out.grad
                if axis is not None and not keepdims:
                    g = np.expand_dims(g, axis)
                self.accumulate_grad(np.broadcast_to(g, shape))
            out._backward_fn = bw
        return out

    def mean(self, axis=None, keepdims: bool = False):
        count = self.data.size if axis is None else np.prod(
            [self.data.shape[a] for a in np.atleast_1d(axis)])
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / float(count))

    def max(self, axis: int, keepdims: bool = False):
        """Maximum along one axis; gradient routes to the first argmax."""
        idx = np.argmax(self.data, axis=axis)
        values = np.take_along_axis(self.data, np.expand_dims(idx, axis), axis=axis)
        out_data = values if keepdims else np.squeeze(values, axis=axis)
        out = _node(out_data, (self,))
        if out.requires_grad:
            def bw():
                g = out.grad if keepdims else np.expand_dims(out.grad, axis)
                buf = np.zeros_like(self.data)
                np.put_along_axis(buf, np.expand_dims(idx, axis), g, axis=axis)
                self.accumulate_grad(buf)
            out._backward_fn = bw
        return out

    # ------------------------------------------------------------------- shape

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = _node(self.data.reshape(shape), (self,))
        if out.requires_grad:
            original = self.data.shape

            def bw():
                self.accumulate_grad(out.grad.reshape(original))
            out._backward_fn = bw
        return out

    def broadcast_to(self, shape):
        out = _node(np.broadcast_to(self.data, shape).copy(), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate_grad(out.grad)
            out._backward_fn = bw
        return out


def _as_tensor(value, dtype) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=dtype))


def _node(data: np.ndarray, parents: tuple) -> Tensor:
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out._backward_fn = None
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
    else:
        out.requires_grad = False
        out._parents = ()
    return out


# ----------------------------------------------------------------- activations


def leaky_relu(x: Tensor, slope: float = 0.01) -> Tensor:
    """max(x, slope*x); the subgradient at exactly 0 is ``slope``."""
    positive = x.data > 0
    out = _node(np.where(positive, x.data, slope * x.data), (x,))
    if out.requires_grad:
        def bw():
            x.accumulate_grad(out.grad * np.where(positive, 1.0, slope))
        out._backward_fn = bw
    return out


def softmax_channels(x: Tensor) -> Tensor:
    """Softmax over axis 1, computed with max-subtraction for stability."""
    if x.ndim < 2:
        raise ShapeMismatchError("softmax_channels expects at least (batch, channels)")
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    out = _node(p, (x,))
    if out.requires_grad:
        def bw():
            g = out.grad
            dot = (g * p).sum(axis=1, keepdims=True)
            x.accumulate_grad(p * (g - dot))
        out._backward_fn = bw
    return out


def concat_channels(xs: list[Tensor]) -> Tensor:
    """Concatenate along the channel axis; gradient splits back per input."""
    if not xs:
        raise ShapeMismatchError("concat_channels needs at least one tensor")
    ref = xs[0].shape
    for t in xs[1:]:
        if t.ndim != len(ref) or t.shape[0] != ref[0] or t.shape[2:] != ref[2:]:
            raise ShapeMismatchError(
                f"concat_channels extents differ: {t.shape} vs {ref}")
    out = _node(np.concatenate([t.data for t in xs], axis=1), tuple(xs))
    if out.requires_grad:
        sizes = [t.shape[1] for t in xs]

        def bw():
            start = 0
            for t, c in zip(xs, sizes):
                t.accumulate_grad(out.grad[:, start:start + c])
                start += c
        out._backward_fn = bw
    return out
