"""Reverse-mode automatic differentiation over numpy arrays.

Just enough machinery for the heart-rate network: broadcast-aware
elementwise ops, matmul, strided same-padded convolutions (channels-last),
axis reductions, and reshape. Convolutions run as im2col matmuls so BLAS
does the heavy lifting; everything else is plain vectorized numpy.

Graphs are built eagerly; ``backward`` on a scalar output accumulates
gradients into every reachable Tensor with ``requires_grad``.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    """A numpy array plus a gradient slot and the tape edge that made it."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() expects a scalar output")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # convenience arithmetic (scalars are wrapped as constants)
    def _coerce(self, other) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=self.data.dtype))

    def __add__(self, other):
        return add(self, self._coerce(other))

    def __radd__(self, other):
        return add(self._coerce(other), self)

    def __sub__(self, other):
        return sub(self, self._coerce(other))

    def __rsub__(self, other):
        return sub(self._coerce(other), self)

    def __mul__(self, other):
        return mul(self, self._coerce(other))

    def __rmul__(self, other):
        return mul(self._coerce(other), self)

    def __truediv__(self, other):
        return div(self, self._coerce(other))

    def __neg__(self):
        return mul(self, Tensor(np.asarray(-1.0, dtype=self.data.dtype)))


def constant(data, dtype=None) -> Tensor:
    return Tensor(np.asarray(data, dtype=dtype))


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _node(data: np.ndarray, parents: tuple, backward) -> Tensor:
    out = Tensor(data, requires_grad=any(p.requires_grad for p in parents))
    if out.requires_grad:
        out._parents = parents
        out._backward = backward
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(g, b.data.shape))
    return _node(a.data + b.data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(-g, b.data.shape))
    return _node(a.data - b.data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, _unbroadcast(g * b.data, a.data.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.data.shape))
    return _node(a.data * b.data, (a, b), backward)


def div(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, _unbroadcast(g / b.data, a.data.shape))
        _accumulate(b, _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))
    return _node(a.data / b.data, (a, b), backward)


def power(a: Tensor, exponent: float) -> Tensor:
    out_data = a.data ** exponent

    def backward(g):
        _accumulate(a, g * exponent * a.data ** (exponent - 1.0))
    return _node(out_data, (a,), backward)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def backward(g):
        _accumulate(a, g * mask)
    return _node(a.data * mask, (a,), backward)


def absolute(a: Tensor) -> Tensor:
    sign = np.sign(a.data)

    def backward(g):
        _accumulate(a, g * sign)
    return _node(np.abs(a.data), (a,), backward)


def reshape(a: Tensor, shape: tuple) -> Tensor:
    def backward(g):
        _accumulate(a, g.reshape(a.data.shape))
    return _node(a.data.reshape(shape), (a,), backward)


def _norm_axes(axis, ndim: int) -> tuple:
    axes = axis if isinstance(axis, tuple) else (axis,)
    return tuple(sorted(ax % ndim for ax in axes))


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.mean(axis=axis, keepdims=keepdims)
    axes = None if axis is None else _norm_axes(axis, a.data.ndim)
    count = a.data.size if axes is None else int(np.prod([a.data.shape[ax] for ax in axes]))

    def backward(g):
        gk = g if keepdims or axes is None else np.expand_dims(g, axes)
        _accumulate(a, np.broadcast_to(gk, a.data.shape) / count)
    return _node(data, (a,), backward)


def sum_(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.sum(axis=axis, keepdims=keepdims)
    axes = None if axis is None else _norm_axes(axis, a.data.ndim)

    def backward(g):
        gk = g if keepdims or axes is None else np.expand_dims(g, axes)
        _accumulate(a, np.broadcast_to(gk, a.data.shape).copy())
    return _node(data, (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        _accumulate(a, g @ b.data.T)
        _accumulate(b, a.data.T @ g)
    return _node(a.data @ b.data, (a, b), backward)


def _same_pad(n: int, k: int, stride: int) -> tuple[int, int, int]:
    """Output size plus (before, after) padding for same-padded striding."""
    out = -(-n // stride)
    total = max((out - 1) * stride + k - n, 0)
    return out, total // 2, total - total // 2


def conv2d(x: Tensor, w: Tensor, stride: int = 1) -> Tensor:
    """Same-padded 2D cross-correlation.

    x[N, H, W, C] * w[KH, KW, C, F] -> [N, ceil(H/s), ceil(W/s), F].
    """
    n, h, wd, c = x.data.shape
    kh, kw, c2, f = w.data.shape
    if c != c2:
        raise ValueError(f"channel mismatch: input {c}, kernel {c2}")
    oh, pt, pb = _same_pad(h, kh, stride)
    ow, pl, pr = _same_pad(wd, kw, stride)
    xp = np.pad(x.data, ((0, 0), (pt, pb), (pl, pr), (0, 0)))
    cols = np.empty((n, oh, ow, kh, kw, c), dtype=x.data.dtype)
    for i in range(kh):
        hi = i + stride * (oh - 1) + 1
        for j in range(kw):
            wj = j + stride * (ow - 1) + 1
            cols[:, :, :, i, j, :] = xp[:, i:hi:stride, j:wj:stride, :]
    cols2 = cols.reshape(n * oh * ow, kh * kw * c)
    out = (cols2 @ w.data.reshape(kh * kw * c, f)).reshape(n, oh, ow, f)

    def backward(g):
        g2 = g.reshape(n * oh * ow, f)
        if w.requires_grad:
            _accumulate(w, (cols2.T @ g2).reshape(kh, kw, c, f))
        if x.requires_grad:
            dcols = (g2 @ w.data.reshape(kh * kw * c, f).T).reshape(n, oh, ow, kh, kw, c)
            dxp = np.zeros_like(xp)
            for i in range(kh):
                hi = i + stride * (oh - 1) + 1
                for j in range(kw):
                    wj = j + stride * (ow - 1) + 1
                    dxp[:, i:hi:stride, j:wj:stride, :] += dcols[:, :, :, i, j, :]
            _accumulate(x, dxp[:, pt:pt + h, pl:pl + wd, :])
    return _node(out, (x, w), backward)


def conv1d(x: Tensor, w: Tensor, stride: int = 1) -> Tensor:
    """Same-padded 1D cross-correlation.

    x[N, L, C] * w[K, C, F] -> [N, ceil(L/s), F].
    """
    n, length, c = x.data.shape
    k, c2, f = w.data.shape
    if c != c2:
        raise ValueError(f"channel mismatch: input {c}, kernel {c2}")
    ol, pl, pr = _same_pad(length, k, stride)
    xp = np.pad(x.data, ((0, 0), (pl, pr), (0, 0)))
    cols = np.empty((n, ol, k, c), dtype=x.data.dtype)
    for i in range(k):
        li = i + stride * (ol - 1) + 1
        cols[:, :, i, :] = xp[:, i:li:stride, :]
    cols2 = cols.reshape(n * ol, k * c)
    out = (cols2 @ w.data.reshape(k * c, f)).reshape(n, ol, f)

    def backward(g):
        g2 = g.reshape(n * ol, f)
        if w.requires_grad:
            _accumulate(w, (cols2.T @ g2).reshape(k, c, f))
        if x.requires_grad:
            dcols = (g2 @ w.data.reshape(k * c, f).T).reshape(n, ol, k, c)
            dxp = np.zeros_like(xp)
            for i in range(k):
                li = i + stride * (ol - 1) + 1
                dxp[:, i:li:stride, :] += dcols[:, :, i, :]
            _accumulate(x, dxp[:, pl:pl + length, :])
    return _node(out, (x, w), backward)


def l1_loss(pred: Tensor, target: np.ndarray, weights: np.ndarray | None = None) -> Tensor:
    """Mean absolute error; with weights, the weighted mean sum(w|e|)/sum(w)."""
    if pred.data.size == 0:
        raise ValueError("empty batch")
    err = absolute(sub(pred, constant(np.asarray(target, dtype=pred.data.dtype))))
    if weights is None:
        return mean(err)
    w = np.asarray(weights, dtype=pred.data.dtype)
    return sum_(mul(err, constant(w / w.sum())))


def l2_loss(pred: Tensor, target: np.ndarray, weights: np.ndarray | None = None) -> Tensor:
    """Mean squared error; with weights, the weighted mean."""
    if pred.data.size == 0:
        raise ValueError("empty batch")
    diff = sub(pred, constant(np.asarray(target, dtype=pred.data.dtype)))
    err = mul(diff, diff)
    if weights is None:
        return mean(err)
    w = np.asarray(weights, dtype=pred.data.dtype)
    return sum_(mul(err, constant(w / w.sum())))
