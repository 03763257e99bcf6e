"""Parameterized building blocks: convolutions, batch norm, linear, and the
residual blocks used by both network sections.

Every layer exposes ``parameters()`` as (name, Tensor) pairs and, where
relevant, ``buffers()`` for non-trainable state (running statistics).
"""

from __future__ import annotations

import numpy as np

from . import autograd as ag
from .autograd import Tensor


class Conv2d:
    def __init__(self, kh: int, kw: int, cin: int, cout: int, stride: int,
                 rng: np.random.Generator, dtype=np.float32):
        std = np.sqrt(2.0 / (kh * kw * cin))
        self.weight = Tensor(rng.standard_normal((kh, kw, cin, cout)).astype(dtype) * dtype(std),
                             requires_grad=True)
        self.stride = stride

    def __call__(self, x: Tensor) -> Tensor:
        return ag.conv2d(x, self.weight, self.stride)

    def parameters(self):
        return [("w", self.weight)]

    def buffers(self):
        return []


class Conv1d:
    def __init__(self, k: int, cin: int, cout: int, stride: int,
                 rng: np.random.Generator, dtype=np.float32):
        std = np.sqrt(2.0 / (k * cin))
        self.weight = Tensor(rng.standard_normal((k, cin, cout)).astype(dtype) * dtype(std),
                             requires_grad=True)
        self.stride = stride

    def __call__(self, x: Tensor) -> Tensor:
        return ag.conv1d(x, self.weight, self.stride)

    def parameters(self):
        return [("w", self.weight)]

    def buffers(self):
        return []


class BatchNorm:
    """Per-channel batch normalization over all axes but the last.

    Training uses batch statistics and refreshes the running estimates
    (momentum 0.9); evaluation normalizes with the running estimates.
    """

    def __init__(self, channels: int, momentum: float = 0.9, eps: float = 1e-5,
                 dtype=np.float32):
        self.gamma = Tensor(np.ones(channels, dtype=dtype), requires_grad=True)
        self.beta = Tensor(np.zeros(channels, dtype=dtype), requires_grad=True)
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)
        self.momentum = momentum
        self.eps = eps

    def __call__(self, x: Tensor, train: bool) -> Tensor:
        axes = tuple(range(x.data.ndim - 1))
        eps = ag.constant(np.asarray(self.eps, dtype=x.data.dtype))
        if train:
            mu = ag.mean(x, axis=axes)
            centered = ag.sub(x, mu)
            var = ag.mean(ag.mul(centered, centered), axis=axes)
            m = self.momentum
            self.running_mean = (m * self.running_mean + (1 - m) * mu.data).astype(self.running_mean.dtype)
            self.running_var = (m * self.running_var + (1 - m) * var.data).astype(self.running_var.dtype)
        else:
            mu = ag.constant(self.running_mean.astype(x.data.dtype))
            centered = ag.sub(x, mu)
            var = ag.constant(self.running_var.astype(x.data.dtype))
        inv_std = ag.power(ag.add(var, eps), -0.5)
        normed = ag.mul(centered, inv_std)
        return ag.add(ag.mul(normed, self.gamma), self.beta)

    def parameters(self):
        return [("gamma", self.gamma), ("beta", self.beta)]

    def buffers(self):
        return [("running_mean", self.running_mean), ("running_var", self.running_var)]

    def set_buffer(self, name: str, value: np.ndarray):
        setattr(self, name, value.astype(getattr(self, name).dtype))


class Linear:
    def __init__(self, cin: int, cout: int, rng: np.random.Generator, dtype=np.float32):
        std = np.sqrt(1.0 / cin)
        self.weight = Tensor(rng.standard_normal((cin, cout)).astype(dtype) * dtype(std),
                             requires_grad=True)
        self.bias = Tensor(np.zeros(cout, dtype=dtype), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return ag.add(ag.matmul(x, self.weight), self.bias)

    def parameters(self):
        return [("w", self.weight), ("b", self.bias)]

    def buffers(self):
        return []


class _ResBlock:
    """conv-norm-relu-conv-norm plus a skip, ReLU after the addition.

    The skip is the identity when shapes match and a strided 1x1 (or
    1-tap) projection with its own norm otherwise.
    """

    def __init__(self, conv_cls, cin: int, cout: int, stride: int,
                 rng: np.random.Generator, dtype, kernel: int = 3):
        if conv_cls is Conv2d:
            self.conv1 = Conv2d(kernel, kernel, cin, cout, stride, rng, dtype)
            self.conv2 = Conv2d(kernel, kernel, cout, cout, 1, rng, dtype)
            self.proj = Conv2d(1, 1, cin, cout, stride, rng, dtype) \
                if (stride != 1 or cin != cout) else None
        else:
            self.conv1 = Conv1d(kernel, cin, cout, stride, rng, dtype)
            self.conv2 = Conv1d(kernel, cout, cout, 1, rng, dtype)
            self.proj = Conv1d(1, cin, cout, stride, rng, dtype) \
                if (stride != 1 or cin != cout) else None
        self.bn1 = BatchNorm(cout, dtype=dtype)
        self.bn2 = BatchNorm(cout, dtype=dtype)
        self.bn_proj = BatchNorm(cout, dtype=dtype) if self.proj is not None else None

    def __call__(self, x: Tensor, train: bool) -> Tensor:
        out = ag.relu(self.bn1(self.conv1(x), train))
        out = self.bn2(self.conv2(out), train)
        skip = x if self.proj is None else self.bn_proj(self.proj(x), train)
        return ag.relu(ag.add(out, skip))

    def parameters(self):
        named = []
        parts = [("conv1", self.conv1), ("bn1", self.bn1),
                 ("conv2", self.conv2), ("bn2", self.bn2)]
        if self.proj is not None:
            parts += [("proj", self.proj), ("bn_proj", self.bn_proj)]
        for prefix, part in parts:
            named += [(f"{prefix}.{n}", t) for n, t in part.parameters()]
        return named

    def buffers(self):
        named = []
        parts = [("bn1", self.bn1), ("bn2", self.bn2)]
        if self.bn_proj is not None:
            parts.append(("bn_proj", self.bn_proj))
        for prefix, part in parts:
            named += [(f"{prefix}.{n}", v) for n, v in part.buffers()]
        return named

    def modules(self):
        parts = {"bn1": self.bn1, "bn2": self.bn2}
        if self.bn_proj is not None:
            parts["bn_proj"] = self.bn_proj
        return parts


class ResBlock2d(_ResBlock):
    def __init__(self, cin, cout, stride, rng, dtype=np.float32):
        super().__init__(Conv2d, cin, cout, stride, rng, dtype)


class ResBlock1d(_ResBlock):
    def __init__(self, cin, cout, stride, rng, dtype=np.float32):
        super().__init__(Conv1d, cin, cout, stride, rng, dtype)
