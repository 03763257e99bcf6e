"""The 2D+1D residual heart-rate regressor.

A strided 2D stem plus two strided 2D stages shrink time and space by 8x
each while features that started as neighbouring range bins and antennas
mix; the spatial axis is then collapsed by averaging, a strided 1D stem
plus four strided 1D stages shrink time by another 32x, the remaining
timesteps are averaged, and a single fully connected layer emits one HR
value per example (optionally affine-calibrated into bpm).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import autograd as ag
from .autograd import Tensor
from .layers import BatchNorm, Conv1d, Conv2d, Linear, ResBlock1d, ResBlock2d


@dataclass(frozen=True)
class ModelSpec:
    """Declarative network configuration. Stage entries are (blocks, filters, stride)."""

    stem2d_filters: int = 64
    stem2d_kernel: int = 3
    stem2d_stride: int = 2
    stages2d: tuple = ((2, 64, 2), (2, 128, 2))
    stem1d_filters: int = 128
    stem1d_kernel: int = 3
    stem1d_stride: int = 2
    stages1d: tuple = ((2, 128, 2), (2, 256, 2), (2, 512, 2), (2, 1024, 2))

    @property
    def embedding_width(self) -> int:
        return self.stages1d[-1][1]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stages2d"] = [list(s) for s in self.stages2d]
        d["stages1d"] = [list(s) for s in self.stages1d]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        d = dict(d)
        d["stages2d"] = tuple(tuple(s) for s in d["stages2d"])
        d["stages1d"] = tuple(tuple(s) for s in d["stages1d"])
        return cls(**d)


def paper_model_spec() -> ModelSpec:
    """Full-size configuration (~16M parameters)."""
    return ModelSpec()


def desk_model_spec() -> ModelSpec:
    """Slimmed configuration for laptop-scale experiments (~0.3M parameters)."""
    return ModelSpec(
        stem2d_filters=16,
        stages2d=((1, 16, 2), (1, 32, 2)),
        stem1d_filters=32,
        stages1d=((1, 32, 2), (1, 64, 2), (1, 128, 2), (1, 256, 2)),
    )


class NonFiniteActivation(RuntimeError):
    """A layer produced NaN/inf; the message names the layer."""


class HeartRateModel:
    """2D+1D residual network mapping [N, T, S, 1] features to HR per example."""

    def __init__(self, spec: ModelSpec | None = None, seed: int = 0, dtype=np.float32):
        self.spec = spec or ModelSpec()
        self.dtype = dtype
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 11]))
        s = self.spec
        self.stem2d = Conv2d(s.stem2d_kernel, s.stem2d_kernel, 1, s.stem2d_filters,
                             s.stem2d_stride, rng, dtype)
        self.stem2d_bn = BatchNorm(s.stem2d_filters, dtype=dtype)
        self.blocks2d: list[tuple[str, ResBlock2d]] = []
        cin = s.stem2d_filters
        for si, (blocks, filters, stride) in enumerate(s.stages2d):
            for bi in range(blocks):
                blk = ResBlock2d(cin, filters, stride if bi == 0 else 1, rng, dtype)
                self.blocks2d.append((f"stage2d{si}.block{bi}", blk))
                cin = filters
        self.stem1d = Conv1d(s.stem1d_kernel, cin, s.stem1d_filters, s.stem1d_stride, rng, dtype)
        self.stem1d_bn = BatchNorm(s.stem1d_filters, dtype=dtype)
        self.blocks1d: list[tuple[str, ResBlock1d]] = []
        cin = s.stem1d_filters
        for si, (blocks, filters, stride) in enumerate(s.stages1d):
            for bi in range(blocks):
                blk = ResBlock1d(cin, filters, stride if bi == 0 else 1, rng, dtype)
                self.blocks1d.append((f"stage1d{si}.block{bi}", blk))
                cin = filters
        self.head = Linear(cin, 1, rng, dtype)
        # affine output calibration in bpm, set by the training pipeline
        self.output_offset = 0.0
        self.output_scale = 1.0

    # -- forward ---------------------------------------------------------
    def forward(self, x: np.ndarray, train: bool = False,
                check_finite: bool = False) -> Tensor:
        """Run the network; returns a Tensor of per-example HR (bpm)."""
        def checked(name: str, t: Tensor) -> Tensor:
            if check_finite and not np.all(np.isfinite(t.data)):
                raise NonFiniteActivation(f"non-finite activation after layer {name!r}")
            return t

        x = np.asarray(x, dtype=self.dtype)
        if x.ndim != 4:
            raise ValueError(f"expected input [N, T, S, 1], got shape {x.shape}")
        h = ag.constant(x)
        h = checked("stem2d", ag.relu(self.stem2d_bn(self.stem2d(h), train)))
        for name, blk in self.blocks2d:
            h = checked(name, blk(h, train))
        h = ag.mean(h, axis=2)  # collapse the spatial axis
        h = checked("stem1d", ag.relu(self.stem1d_bn(self.stem1d(h), train)))
        for name, blk in self.blocks1d:
            h = checked(name, blk(h, train))
        h = ag.mean(h, axis=1)  # collapse the remaining time axis
        h = checked("head", ag.reshape(self.head(h), (x.shape[0],)))
        if self.output_scale != 1.0:
            h = ag.mul(h, ag.constant(np.asarray(self.output_scale, dtype=self.dtype)))
        if self.output_offset != 0.0:
            h = ag.add(h, ag.constant(np.asarray(self.output_offset, dtype=self.dtype)))
        return h

    def features_2d(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        """Output of the 2D section, for shape inspection: [N, T', S', C]."""
        h = ag.constant(np.asarray(x, dtype=self.dtype))
        h = ag.relu(self.stem2d_bn(self.stem2d(h), train))
        for _, blk in self.blocks2d:
            h = blk(h, train)
        return h.data

    def predict(self, x: np.ndarray, batch_size: int = 64) -> np.ndarray:
        """Batched evaluation-mode forward returning a float64 bpm array."""
        outs = []
        for lo in range(0, len(x), batch_size):
            outs.append(self.forward(x[lo:lo + batch_size], train=False).data)
        return np.concatenate(outs).astype(np.float64) if outs else np.zeros(0)

    # -- parameter plumbing ------------------------------------------------
    def _components(self):
        comps = [("stem2d", self.stem2d), ("stem2d_bn", self.stem2d_bn)]
        comps += self.blocks2d
        comps += [("stem1d", self.stem1d), ("stem1d_bn", self.stem1d_bn)]
        comps += self.blocks1d
        comps.append(("head", self.head))
        return comps

    def parameters(self) -> list[tuple[str, Tensor]]:
        named = []
        for prefix, comp in self._components():
            named += [(f"{prefix}.{n}", t) for n, t in comp.parameters()]
        return named

    def buffers(self) -> list[tuple[str, np.ndarray]]:
        named = []
        for prefix, comp in self._components():
            named += [(f"{prefix}.{n}", v) for n, v in comp.buffers()]
        return named

    def set_buffer(self, name: str, value: np.ndarray) -> None:
        # resolve "component.bn.buffer" or "component.buffer"
        for cname, comp in self._components():
            if name.startswith(cname + "."):
                tail = name[len(cname) + 1:]
                if isinstance(comp, BatchNorm):
                    comp.set_buffer(tail, value)
                    return
                bn_name, _, buf = tail.partition(".")
                comp.modules()[bn_name].set_buffer(buf, value)
                return
        raise KeyError(f"unknown buffer {name!r}")

    def parameter_count(self) -> int:
        return sum(t.data.size for _, t in self.parameters())

    def zero_grad(self) -> None:
        for _, t in self.parameters():
            t.grad = None

    def checksum(self) -> str:
        import hashlib
        h = hashlib.sha256()
        for name, t in self.parameters():
            h.update(name.encode())
            h.update(np.ascontiguousarray(t.data).tobytes())
        return h.hexdigest()
