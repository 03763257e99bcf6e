"""Checkpoints: one RVDS blob per parameter / optimizer moment / buffer,
indexed by a JSON document carrying the model spec, step count, output
calibration, config fingerprint, and validation history."""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

from .. import rvds
from .model import HeartRateModel, ModelSpec
from .optim import AdamW

INDEX_NAME = "index.json"


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def config_fingerprint(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()[:16]


def save_checkpoint(out_dir: str | Path, model: HeartRateModel,
                    optimizer: AdamW | None = None,
                    extra: dict | None = None) -> Path:
    out_dir = Path(out_dir)
    (out_dir / "tensors").mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (name, t) in enumerate(model.parameters()):
        rel = f"tensors/p{i:03d}_{_slug(name)}.rvds"
        rvds.write_tensor(out_dir / rel, t.data)
        entry = {"name": name, "shape": list(t.data.shape), "file": rel}
        if optimizer is not None:
            m_rel = f"tensors/m{i:03d}_{_slug(name)}.rvds"
            v_rel = f"tensors/v{i:03d}_{_slug(name)}.rvds"
            rvds.write_tensor(out_dir / m_rel, optimizer.m[name])
            rvds.write_tensor(out_dir / v_rel, optimizer.v[name])
            entry["m_file"], entry["v_file"] = m_rel, v_rel
        entries.append(entry)
    buffers = []
    for i, (name, value) in enumerate(model.buffers()):
        rel = f"tensors/b{i:03d}_{_slug(name)}.rvds"
        rvds.write_tensor(out_dir / rel, np.asarray(value))
        buffers.append({"name": name, "file": rel})
    index = {
        "format": "radar-vitals-checkpoint",
        "model_spec": model.spec.to_dict(),
        "dtype": np.dtype(model.dtype).name,
        "output_offset": float(model.output_offset),
        "output_scale": float(model.output_scale),
        "step": optimizer.step_count if optimizer is not None else 0,
        "param_checksum": model.checksum(),
        "params": entries,
        "buffers": buffers,
    }
    if extra:
        index.update(extra)
    with open(out_dir / INDEX_NAME, "w") as fh:
        json.dump(index, fh, indent=1)
    return out_dir / INDEX_NAME


def load_checkpoint(ckpt_dir: str | Path, with_optimizer_state: bool = False):
    """Rebuild the model (and optionally optimizer moments) from disk.

    Returns (model, index_dict) or (model, index_dict, opt_state).
    """
    ckpt_dir = Path(ckpt_dir)
    with open(ckpt_dir / INDEX_NAME) as fh:
        index = json.load(fh)
    spec = ModelSpec.from_dict(index["model_spec"])
    model = HeartRateModel(spec, seed=0, dtype=np.dtype(index["dtype"]).type)
    model.output_offset = index.get("output_offset", 0.0)
    model.output_scale = index.get("output_scale", 1.0)
    params = dict(model.parameters())
    for entry in index["params"]:
        data = rvds.read_tensor(ckpt_dir / entry["file"])
        t = params[entry["name"]]
        if tuple(data.shape) != tuple(t.data.shape):
            raise ValueError(
                f"checkpoint tensor {entry['name']} has shape {data.shape}, "
                f"model expects {t.data.shape}")
        t.data = data.astype(model.dtype)
    for entry in index.get("buffers", []):
        model.set_buffer(entry["name"], rvds.read_tensor(ckpt_dir / entry["file"]))
    stored = index.get("param_checksum")
    if stored is not None and model.checksum() != stored:
        raise ValueError(f"checkpoint {ckpt_dir} is corrupt: parameter checksum mismatch")
    if not with_optimizer_state:
        return model, index
    state = {"step": index.get("step", 0), "m": {}, "v": {}}
    for entry in index["params"]:
        if "m_file" in entry:
            state["m"][entry["name"]] = rvds.read_tensor(ckpt_dir / entry["m_file"])
            state["v"][entry["name"]] = rvds.read_tensor(ckpt_dir / entry["v_file"])
    return model, index, state
