"""On-disk dataset layout: RVDS segment tensors plus a JSON manifest.

A dataset directory looks like

    manifest.json
    train/<subject>_seg000.rvds
    val/...
    test/...

The manifest records the radar configuration, the subject-level split
assignment, and one record per segment (file, subject, label, tags, valid
flag). ``stage`` is "raw" for simulator output and "features" after
preprocessing.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import rvds

MANIFEST_NAME = "manifest.json"


class ManifestError(ValueError):
    """Structurally invalid dataset manifest."""


@dataclass
class DatasetManifest:
    kind: str  # "fmcw" | "uwb"
    stage: str  # "raw" | "features"
    radar: dict
    splits: dict[str, list[str]]
    segments: list[dict]
    feature_config: dict | None = None
    root: str | None = None

    def split_segments(self, split: str, valid_only: bool = True) -> list[dict]:
        out = [s for s in self.segments if s["split"] == split]
        if valid_only:
            out = [s for s in out if s.get("valid", True)]
        return out

    def recall(self, split: str | None = None) -> float:
        """Detected fraction: valid segments over all segments."""
        segs = self.segments if split is None else [s for s in self.segments if s["split"] == split]
        if not segs:
            return 0.0
        return sum(1 for s in segs if s.get("valid", True)) / len(segs)


def save_manifest(manifest: DatasetManifest, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = asdict(manifest)
    doc.pop("root", None)
    path = out_dir / MANIFEST_NAME
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
    return path


def load_manifest(path: str | Path, check_files: bool = True) -> DatasetManifest:
    """Load and validate a manifest; ``path`` may be the file or its directory."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    with open(path) as fh:
        doc = json.load(fh)
    manifest = DatasetManifest(
        kind=doc["kind"], stage=doc["stage"], radar=doc["radar"],
        splits=doc["splits"], segments=doc["segments"],
        feature_config=doc.get("feature_config"), root=str(path.parent))
    validate_manifest(manifest, check_files=check_files)
    return manifest


def validate_manifest(manifest: DatasetManifest, check_files: bool = True) -> None:
    seen: dict[str, str] = {}
    for name, ids in manifest.splits.items():
        for sid in ids:
            if sid in seen and seen[sid] != name:
                raise ManifestError(f"subject {sid!r} appears in splits {seen[sid]!r} and {name!r}")
            seen[sid] = name
    root = Path(manifest.root) if manifest.root else None
    for seg in manifest.segments:
        if seg["subject_id"] not in seen:
            raise ManifestError(f"segment {seg['file']} references unknown subject {seg['subject_id']!r}")
        if seen[seg["subject_id"]] != seg["split"]:
            raise ManifestError(
                f"segment {seg['file']}: subject {seg['subject_id']!r} belongs to "
                f"{seen[seg['subject_id']]!r}, not {seg['split']!r}")
        if not np.isfinite(seg["label_hr"]) or seg["label_hr"] <= 0:
            raise ManifestError(f"segment {seg['file']}: non-positive HR label {seg['label_hr']}")
        if check_files and root is not None and not (root / seg["file"]).exists():
            raise ManifestError(f"missing segment file {seg['file']}")


def write_segment(out_dir: str | Path, rel_path: str, values: np.ndarray) -> Path:
    path = Path(out_dir) / rel_path
    rvds.write_tensor(path, values)
    return path


def read_segment(manifest: DatasetManifest, record: dict) -> np.ndarray:
    if manifest.root is None:
        raise ManifestError("manifest has no root directory; load it from disk first")
    return rvds.read_tensor(Path(manifest.root) / record["file"])


def worker_count() -> int:
    """Worker cap for parallel stages, from RADAR_VITALS_THREADS (default: cores)."""
    env = os.environ.get("RADAR_VITALS_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"RADAR_VITALS_THREADS must be an integer, got {env!r}")
        return max(1, n)
    return max(1, os.cpu_count() or 1)
