"""End-to-end preprocessing: simulated scenes (or stored raw segments)
through clutter removal, range FFT, presence detection, and feature
extraction into training-ready datasets.

Feature datasets keep the rows *before* min-max normalization so that
augmentations which resample the time axis can run per batch; ``FeatureDataset.normalized_inputs``
produces the [N, T, S, 1] model input.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import storage
from .dsp import RangeProfileCube, Segment, clutter_filter, downsample_uwb, range_fft, segment_stream
from .features import FeatureConfig, SegmentRejected, extract_feature_rows, normalize_rows
from .presence import CfarConfig, detect
from .radar import RadarSpec
from .simulate import SceneSpec, simulate_fmcw, simulate_uwb


@dataclass
class FeatureDataset:
    """Pre-normalization feature rows [N, S, T] plus labels and metadata."""

    rows: np.ndarray
    labels: np.ndarray
    subject_ids: np.ndarray
    tags: list[dict]
    recall: float = 1.0
    feature_config: FeatureConfig | None = None

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def spatial_size(self) -> int:
        return self.rows.shape[1]

    def normalized_inputs(self) -> np.ndarray:
        x = normalize_rows(self.rows)
        return np.ascontiguousarray(np.swapaxes(x, 1, 2))[..., None].astype(np.float32)

    def subset(self, idx) -> "FeatureDataset":
        idx = np.asarray(idx)
        return FeatureDataset(
            rows=self.rows[idx], labels=self.labels[idx],
            subject_ids=self.subject_ids[idx],
            tags=[self.tags[i] for i in idx], recall=self.recall,
            feature_config=self.feature_config)

    def first_fraction(self, fraction: float) -> "FeatureDataset":
        if not 0 < fraction <= 1:
            raise ValueError(f"train fraction must be in (0, 1], got {fraction}")
        n = max(1, int(np.ceil(fraction * len(self))))
        return self.subset(np.arange(n))


def segments_from_scene(scene: SceneSpec, spec: RadarSpec) -> list[Segment]:
    """Simulate one scene and run it through the front end to clutter-filtered
    30 Hz range-profile segments."""
    if spec.kind == "fmcw":
        cube = simulate_fmcw(scene, spec)
        stream = RangeProfileCube(values=cube.values, slow_time_rate=spec.slow_time_rate,
                                  spec=spec, truth_hr=cube.truth_hr,
                                  subject_id=cube.subject_id, tags=cube.tags)
        segments = segment_stream(stream)
        out = []
        for seg in segments:
            filtered = clutter_filter(seg.cube.values)
            profile = range_fft(filtered)
            seg.cube = RangeProfileCube(values=profile, slow_time_rate=spec.slow_time_rate,
                                        spec=spec, truth_hr=seg.cube.truth_hr,
                                        subject_id=seg.cube.subject_id,
                                        start_time=seg.cube.start_time, tags=seg.cube.tags)
            out.append(seg)
        return out
    cube = simulate_uwb(scene, spec)
    slow = downsample_uwb(cube.values, in_rate=spec.raw_rate, out_rate=spec.slow_time_rate)
    truth = np.full(slow.shape[-1], scene.heart_rate)  # constant-rate scenes
    stream = RangeProfileCube(values=slow, slow_time_rate=spec.slow_time_rate, spec=spec,
                              truth_hr=truth, subject_id=cube.subject_id, tags=cube.tags)
    segments = segment_stream(stream)
    for seg in segments:
        seg.cube.values = clutter_filter(seg.cube.values)
    return segments


def featurize_segment(segment: Segment, fcfg: FeatureConfig,
                      cfar: CfarConfig = CfarConfig()):
    """Presence detection plus feature rows for one clutter-filtered segment.

    Returns (rows, label, subject_id, tags) or None when the user was not
    detected (the segment is rejected and counted against recall).
    """
    result = detect(segment.cube.values, cfar)
    if not result.detected:
        return None
    rows = extract_feature_rows(segment.cube.values, result.bin_index, fcfg)
    return rows.astype(np.float32), segment.label_hr, segment.subject_id or "", dict(segment.tags)


def _collect(feature_results: list, fcfg: FeatureConfig) -> FeatureDataset:
    kept = [r for r in feature_results if r is not None]
    total = len(feature_results)
    if not kept:
        return FeatureDataset(rows=np.zeros((0, 0, 0), dtype=np.float32),
                              labels=np.zeros(0), subject_ids=np.asarray([], dtype=object),
                              tags=[], recall=0.0, feature_config=fcfg)
    rows = np.stack([r[0] for r in kept])
    return FeatureDataset(
        rows=rows,
        labels=np.array([r[1] for r in kept], dtype=np.float64),
        subject_ids=np.asarray([r[2] for r in kept], dtype=object),
        tags=[r[3] for r in kept],
        recall=len(kept) / total if total else 0.0,
        feature_config=fcfg)


def build_feature_dataset(scenes: list[SceneSpec], spec: RadarSpec,
                          fcfg: FeatureConfig, cfar: CfarConfig = CfarConfig(),
                          workers: int | None = None) -> FeatureDataset:
    """Simulate + preprocess + featurize a list of scenes (thread-parallel,
    deterministic regardless of scheduling)."""

    def one_scene(scene: SceneSpec):
        return [featurize_segment(seg, fcfg, cfar) for seg in segments_from_scene(scene, spec)]

    workers = workers or storage.worker_count()
    if workers > 1 and len(scenes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_scene = list(pool.map(one_scene, scenes))
    else:
        per_scene = [one_scene(s) for s in scenes]
    flat = [r for results in per_scene for r in results]
    return _collect(flat, fcfg)


def preprocess_manifest(manifest: storage.DatasetManifest, fcfg: FeatureConfig,
                        out_dir: str | Path, cfar: CfarConfig = CfarConfig()) -> storage.DatasetManifest:
    """Turn a raw segment dataset on disk into a feature dataset on disk.

    Raw FMCW segments go through clutter filter + range FFT; raw UWB
    segments (still at the 200 Hz capture rate) are downsampled and
    clutter-filtered. Rejected segments are recorded with valid=false and
    no feature file.
    """
    spec_d = manifest.radar
    out_dir = Path(out_dir)
    records = []
    for rec in manifest.segments:
        values = storage.read_segment(manifest, rec)
        if manifest.kind == "fmcw":
            profile = range_fft(clutter_filter(values.astype(np.float64)))
        else:
            slow = downsample_uwb(values.astype(np.complex128),
                                  in_rate=spec_d["raw_rate_hz"],
                                  out_rate=spec_d["slow_time_rate_hz"])
            profile = clutter_filter(slow)
        seg = Segment(cube=RangeProfileCube(values=profile,
                                            slow_time_rate=spec_d["slow_time_rate_hz"],
                                            subject_id=rec["subject_id"], tags=rec.get("tags", {})),
                      label_hr=rec["label_hr"])
        out_rec = dict(rec)
        feat = featurize_segment(seg, fcfg, cfar)
        if feat is None:
            out_rec["valid"] = False
            out_rec["file"] = ""
        else:
            rel = rec["file"].replace(".rvds", ".features.rvds")
            storage.write_segment(out_dir, rel, feat[0])
            out_rec["valid"] = True
            out_rec["file"] = rel
        records.append(out_rec)
    feature_config = {
        "num_range_bins": fcfg.num_range_bins,
        "antennas": list(fcfg.antennas) if isinstance(fcfg.antennas, tuple) else fcfg.antennas,
        "features": list(fcfg.features),
        "highpass_cutoff": fcfg.highpass_cutoff,
        "sg_order": fcfg.sg_order,
        "sg_window_s": fcfg.sg_window_s,
        "sample_rate": fcfg.sample_rate,
    }
    out = storage.DatasetManifest(kind=manifest.kind, stage="features", radar=manifest.radar,
                                  splits=manifest.splits, segments=records,
                                  feature_config=feature_config)
    storage.save_manifest(out, out_dir)
    out.root = str(out_dir)
    return out


def feature_datasets_from_raw(manifest: storage.DatasetManifest, fcfg: FeatureConfig,
                              cfar: CfarConfig = CfarConfig()) -> dict[str, FeatureDataset]:
    """Preprocess a raw on-disk dataset into in-memory feature datasets per split."""
    spec_d = manifest.radar
    by_split: dict[str, list] = {name: [] for name in manifest.splits}
    for rec in manifest.segments:
        values = storage.read_segment(manifest, rec)
        if manifest.kind == "fmcw":
            profile = range_fft(clutter_filter(values.astype(np.float64)))
        else:
            slow = downsample_uwb(values.astype(np.complex128),
                                  in_rate=spec_d["raw_rate_hz"],
                                  out_rate=spec_d["slow_time_rate_hz"])
            profile = clutter_filter(slow)
        seg = Segment(cube=RangeProfileCube(values=profile,
                                            slow_time_rate=spec_d["slow_time_rate_hz"],
                                            subject_id=rec["subject_id"],
                                            tags=rec.get("tags", {})),
                      label_hr=rec["label_hr"])
        by_split[rec["split"]].append(featurize_segment(seg, fcfg, cfar))
    return {name: _collect(results, fcfg) for name, results in by_split.items()}


def feature_config_from_manifest(manifest: storage.DatasetManifest) -> FeatureConfig:
    fc = manifest.feature_config
    if fc is None:
        raise ValueError("manifest has no feature_config (not a feature-stage dataset?)")
    antennas = fc["antennas"]
    if isinstance(antennas, list):
        antennas = tuple(antennas)
    return FeatureConfig(num_range_bins=fc["num_range_bins"], antennas=antennas,
                         features=tuple(fc["features"]), highpass_cutoff=fc["highpass_cutoff"],
                         sg_order=fc["sg_order"], sg_window_s=fc["sg_window_s"],
                         sample_rate=fc["sample_rate"])


def load_feature_dataset(manifest: storage.DatasetManifest, split: str) -> FeatureDataset:
    """Read one split of a feature-stage dataset into memory."""
    if manifest.stage != "features":
        raise ValueError("expected a feature-stage manifest")
    segs_all = [s for s in manifest.segments if s["split"] == split]
    results = []
    for rec in segs_all:
        if not rec.get("valid", True):
            results.append(None)
            continue
        rows = storage.read_segment(manifest, rec)
        results.append((rows.astype(np.float32), rec["label_hr"],
                        rec["subject_id"], rec.get("tags", {})))
    return _collect(results, feature_config_from_manifest(manifest))
