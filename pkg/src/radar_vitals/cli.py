"""Command-line entry points tying the pipeline into reproducible runs.

    radar-vitals simulate   --config scenes.json --out data/raw
    radar-vitals preprocess --data data/raw --out data/feat --bins 1 --antennas 2
    radar-vitals train      --data data/feat --regime fmcw_full --out runs/fmcw
    radar-vitals finetune   --data data/uwb_feat --base-checkpoint runs/base --out runs/ft
    radar-vitals evaluate   --data data/feat --checkpoint runs/fmcw --out reports/fmcw
    radar-vitals ablate     --data data/raw --config ablate.json --out reports/ablate.csv

Exit codes: 0 success, 1 runtime failure, 2 usage / configuration error.
All randomness hangs off --seed; identical inputs and seed reproduce
outputs bit-exactly in single-threaded mode (RADAR_VITALS_THREADS=1).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import pipeline, storage
from .features import FEATURE_NAMES, FeatureConfig
from .nn.checkpoint import load_checkpoint
from .radar import preset as radar_preset
from .simulate import SceneSpec, make_dataset
from .train import (TrainConfig, ablation_suite, evaluate_dataset,
                    preset as train_preset, train as run_training)

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


# -- config helpers -----------------------------------------------------------

_SCENE_FIELDS = {
    "target_range", "respiration_rate", "heart_rate", "respiration_amplitude",
    "cardiac_amplitude", "drift_amplitude", "noise_std", "duration",
    "amplitude_modulation", "clutter_amplitude",
}
_SCENE_CHOICES = {"respiration_waveform"}


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")


def _draw(rng: np.random.Generator, value, name: str) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, list) and len(value) == 2:
        lo, hi = value
        return float(rng.uniform(lo, hi))
    raise ConfigError(f"scene.{name}: expected a number or [lo, hi] range, got {value!r}")


def scenes_from_config(config: dict, seed: int) -> tuple[list[SceneSpec], str, tuple]:
    """Build the scene list from a simulate config document."""
    radar = config.get("radar")
    if radar not in ("fmcw", "uwb"):
        raise ConfigError(f"radar: expected 'fmcw' or 'uwb', got {radar!r}")
    subjects = config.get("subjects")
    if not isinstance(subjects, int) or subjects < 1:
        raise ConfigError(f"subjects: expected a positive integer, got {subjects!r}")
    ratios = config.get("split_ratios", [0.6, 0.1, 0.3])
    if not (isinstance(ratios, list) and len(ratios) == 3):
        raise ConfigError(f"split_ratios: expected [train, val, test], got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split_ratios: must sum to 1, got {ratios}")
    scene_cfg = config.get("scene", {})
    unknown = set(scene_cfg) - _SCENE_FIELDS - _SCENE_CHOICES
    if unknown:
        raise ConfigError(f"scene: unknown field(s) {sorted(unknown)}")

    rng = np.random.default_rng(np.random.SeedSequence([seed, 23]))
    positions = config.get("positions", ["front", "lap"])
    sites = config.get("sites", ["site_a", "site_b", "site_c"])
    scenes = []
    for i in range(subjects):
        kwargs = {}
        for name, value in scene_cfg.items():
            if name in _SCENE_CHOICES:
                kwargs[name] = value
            else:
                kwargs[name] = _draw(rng, value, name)
        kwargs.setdefault("duration", float(config.get("duration_s", 60.0)))
        tags = {
            "position": positions[int(rng.integers(0, len(positions)))],
            "site": sites[int(rng.integers(0, len(sites)))],
        }
        try:
            scene = SceneSpec(rng_seed=int(seed * 100003 + i), subject_id=f"subj{i:04d}",
                              tags=tags, **kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scene: {exc}")
        scenes.append(scene)
    return scenes, radar, tuple(float(r) for r in ratios)


def _parse_antennas(text: str):
    if text in ("all", "pca"):
        return text
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"--antennas: expected 'all', 'pca', or indices like '0,2', got {text!r}")


def _parse_features(text: str) -> tuple:
    alias = {"angle": "unwrapped_angle", "unwrapped_angle": "unwrapped_angle",
             "magnitude": "magnitude"}
    names = []
    for p in text.split(","):
        if p not in alias:
            raise ConfigError(f"--features: unknown feature {p!r} (use angle, magnitude)")
        names.append(alias[p])
    return tuple(names)


# -- subcommands ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    config = _load_json(args.config)
    if args.preset:
        config["radar"] = args.preset
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    scenes, radar, ratios = scenes_from_config(config, seed)
    spec = radar_preset(radar)
    manifest = make_dataset(scenes, spec, ratios, args.out, seed=seed)
    counts = {name: len([s for s in manifest.segments if s["split"] == name])
              for name in manifest.splits}
    print(f"wrote {len(manifest.segments)} segments to {args.out}")
    for name, ids in manifest.splits.items():
        print(f"  {name}: {len(ids)} subjects, {counts[name]} segments")
    return 0


def _feature_config_from_args(args) -> FeatureConfig:
    return FeatureConfig(
        num_range_bins=args.bins,
        antennas=_parse_antennas(args.antennas),
        features=_parse_features(args.features),
        highpass_cutoff=args.highpass,
    )


def cmd_preprocess(args) -> int:
    manifest = storage.load_manifest(args.data)
    if manifest.stage != "raw":
        raise ConfigError(f"--data: expected a raw dataset, found stage {manifest.stage!r}")
    fcfg = _feature_config_from_args(args)
    out = pipeline.preprocess_manifest(manifest, fcfg, args.out)
    valid = sum(1 for s in out.segments if s["valid"])
    print(f"featurized {valid}/{len(out.segments)} segments "
          f"(recall {out.recall():.3f}) -> {args.out}")
    return 0


def _load_split_datasets(data_dir: str, splits=("train", "val", "test")) -> dict:
    manifest = storage.load_manifest(data_dir)
    if manifest.stage != "features":
        raise ConfigError(f"--data: expected a feature dataset, found stage {manifest.stage!r}")
    return {name: pipeline.load_feature_dataset(manifest, name) for name in splits}


def _train_config(args, regime: str) -> TrainConfig:
    cfg = train_preset(regime, scale="paper" if args.paper_scale else "desk")
    if args.steps is not None:
        cfg = replace(cfg, steps=args.steps)
    if args.batch_size is not None:
        cfg = replace(cfg, batch_size=args.batch_size)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _run_training(args, regime: str, base_checkpoint: str | None) -> int:
    datasets = _load_split_datasets(args.data)
    cfg = _train_config(args, regime)
    spatial = datasets["train"].spatial_size
    val = datasets["val"] if len(datasets["val"]) else None
    result = run_training(cfg, datasets["train"], val,
                          base_checkpoint=base_checkpoint, out_dir=args.out,
                          log=print if args.verbose else None)
    print(f"{regime}: {cfg.steps} steps, batch {cfg.batch_size}, S={spatial}")
    print(f"best val MAE {result.best_val_mae:.3f} bpm at step {result.best_step}; "
          f"checkpoint -> {args.out}")
    return 0


def cmd_train(args) -> int:
    if args.regime == "uwb_finetune":
        raise ConfigError("use the finetune subcommand for uwb_finetune")
    return _run_training(args, args.regime, None)


def cmd_finetune(args) -> int:
    if not Path(args.base_checkpoint).exists():
        raise ConfigError(f"--base-checkpoint: no checkpoint at {args.base_checkpoint}")
    return _run_training(args, "uwb_finetune", args.base_checkpoint)


def cmd_evaluate(args) -> int:
    datasets = _load_split_datasets(args.data, splits=(args.split,))
    ds = datasets[args.split]
    model, index = load_checkpoint(args.checkpoint)
    if ds.spatial_size == 0:
        raise ConfigError(f"--data: split {args.split!r} has no valid segments")
    trained_s = index.get("spatial_size")
    if trained_s is not None and trained_s != ds.spatial_size:
        raise ConfigError(
            f"feature-config mismatch: checkpoint expects S={trained_s}, "
            f"dataset provides S={ds.spatial_size}")
    report = evaluate_dataset(model, ds, subgroup_keys=["hr_band", "distance_band", "position", "site"],
                              seed=args.seed or 0, per_subject=args.per_subject)
    for line in report.summary_lines():
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
        pred = model.predict(ds.normalized_inputs())
        with open(out / "predictions.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["subject_id", "truth_bpm", "pred_bpm"])
            for sid, t, p in zip(ds.subject_ids, ds.labels, pred):
                writer.writerow([sid, f"{t:.4f}", f"{p:.4f}"])
        with open(out / "bland_altman.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mean_bpm", "diff_bpm"])
            for t, p in zip(ds.labels, pred):
                writer.writerow([f"{(p + t) / 2:.4f}", f"{p - t:.4f}"])
        print(f"report written to {out}")
    return 0


def cmd_ablate(args) -> int:
    config = _load_json(args.config)
    manifest = storage.load_manifest(args.data)
    if manifest.stage != "raw":
        raise ConfigError(f"--data: ablation needs a raw dataset, found {manifest.stage!r}")
    base_fcfg = FeatureConfig(
        num_range_bins=int(config.get("num_range_bins", 1)),
        antennas=_parse_antennas(str(config.get("antennas", "all"))),
        features=tuple(config.get("features", list(FEATURE_NAMES))),
    )
    regime = config.get("regime", "fmcw_full")
    cfg = train_preset(regime if regime != "uwb_finetune" else "uwb_scratch", scale="desk")
    cfg = replace(cfg, steps=int(config.get("steps", cfg.steps)),
                  seed=args.seed or 0)

    def featurize(fcfg: FeatureConfig):
        return pipeline.feature_datasets_from_raw(manifest, fcfg)

    rows = ablation_suite(
        featurize, base_fcfg, cfg,
        antenna_modes=[m if isinstance(m, str) else tuple(m)
                       for m in config.get("antenna_modes", [])],
        feature_sets=[tuple(f) for f in config.get("feature_sets", [])],
        bin_counts=config.get("bin_counts", []),
        train_fractions=config.get("train_fractions", []),
        log=print if args.verbose else None)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "cell", "mae", "ci_lo", "ci_hi", "n", "absent", "error"])
        for row in rows:
            ci = row.get("mae_ci") or ["", ""]
            writer.writerow([row["axis"], row["cell"],
                             "" if row["mae"] is None else f"{row['mae']:.4f}",
                             ci[0], ci[1], row.get("n", ""), row["absent"],
                             row.get("error", "")])
    print(f"ablation table ({len(rows)} rows) -> {out}")
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radar-vitals",
        description="Synthetic radar heart-rate pipeline: simulate, preprocess, train, evaluate.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("simulate", help="generate a synthetic raw dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--preset", choices=["fmcw", "uwb"], help="override the config's radar kind")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="raw segments -> feature dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=1)
    p.add_argument("--antennas", default="all")
    p.add_argument("--features", default="angle,magnitude")
    p.add_argument("--highpass", type=float, default=0.3)
    common(p)
    p.set_defaults(func=cmd_preprocess)

    for name, regimes in (("train", ["fmcw_full", "transfer_base", "uwb_scratch"]),
                          ("finetune", None)):
        p = sub.add_parser(name, help=f"{name} a model on a feature dataset")
        p.add_argument("--data", required=True)
        p.add_argument("--out", required=True)
        if regimes:
            p.add_argument("--regime", choices=regimes, default=regimes[0])
        else:
            p.add_argument("--base-checkpoint", required=True,
                           help="transfer_base checkpoint to start from")
        scale = p.add_mutually_exclusive_group()
        scale.add_argument("--desk-scale", dest="paper_scale", action="store_false")
        scale.add_argument("--paper-scale", dest="paper_scale", action="store_true")
        p.set_defaults(paper_scale=False)
        p.add_argument("--steps", type=int)
        p.add_argument("--batch-size", type=int)
        common(p)
        p.set_defaults(func=cmd_train if name == "train" else cmd_finetune)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on a feature dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--out")
    p.add_argument("--per-subject", action="store_true",
                   help="bootstrap over subjects instead of segments")
    common(p, seed_default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run the ablation grid on a raw dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    common(p, seed_default=0)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (storage.ManifestError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
