"""Training regimes and augmentations.

Four regimes mirror the production recipe: the full model on FMCW
features, a transfer base trained on FMCW reduced to one antenna and one
range bin, fine-tuning that base on UWB features, and a from-scratch UWB
baseline. Paper-scale presets carry the published hyperparameters
verbatim; desk-scale presets shrink steps, batch, and network width to
something a laptop finishes in minutes.

Augmentations are pure per-batch transforms: Gaussian noise on the
normalized features, magnitude/angle row swaps, and time-axis resampling
that accelerates the heart rate (with label rescaling and upweighting of
fast-HR samples).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .metrics import EvalReport, build_report
from .nn.checkpoint import config_fingerprint, load_checkpoint, save_checkpoint
from .nn.autograd import l1_loss, l2_loss
from .nn.model import HeartRateModel, ModelSpec, NonFiniteActivation, desk_model_spec, paper_model_spec
from .nn.optim import AdamW, LrSchedule
from .features import FeatureConfig, normalize_rows
from .pipeline import FeatureDataset

REGIMES = ("fmcw_full", "transfer_base", "uwb_finetune", "uwb_scratch")


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class HrAccelerateConfig:
    probability: float = 0.5
    min_multiplier: float = 1.0
    max_multiplier: float = 1.2
    hr_floor: float = 70.0  # bpm; samples below are never accelerated


@dataclass(frozen=True)
class UpweightConfig:
    factor: float = 1.5
    hr_floor: float = 90.0  # bpm, applied to the post-augmentation label


@dataclass
class TrainConfig:
    regime: str
    steps: int
    batch_size: int
    schedule: LrSchedule
    model_spec: ModelSpec
    weight_decay: float = 0.01
    loss: str = "l1"  # or "l2"
    seed: int = 0
    train_fraction: float = 1.0
    gaussian_noise_std: float = 0.0005
    gaussian_noise_p: float = 0.0
    feature_swap: str = "off"  # off | random | always
    hr_accelerate: HrAccelerateConfig | None = None
    upweight: UpweightConfig | None = None
    val_every: int | None = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if not 0.0 <= self.gaussian_noise_p <= 1.0:
            raise ValueError("gaussian_noise_p must be in [0, 1]")
        if self.feature_swap not in ("off", "random", "always"):
            raise ValueError(f"unknown feature_swap mode {self.feature_swap!r}")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ValueError("train_fraction must be in (0, 1]")

    @property
    def validation_cadence(self) -> int:
        return self.val_every if self.val_every else max(self.steps // 100, 10)

    def fingerprint(self) -> str:
        doc = {k: v for k, v in self.__dict__.items()}
        doc["model_spec"] = self.model_spec.to_dict()
        doc["schedule"] = self.schedule.__dict__
        return config_fingerprint(doc)


def paper_preset(regime: str) -> TrainConfig:
    """Published hyperparameters for each regime."""
    if regime == "fmcw_full":
        return TrainConfig(regime, steps=200_000, batch_size=32,
                           schedule=LrSchedule.constant(1e-3), model_spec=paper_model_spec())
    if regime == "transfer_base":
        return TrainConfig(regime, steps=140_000, batch_size=64,
                           schedule=LrSchedule.constant(1e-3), model_spec=paper_model_spec(),
                           gaussian_noise_p=0.7)
    if regime == "uwb_finetune":
        return TrainConfig(regime, steps=2_700, batch_size=2048,
                           schedule=LrSchedule.exponential(3e-4, 0.1, 2_700),
                           model_spec=paper_model_spec(),
                           gaussian_noise_p=0.6, feature_swap="always")
    if regime == "uwb_scratch":
        return TrainConfig(regime, steps=55_000, batch_size=2048,
                           schedule=LrSchedule.constant(1e-3), model_spec=paper_model_spec())
    raise ValueError(f"unknown regime {regime!r}")


def desk_preset(regime: str) -> TrainConfig:
    """Reduced budgets that finish in minutes on a laptop."""
    if regime == "fmcw_full":
        return TrainConfig(regime, steps=1_500, batch_size=32,
                           schedule=LrSchedule.constant(1e-3), model_spec=desk_model_spec())
    if regime == "transfer_base":
        return TrainConfig(regime, steps=1_200, batch_size=32,
                           schedule=LrSchedule.constant(1e-3), model_spec=desk_model_spec(),
                           gaussian_noise_p=0.7)
    if regime == "uwb_finetune":
        return TrainConfig(regime, steps=200, batch_size=16,
                           schedule=LrSchedule.exponential(3e-4, 0.1, 200),
                           model_spec=desk_model_spec(),
                           gaussian_noise_p=0.6, feature_swap="always")
    if regime == "uwb_scratch":
        return TrainConfig(regime, steps=200, batch_size=16,
                           schedule=LrSchedule.constant(1e-3), model_spec=desk_model_spec())
    raise ValueError(f"unknown regime {regime!r}")


def preset(regime: str, scale: str = "desk") -> TrainConfig:
    if scale == "paper":
        return paper_preset(regime)
    if scale == "desk":
        return desk_preset(regime)
    raise ValueError(f"unknown scale {scale!r} (expected 'paper' or 'desk')")


# -- augmentations ----------------------------------------------------------

def augment_gaussian(values: np.ndarray, std: float = 0.0005, p: float = 1.0,
                     rng: np.random.Generator | None = None) -> np.ndarray:
    """With probability ``p`` (per example for batched input) add i.i.d.
    zero-mean Gaussian noise to every value. Never mutates the input."""
    rng = rng or np.random.default_rng(0)
    values = np.asarray(values)
    if p <= 0.0:
        return values.copy()
    if values.ndim == 4:  # batch [N, T, S, 1]
        out = values.copy()
        chosen = rng.random(values.shape[0]) < p
        if np.any(chosen):
            noise = rng.normal(0.0, std, size=out[chosen].shape)
            out[chosen] += noise.astype(out.dtype)
        return out
    out = values.copy()
    if rng.random() < p:
        out += rng.normal(0.0, std, size=out.shape).astype(out.dtype)
    return out


def augment_feature_swap(values: np.ndarray) -> np.ndarray:
    """Exchange each (feature-pair) of adjacent spatial rows; an involution.

    Accepts [.., S, 1] model inputs or [S, T] row matrices; S must be even.
    """
    values = np.asarray(values)
    if values.ndim >= 2 and values.shape[-1] == 1:  # [..., T, S, 1]
        s = values.shape[-2]
        if s % 2:
            raise ValueError(f"spatial size {s} is odd; features are not paired")
        shaped = values.reshape(values.shape[:-2] + (s // 2, 2, 1))
        return shaped[..., ::-1, :].reshape(values.shape).copy()
    s = values.shape[0]
    if s % 2:
        raise ValueError(f"row count {s} is odd; features are not paired")
    shaped = values.reshape((s // 2, 2) + values.shape[1:])
    return shaped[:, ::-1].reshape(values.shape).copy()


def resample_time(rows: np.ndarray, multiplier: float, length: int | None = None) -> np.ndarray:
    """Play the rows back ``multiplier`` times faster (mirror-extended tail),
    cropped to ``length`` samples (default: the input length)."""
    rows = np.asarray(rows)
    n = rows.shape[-1]
    length = length or n
    ext = np.concatenate([rows, rows[..., ::-1][..., 1:]], axis=-1)
    pos = multiplier * np.arange(length)
    if pos[-1] > ext.shape[-1] - 2:
        raise ValueError(f"multiplier {multiplier} overruns the mirrored extension")
    i0 = np.floor(pos).astype(int)
    frac = (pos - i0).astype(rows.dtype if rows.dtype.kind == "f" else np.float64)
    return ext[..., i0] * (1.0 - frac) + ext[..., i0 + 1] * frac


def augment_hr_accelerate(rows: np.ndarray, label: float,
                          cfg: HrAccelerateConfig = HrAccelerateConfig(),
                          upweight: UpweightConfig | None = UpweightConfig(),
                          rng: np.random.Generator | None = None):
    """Speed up eligible samples by a random multiplier.

    Input rows are pre-normalization feature series [S, T]. Samples with
    label >= cfg.hr_floor are, with cfg.probability, resampled by
    m ~ U[min, max]; the label scales by m and the sample weight becomes
    upweight.factor when the new label reaches upweight.hr_floor.
    Returns (rows, label, weight).
    """
    rng = rng or np.random.default_rng(0)
    weight = 1.0
    if label >= cfg.hr_floor and rng.random() < cfg.probability:
        m = rng.uniform(cfg.min_multiplier, cfg.max_multiplier)
        rows = resample_time(rows, m)
        label = label * m
    if upweight is not None and label >= upweight.hr_floor:
        weight = upweight.factor
    return rows, label, weight


# -- training ----------------------------------------------------------------

@dataclass
class TrainResult:
    model: HeartRateModel
    config: TrainConfig
    best_step: int
    best_val_mae: float
    val_history: list = field(default_factory=list)  # (step, mae)
    base_checksum: str | None = None
    checkpoint_dir: str | None = None


def assert_split_hygiene(*datasets: FeatureDataset) -> None:
    """No subject id may appear in more than one of the given datasets."""
    seen: dict[str, int] = {}
    for i, ds in enumerate(datasets):
        if ds is None:
            continue
        for sid in np.unique(ds.subject_ids):
            if sid in seen and seen[sid] != i:
                raise ValueError(f"subject {sid!r} appears in more than one split")
            seen[sid] = i


def _assemble_batch(ds: FeatureDataset, idx: np.ndarray, cfg: TrainConfig,
                    rng: np.random.Generator):
    rows = ds.rows[idx].astype(np.float32)  # fancy indexing copies
    labels = ds.labels[idx].astype(np.float64)
    weights = np.ones(len(idx))
    if cfg.hr_accelerate is not None:
        for b in range(len(idx)):
            rows[b], labels[b], weights[b] = augment_hr_accelerate(
                rows[b], labels[b], cfg.hr_accelerate, cfg.upweight, rng)
    elif cfg.upweight is not None:
        weights = np.where(labels >= cfg.upweight.hr_floor, cfg.upweight.factor, 1.0)
    x = normalize_rows(rows)
    x = np.ascontiguousarray(np.swapaxes(x, 1, 2))[..., None]
    if cfg.feature_swap == "always":
        x = augment_feature_swap(x)
    elif cfg.feature_swap == "random":
        chosen = rng.random(len(idx)) < 0.5
        if np.any(chosen):
            x[chosen] = augment_feature_swap(x[chosen])
    if cfg.gaussian_noise_p > 0:
        x = augment_gaussian(x, cfg.gaussian_noise_std, cfg.gaussian_noise_p, rng)
    return x.astype(np.float32), labels, weights


def _snapshot(model: HeartRateModel) -> dict:
    return {
        "params": {n: t.data.copy() for n, t in model.parameters()},
        "buffers": {n: np.copy(v) for n, v in model.buffers()},
        "offset": model.output_offset,
        "scale": model.output_scale,
    }


def _restore(model: HeartRateModel, snap: dict) -> None:
    for n, t in model.parameters():
        t.data = snap["params"][n].copy()
    for n, v in snap["buffers"].items():
        model.set_buffer(n, v)
    model.output_offset = snap["offset"]
    model.output_scale = snap["scale"]


def validation_mae(model: HeartRateModel, ds: FeatureDataset) -> float:
    pred = model.predict(ds.normalized_inputs())
    return float(np.abs(pred - ds.labels).mean())


def train(cfg: TrainConfig, train_ds: FeatureDataset, val_ds: FeatureDataset | None = None,
          base_checkpoint: str | None = None, base_model: HeartRateModel | None = None,
          out_dir: str | None = None, log=None) -> TrainResult:
    """Run one training regime and return the best-validation checkpoint.

    ``uwb_finetune`` requires a transfer-base start (``base_checkpoint``
    directory or an in-memory ``base_model``); fine-tuning verifiably
    starts from exactly those parameters (checksum recorded).
    """
    if cfg.regime == "uwb_finetune" and base_checkpoint is None and base_model is None:
        raise ValueError("uwb_finetune requires a transfer_base checkpoint")
    assert_split_hygiene(train_ds, val_ds)
    if cfg.train_fraction < 1.0:
        train_ds = train_ds.first_fraction(cfg.train_fraction)
    if len(train_ds) == 0:
        raise ValueError("empty training dataset")

    base_checksum = None
    if base_model is not None:
        model = base_model
        base_checksum = model.checksum()
    elif base_checkpoint is not None:
        model, base_index = load_checkpoint(base_checkpoint)
        base_checksum = model.checksum()  # load_checkpoint verified it against the index
        base_spatial = base_index.get("spatial_size")
        if base_spatial is not None and base_spatial != train_ds.spatial_size:
            raise ValueError(
                f"feature-config mismatch: base checkpoint was trained on S={base_spatial}, "
                f"dataset provides S={train_ds.spatial_size}")
    else:
        model = HeartRateModel(cfg.model_spec, seed=cfg.seed)
        # calibrate the output affine so early predictions sit at the label mean
        model.output_offset = float(train_ds.labels.mean())
        scale = float(train_ds.labels.std())
        model.output_scale = scale if scale > 1e-9 else 1.0

    opt = AdamW(model.parameters(), cfg.schedule, weight_decay=cfg.weight_decay)
    loss_fn = l1_loss if cfg.loss == "l1" else l2_loss
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 5]))

    best = _snapshot(model)
    best_step = 0
    best_mae = validation_mae(model, val_ds) if val_ds is not None else float("inf")
    history = [(0, best_mae)] if val_ds is not None else []

    for step in range(1, cfg.steps + 1):
        idx = rng.integers(0, len(train_ds), size=cfg.batch_size)
        x, labels, weights = _assemble_batch(train_ds, idx, cfg, rng)
        out = model.forward(x, train=True)
        use_weights = cfg.upweight is not None or cfg.hr_accelerate is not None
        loss = loss_fn(out, labels, weights if use_weights else None)
        if not np.isfinite(loss.data):
            try:  # locate the offending layer for the diagnostic
                model.forward(x, train=True, check_finite=True)
            except NonFiniteActivation as exc:
                raise TrainingDiverged(f"non-finite loss at step {step}: {exc}") from exc
            raise TrainingDiverged(f"non-finite loss at step {step}")
        model.zero_grad()
        loss.backward()
        opt.step()
        if val_ds is not None and (step % cfg.validation_cadence == 0 or step == cfg.steps):
            mae = validation_mae(model, val_ds)
            history.append((step, mae))
            if log:
                log(f"step {step}: val MAE {mae:.3f} bpm")
            if mae < best_mae:
                best_mae = mae
                best_step = step
                best = _snapshot(model)

    if val_ds is not None:
        _restore(model, best)
    result = TrainResult(model=model, config=cfg, best_step=best_step,
                         best_val_mae=best_mae, val_history=history,
                         base_checksum=base_checksum)
    if out_dir is not None:
        extra = {
            "regime": cfg.regime,
            "config_fingerprint": cfg.fingerprint(),
            "val_history": [[s, m] for s, m in history],
            "best_step": best_step,
            "base_checksum": base_checksum,
            "spatial_size": train_ds.spatial_size,
        }
        save_checkpoint(out_dir, model, opt, extra=extra)
        result.checkpoint_dir = str(out_dir)
    return result


def evaluate_dataset(model: HeartRateModel, ds: FeatureDataset,
                     subgroup_keys: list[str] | None = None, seed: int = 0,
                     replicates: int = 1000, per_subject: bool = False) -> EvalReport:
    """Predict a feature dataset and build the metrics report."""
    pred = model.predict(ds.normalized_inputs())
    return build_report(pred, ds.labels, tags=ds.tags, recall=ds.recall,
                        subgroup_keys=subgroup_keys, replicates=replicates, seed=seed,
                        groups=ds.subject_ids if per_subject else None)


# -- ablation harness ---------------------------------------------------------

def _antenna_mode_datasets(featurize, mode, base_fcfg: FeatureConfig):
    """Datasets for one antenna mode: 'split' concatenates per-antenna
    single-antenna examples; other modes map to a FeatureConfig."""
    if mode == "split":
        datasets = []
        a = 0
        while a < 8:
            try:
                part = featurize(replace(base_fcfg, antennas=(a,)))
            except IndexError:
                break
            if len(part["train"]) == 0:
                break
            datasets.append(part)
            a += 1
        if not datasets:
            raise ValueError("no antennas produced data in split mode")
        merged = {}
        for split_name in datasets[0]:
            merged[split_name] = _concat_datasets([d[split_name] for d in datasets])
        return merged
    if mode == "all" or mode == "pca" or isinstance(mode, (tuple, list, int)):
        antennas = mode if isinstance(mode, str) else \
            ((mode,) if isinstance(mode, int) else tuple(mode))
        return featurize(replace(base_fcfg, antennas=antennas))
    raise ValueError(f"unknown antenna mode {mode!r}")


def _concat_datasets(parts: list[FeatureDataset]) -> FeatureDataset:
    return FeatureDataset(
        rows=np.concatenate([p.rows for p in parts]),
        labels=np.concatenate([p.labels for p in parts]),
        subject_ids=np.concatenate([p.subject_ids for p in parts]),
        tags=[t for p in parts for t in p.tags],
        recall=float(np.mean([p.recall for p in parts])),
        feature_config=parts[0].feature_config)


def ablation_suite(featurize, base_fcfg: FeatureConfig, base_cfg: TrainConfig,
                   antenna_modes=(), feature_sets=(), bin_counts=(),
                   train_fractions=(), base_checkpoint=None, log=None) -> list[dict]:
    """One-factor-at-a-time sweep; one MAE row per cell.

    ``featurize(fcfg)`` must return {"train": ds, "val": ds, "test": ds}
    for the requested feature configuration. Cells that fail are reported
    as absent rows and the suite continues.
    """
    cells = [("baseline", {})]
    cells += [("antennas", {"antenna_mode": m}) for m in antenna_modes]
    cells += [("features", {"features": f}) for f in feature_sets]
    cells += [("num_range_bins", {"num_range_bins": b}) for b in bin_counts]
    cells += [("train_fraction", {"train_fraction": f}) for f in train_fractions]

    rows = []
    for axis, variation in cells:
        label = f"{axis}={variation}" if variation else "baseline"
        try:
            fcfg = base_fcfg
            cfg = base_cfg
            if "features" in variation:
                fcfg = replace(fcfg, features=tuple(variation["features"]))
            if "num_range_bins" in variation:
                fcfg = replace(fcfg, num_range_bins=variation["num_range_bins"])
            if "train_fraction" in variation:
                cfg = replace(cfg, train_fraction=variation["train_fraction"])
            if "antenna_mode" in variation:
                datasets = _antenna_mode_datasets(featurize, variation["antenna_mode"], fcfg)
            else:
                datasets = featurize(fcfg)
            result = train(cfg, datasets["train"], datasets.get("val"),
                           base_checkpoint=base_checkpoint)
            report = evaluate_dataset(result.model, datasets["test"], replicates=200)
            row = {"axis": axis, "cell": label, "mae": report.mae,
                   "mae_ci": list(report.mae_ci), "n": report.n_segments, "absent": False}
        except Exception as exc:  # cell failures must not kill the suite
            row = {"axis": axis, "cell": label, "mae": None, "absent": True,
                   "error": f"{type(exc).__name__}: {exc}"}
        rows.append(row)
        if log:
            log(f"[ablation] {row}")
    return rows
