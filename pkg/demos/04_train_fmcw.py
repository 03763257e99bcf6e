"""Train the 2D+1D residual network on a small synthetic FMCW dataset and
evaluate it. A compressed version of the full experiment: expect a few
minutes of runtime and an MAE well below the predict-the-mean baseline."""

import time

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

import radar_vitals as rv
from radar_vitals.features import FeatureConfig
from radar_vitals.pipeline import build_feature_dataset
from radar_vitals.train import desk_preset, evaluate_dataset, train
from dataclasses import replace

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(0)

def scene(i):
    return rv.SceneSpec(
        target_range=rng.uniform(0.6, 1.4),
        respiration_rate=rng.uniform(0.18, 0.35),
        heart_rate=rng.uniform(45, 100),
        respiration_amplitude=rng.uniform(2e-3, 6e-3),
        noise_std=0.5,
        rng_seed=5000 + i,
        duration=60.0,
        antenna_gains=tuple(rng.uniform(0.7, 1.2, 3)),
        subject_id=f"subj{i:04d}",
    )

fcfg = FeatureConfig(num_range_bins=1, antennas=(2,))
spec = rv.fmcw_preset()
t0 = time.time()
train_ds = build_feature_dataset([scene(i) for i in range(400)], spec, fcfg)
val_ds = build_feature_dataset([scene(400 + i) for i in range(60)], spec, fcfg)
test_ds = build_feature_dataset([scene(460 + i) for i in range(120)], spec, fcfg)
print(f"featurized {len(train_ds)}/{len(val_ds)}/{len(test_ds)} segments "
      f"in {time.time() - t0:.0f} s (recall {train_ds.recall:.3f})")

cfg = replace(desk_preset("fmcw_full"), steps=800)
print(f"training: {cfg.steps} steps, batch {cfg.batch_size}, "
      f"lr {cfg.schedule.base_lr}")
t0 = time.time()
result = train(cfg, train_ds, val_ds, log=print)
print(f"trained in {time.time() - t0:.0f} s; "
      f"best val MAE {result.best_val_mae:.2f} bpm at step {result.best_step}")

report = evaluate_dataset(result.model, test_ds, subgroup_keys=["hr_band"])
baseline = np.abs(test_ds.labels - train_ds.labels.mean()).mean()
print(f"mean-predictor baseline: {baseline:.2f} bpm")
for line in report.summary_lines():
    print(line)

steps, maes = zip(*result.val_history)
pred = result.model.predict(test_ds.normalized_inputs())
fig, axes = plt.subplots(1, 2, figsize=(11, 4))
axes[0].plot(steps, maes)
axes[0].axhline(baseline, color="r", ls=":", label="mean predictor")
axes[0].set(title="validation MAE", xlabel="step", ylabel="bpm")
axes[0].legend()
axes[1].scatter(test_ds.labels, pred, s=8, alpha=0.6)
axes[1].plot([45, 100], [45, 100], "k--", lw=1)
axes[1].set(title="test predictions", xlabel="true HR [bpm]", ylabel="predicted")
fig.tight_layout()
fig.savefig(OUT / "04_training.png", dpi=110)
print(f"figure -> {OUT / '04_training.png'}")
