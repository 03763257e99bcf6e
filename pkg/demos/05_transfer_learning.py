"""Transfer learning between radar types: pretrain on FMCW reduced to a
single antenna and range bin, fine-tune on a small IR-UWB set, and compare
against training from scratch on the same UWB data."""

import time
from dataclasses import replace

import numpy as np

import radar_vitals as rv
from radar_vitals.features import FeatureConfig
from radar_vitals.pipeline import build_feature_dataset
from radar_vitals.train import desk_preset, train

rng = np.random.default_rng(1)

def scene(i, kind):
    gains = 3 if kind == "fmcw" else 2
    return rv.SceneSpec(
        target_range=rng.uniform(0.6, 1.3),
        respiration_rate=rng.uniform(0.18, 0.35),
        heart_rate=rng.uniform(45, 100),
        respiration_amplitude=rng.uniform(2e-3, 6e-3),
        noise_std=0.5 if kind == "fmcw" else 0.08,
        rng_seed=9000 + i,
        duration=60.0,
        antenna_gains=tuple(rng.uniform(0.7, 1.2, gains)),
        subject_id=f"{kind}{i:04d}",
    )

print("pretraining base model on FMCW (single antenna, single bin)...")
fm = rv.fmcw_preset()
fcfg = FeatureConfig(num_range_bins=1, antennas=(2,))
base_train = build_feature_dataset([scene(i, "fmcw") for i in range(500)], fm, fcfg)
base_val = build_feature_dataset([scene(500 + i, "fmcw") for i in range(60)], fm, fcfg)
t0 = time.time()
base = train(replace(desk_preset("transfer_base"), steps=700), base_train, base_val)
print(f"base val MAE {base.best_val_mae:.2f} bpm ({time.time() - t0:.0f} s)")

uw = rv.uwb_preset()
ucfg = FeatureConfig(num_range_bins=1, antennas=(0,))
uwb_train = build_feature_dataset([scene(i, "uwb") for i in range(150)], uw, ucfg)
uwb_val = build_feature_dataset([scene(150 + i, "uwb") for i in range(40)], uw, ucfg)
uwb_test = build_feature_dataset([scene(190 + i, "uwb") for i in range(120)], uw, ucfg)
print(f"UWB data: {len(uwb_train)} train / {len(uwb_test)} test segments")

finetuned = train(desk_preset("uwb_finetune"), uwb_train, uwb_val, base_model=base.model)
mae_ft = np.abs(finetuned.model.predict(uwb_test.normalized_inputs()) - uwb_test.labels).mean()

scratch = train(desk_preset("uwb_scratch"), uwb_train, uwb_val)
mae_sc = np.abs(scratch.model.predict(uwb_test.normalized_inputs()) - uwb_test.labels).mean()

print(f"\nUWB test MAE: fine-tuned {mae_ft:.2f} bpm vs from-scratch {mae_sc:.2f} bpm")
if mae_sc > 0:
    print(f"fine-tuning changed MAE by {100 * (mae_ft - mae_sc) / mae_sc:+.0f}% "
          f"relative to the baseline")
