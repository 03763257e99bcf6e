"""Acceptance suite: every shipping criterion at its stated tolerance,
one printed pass/fail line per criterion (run with -s to watch).

The end-to-end criteria (9, 10, 13) train real models on synthetic data
and take minutes; everything else is seconds. Published clinical numbers
are not reproducible on synthetic scenes and are nowhere asserted; these
criteria are property- and oracle-based instead.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

import radar_vitals as rv
from radar_vitals.features import FeatureConfig
from radar_vitals.metrics import bland_altman, bootstrap_ci
from radar_vitals.nn import HeartRateModel, Tensor, l1_loss, paper_model_spec
from radar_vitals.nn import autograd as ag
from radar_vitals.nn.checkpoint import save_checkpoint
from radar_vitals.nn.layers import BatchNorm, ResBlock1d, ResBlock2d
from radar_vitals.pipeline import build_feature_dataset
from radar_vitals.presence import CfarConfig, cfar_mask
from radar_vitals.train import desk_preset, evaluate_dataset, train

from test_nn import gradcheck
from test_features import sg_residual_response
from test_presence import naive_ca_cfar

FMCW = rv.fmcw_preset()
UWB = rv.uwb_preset()


def report(num: int, ok: bool, detail: str):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


# ---------------------------------------------------------------------------
# shared synthetic datasets (built once; timings folded into criterion 9)

def _fmcw_scene(i, rng):
    return rv.SceneSpec(
        target_range=rng.uniform(0.6, 1.4),
        respiration_rate=rng.uniform(0.18, 0.35),
        heart_rate=rng.uniform(45.0, 100.0),
        respiration_amplitude=rng.uniform(2e-3, 6e-3),
        drift_amplitude=rng.uniform(0.0, 1e-3),
        noise_std=0.5,
        rng_seed=10_000 + i,
        duration=60.0,
        antenna_gains=tuple(rng.uniform(0.7, 1.2, 3)),
        subject_id=f"f{i:05d}",
    )


def _uwb_scene(i, rng):
    return rv.SceneSpec(
        target_range=rng.uniform(0.5, 1.3),
        respiration_rate=rng.uniform(0.18, 0.35),
        heart_rate=rng.uniform(45.0, 100.0),
        respiration_amplitude=rng.uniform(2e-3, 6e-3),
        drift_amplitude=rng.uniform(0.0, 1e-3),
        noise_std=0.08,
        rng_seed=80_000 + i,
        duration=60.0,
        antenna_gains=tuple(rng.uniform(0.7, 1.2, 2)),
        subject_id=f"u{i:05d}",
    )


FMCW_FEATURES = FeatureConfig(num_range_bins=1, antennas=(2,))
UWB_FEATURES = FeatureConfig(num_range_bins=1, antennas=(0,))


@pytest.fixture(scope="module")
def fmcw_data():
    """2000 train / 200 val / 400 test FMCW segments, featurized."""
    rng = np.random.default_rng(1000)
    t0 = time.time()
    scenes = [_fmcw_scene(i, rng) for i in range(2600)]
    train_ds = build_feature_dataset(scenes[:2000], FMCW, FMCW_FEATURES)
    val_ds = build_feature_dataset(scenes[2000:2200], FMCW, FMCW_FEATURES)
    test_ds = build_feature_dataset(scenes[2200:], FMCW, FMCW_FEATURES)
    return {"train": train_ds, "val": val_ds, "test": test_ds,
            "build_seconds": time.time() - t0}


@pytest.fixture(scope="module")
def uwb_data():
    """200 train / 60 val / 200 test UWB segments, featurized."""
    rng = np.random.default_rng(2000)
    scenes = [_uwb_scene(i, rng) for i in range(460)]
    return {
        "train": build_feature_dataset(scenes[:200], UWB, UWB_FEATURES),
        "val": build_feature_dataset(scenes[200:260], UWB, UWB_FEATURES),
        "test": build_feature_dataset(scenes[260:], UWB, UWB_FEATURES),
    }


@pytest.fixture(scope="module")
def base_checkpoint(fmcw_data, tmp_path_factory):
    """Transfer base: FMCW reduced to one antenna and one range bin."""
    cfg = desk_preset("transfer_base")
    result = train(cfg, fmcw_data["train"], fmcw_data["val"])
    ckpt = tmp_path_factory.mktemp("base_ckpt")
    save_checkpoint(ckpt, result.model, extra={"regime": "transfer_base"})
    return {"dir": str(ckpt), "val_mae": result.best_val_mae}


# ---------------------------------------------------------------------------

def test_criterion_01_range_mapping_oracle():
    t0 = time.time()
    results = []
    for r0 in (0.5, 1.0, 2.0):
        scene = rv.SceneSpec(target_range=r0, noise_std=0.3, rng_seed=int(r0 * 100))
        profile = rv.range_fft(rv.clutter_filter(rv.simulate_fmcw(scene, FMCW).values))
        hit = rv.detect(profile)
        expected = int(np.floor(r0 / 0.027 + 0.5))
        results.append((r0, hit.detected, hit.bin_index, expected,
                        abs(hit.bin_index - expected) <= 1))
    for r0 in (0.6, 1.5):
        scene = rv.SceneSpec(target_range=r0, noise_std=0.05, rng_seed=int(r0 * 100))
        slow = rv.downsample_uwb(rv.simulate_uwb(scene, UWB).values)
        hit = rv.detect(rv.clutter_filter(slow))
        expected = int(np.floor(r0 / 0.3 + 0.5))
        results.append((r0, hit.detected, hit.bin_index, expected,
                        hit.bin_index == expected))
    elapsed = time.time() - t0
    ok = all(r[1] and r[4] for r in results) and elapsed < 5.0
    detail = "; ".join(f"r0={r[0]}m bin {r[2]} (exp {r[3]})" for r in results)
    report(1, ok, f"{detail}; {elapsed:.2f} s (< 5 s)")


def test_criterion_02_phase_displacement_law():
    checks = []
    scene = rv.SceneSpec(target_range=1.0, respiration_amplitude=0.0,
                         cardiac_amplitude=5e-4, heart_rate=72.0, noise_std=0.0,
                         clutter_amplitude=0.0, drift_amplitude=0.0)
    profile = rv.range_fft(rv.simulate_fmcw(scene, FMCW).values)
    phase = rv.unwrap_phase(profile[37, 0])
    amp = (phase.max() - phase.min()) / 2
    expected = 4 * np.pi * 5e-4 / FMCW.wavelength
    freqs = np.fft.rfftfreq(1800, 1 / 30.0)
    peak = freqs[np.abs(np.fft.rfft(phase - phase.mean())).argmax()]
    checks.append(("fmcw", amp, expected, abs(amp / expected - 1) <= 0.01,
                   abs(peak - 1.2) <= 1 / 60 + 1e-12))

    scene_u = rv.SceneSpec(target_range=0.9, respiration_amplitude=0.0,
                           cardiac_amplitude=5e-4, heart_rate=72.0, noise_std=0.0,
                           clutter_amplitude=0.0, drift_amplitude=0.0)
    slow = rv.downsample_uwb(rv.simulate_uwb(scene_u, UWB).values)
    phase_u = rv.unwrap_phase(slow[3, 0])
    amp_u = (phase_u.max() - phase_u.min()) / 2
    expected_u = 4 * np.pi * 5e-4 / UWB.wavelength
    peak_u = freqs[np.abs(np.fft.rfft(phase_u - phase_u.mean())).argmax()]
    checks.append(("uwb", amp_u, expected_u, abs(amp_u / expected_u - 1) <= 0.01,
                   abs(peak_u - 1.2) <= 1 / 60 + 1e-12))

    ok = all(c[3] and c[4] for c in checks)
    detail = "; ".join(f"{c[0]}: amp {c[1]:.4f} rad (law {c[2]:.4f}, within 1%), "
                       f"peak at 1.2 Hz" for c in checks)
    report(2, ok, detail)


def test_criterion_03_unwrap_property_suite():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        steps = rng.uniform(-0.98 * np.pi, 0.98 * np.pi, size=150)
        x = np.cumsum(steps) + rng.uniform(-100, 100)
        recovered = rv.unwrap_phase(np.exp(1j * x))
        offset = (recovered - x) / (2 * np.pi)
        worst = max(worst, np.max(np.abs(offset - np.round(offset[0]))))
    ok = worst < 1e-9
    report(3, ok, f"1000 wrap/unwrap round trips, max deviation from a single "
                  f"2-pi offset {worst:.2e} (< 1e-9)")


def test_criterion_04_clutter_linearity_suite():
    # exact zero on static scenes
    static = rv.SceneSpec(target_range=1.0, respiration_amplitude=0.0,
                          cardiac_amplitude=0.0, drift_amplitude=0.0, noise_std=0.0)
    cube = rv.simulate_fmcw(static, FMCW).values
    residual_rel = np.sum(rv.clutter_filter(cube) ** 2) / np.sum(cube ** 2)

    # idempotence at double precision
    rng = np.random.default_rng(4)
    x = rng.standard_normal((16, 2, 1800)) * 5
    once = rv.clutter_filter(x)
    idem_rel = np.max(np.abs(rv.clutter_filter(once) - once)) / np.max(np.abs(x))

    # Parseval with the one-sided convention
    y = rng.standard_normal((256, 3, 8))
    spectrum = rv.range_fft(y)
    mags = np.abs(spectrum) ** 2
    freq_energy = (mags[0] + 2 * mags[1:-1].sum(axis=0) + mags[-1]) / 256
    parseval_rel = np.max(np.abs(freq_energy / np.sum(y ** 2, axis=0) - 1))

    ok = residual_rel <= 1e-20 and idem_rel <= 1e-13 and parseval_rel <= 1e-9
    report(4, ok, f"static residual {residual_rel:.1e} (<=1e-20); idempotence "
                  f"{idem_rel:.1e} (machine exact); Parseval {parseval_rel:.1e} (<=1e-9)")


def test_criterion_05_adaptive_filter_oracle():
    fs = 30.0
    t = np.arange(3600) / fs
    core = slice(200, -200)
    worst_db = 0.0
    details = []
    for freq in (0.25, 0.5, 1.2):
        x = np.sin(2 * np.pi * freq * t)
        out = rv.adaptive_respiration_filter(x)
        measured = np.sqrt(np.mean(out[core] ** 2)) / np.sqrt(np.mean(x[core] ** 2))
        oracle = sg_residual_response(freq)
        mismatch_db = abs(20 * np.log10(measured / oracle))
        worst_db = max(worst_db, mismatch_db)
        details.append(f"{freq} Hz: {20 * np.log10(measured):+.1f} dB "
                       f"(oracle {20 * np.log10(oracle):+.1f})")
    u = np.linspace(0.0, 1.0, 3600)  # O(1) cubic; tolerance is absolute
    cubic = 1.0 - 2.0 * u + 3.0 * u ** 2 - 0.5 * u ** 3
    cubic_rms = np.sqrt(np.mean(rv.adaptive_respiration_filter(cubic)[23:-23] ** 2))
    ok = worst_db < 1.0 and cubic_rms <= 1e-9
    report(5, ok, f"{'; '.join(details)}; worst oracle mismatch {worst_db:.2f} dB "
                  f"(< 1 dB); cubic residual RMS {cubic_rms:.1e} (<= 1e-9)")


def test_criterion_06_cfar_properties():
    rng = np.random.default_rng(6)
    # positive-scale invariance, exact over 100 random cubes
    invariant = True
    for _ in range(100):
        cube = (rng.standard_normal((40, 2, 6)) + 1j * rng.standard_normal((40, 2, 6)))
        if rng.random() < 0.7:
            cube[int(rng.integers(0, 40))] += rng.uniform(1.0, 6.0)
        scale = 10.0 ** rng.uniform(-6, 6)
        a = rv.detect(cube)
        b = rv.detect(cube * scale)
        invariant &= (a.detected, a.bin_index) == (b.detected, b.bin_index)

    # pure-noise false-alarm rate vs the Monte-Carlo oracle, 10k trials
    cfg = CfarConfig(threshold=1.5, training_cells=8, guard_cells=2)
    interior = slice(10, 18)
    impl = oracle = total = 0
    for _ in range(10_000):
        power = rng.exponential(1.0, 28)
        impl += cfar_mask(power, cfg)[interior].sum()
        oracle += naive_ca_cfar(power, 1.5, 8, 2)[interior].sum()
        total += 8
    impl_rate, oracle_rate = impl / total, oracle / total
    closed_form = (1 + 1.5 / 16) ** -16
    rate_ok = (0.8 * oracle_rate <= impl_rate <= 1.2 * oracle_rate
               and 0.8 * closed_form <= impl_rate <= 1.2 * closed_form)
    ok = invariant and rate_ok
    report(6, ok, f"scale invariance exact on 100 cubes: {invariant}; false-alarm "
                  f"rate {impl_rate:.4f} vs MC oracle {oracle_rate:.4f} and closed "
                  f"form {closed_form:.4f} (within +/-20%)")


def test_criterion_07_gradient_correctness():
    t0 = time.time()
    rng = np.random.default_rng(7)
    tol = 1e-4

    # every differentiable op
    a = Tensor(rng.standard_normal((4, 5)) + 2.0, requires_grad=True)
    b = Tensor(rng.standard_normal((5,)) + 3.0, requires_grad=True)
    for op in (ag.add, ag.sub, ag.mul, ag.div):
        gradcheck(lambda op=op: ag.mean(ag.mul(op(a, b), op(a, b))), [a, b], tol=tol)
    p = Tensor(rng.uniform(0.5, 2.0, (3, 4)), requires_grad=True)
    gradcheck(lambda: ag.mean(ag.power(p, -0.5)), [p], tol=tol)
    r = Tensor(rng.standard_normal(60) + 0.4, requires_grad=True)
    gradcheck(lambda: ag.mean(ag.relu(r)), [r], tol=tol)
    gradcheck(lambda: ag.mean(ag.absolute(r)), [r], tol=tol)
    m3 = Tensor(rng.standard_normal((3, 4, 5)), requires_grad=True)
    gradcheck(lambda: ag.mean(ag.mul(ag.mean(m3, axis=(0, 2)), ag.mean(m3, axis=(0, 2)))),
              [m3], tol=tol)
    gradcheck(lambda: ag.mean(ag.mul(ag.sum_(m3, axis=1), ag.sum_(m3, axis=1))),
              [m3], tol=tol)
    gradcheck(lambda: ag.mean(ag.mul(ag.reshape(m3, (12, 5)), ag.reshape(m3, (12, 5)))),
              [m3], tol=tol)
    ma = Tensor(rng.standard_normal((4, 6)), requires_grad=True)
    mb = Tensor(rng.standard_normal((6, 3)), requires_grad=True)
    gradcheck(lambda: ag.mean(ag.mul(ag.matmul(ma, mb), ag.matmul(ma, mb))), [ma, mb], tol=tol)
    cx = Tensor(rng.standard_normal((2, 6, 5, 3)), requires_grad=True)
    cw = Tensor(rng.standard_normal((3, 3, 3, 4)), requires_grad=True)
    gradcheck(lambda: ag.mean(ag.mul(ag.conv2d(cx, cw, 2), ag.conv2d(cx, cw, 2))),
              [cx, cw], tol=tol)
    dx = Tensor(rng.standard_normal((2, 11, 3)), requires_grad=True)
    dw = Tensor(rng.standard_normal((3, 3, 4)), requires_grad=True)
    gradcheck(lambda: ag.mean(ag.mul(ag.conv1d(dx, dw, 2), ag.conv1d(dx, dw, 2))),
              [dx, dw], tol=tol)
    bn = BatchNorm(3, dtype=np.float64)
    bx = Tensor(rng.standard_normal((4, 6, 3)) * 2 + 1, requires_grad=True)
    probe = ag.constant(rng.standard_normal((4, 6, 3)))
    gradcheck(lambda: ag.mean(ag.mul(bn(bx, train=True), probe)),
              [bx, bn.gamma, bn.beta], tol=tol)
    for block_cls, shape in ((ResBlock2d, (2, 6, 4, 3)), (ResBlock1d, (2, 9, 3))):
        blk = block_cls(3, 5, stride=2, rng=rng, dtype=np.float64)
        x = Tensor(rng.standard_normal(shape), requires_grad=True)
        gradcheck(lambda blk=blk, x=x: ag.mean(ag.mul(blk(x, train=True), blk(x, train=True))),
                  [x] + [t for _, t in blk.parameters()], samples=3, tol=tol)

    # the full 2D+1D model at toy size, full-width configuration; batch 8
    # keeps the last-stage batch statistics non-degenerate (at T=64 the 1D
    # section collapses to length 1, so tiny batches blow up 1/sigma)
    model = HeartRateModel(paper_model_spec(), seed=1, dtype=np.float64)
    x = rng.random((8, 64, 4, 1))
    y = rng.uniform(50.0, 90.0, 8)
    params = [t for _, t in model.parameters()]
    worst = gradcheck(lambda: l1_loss(model.forward(x, train=True), y), params,
                      samples=1, tol=tol, rng=rng, h_scale=1e-9, noise_factor=100.0)
    elapsed = time.time() - t0
    ok = elapsed < 60.0
    report(7, ok, f"all ops and the 16M-parameter model at T=64,S=4 pass FD checks "
                  f"at rel tol 1e-4 (model worst {worst:.1e}); {elapsed:.1f} s (< 60 s)")


def test_criterion_08_shape_contract():
    model = HeartRateModel(paper_model_spec(), seed=0)
    feat = model.features_2d(np.zeros((1, 1800, 192, 1), dtype=np.float32))
    count = model.parameter_count()
    out = model.forward(np.zeros((1, 1800, 192, 1), dtype=np.float32))
    ok = (feat.shape == (1, 225, 24, 128)
          and model.head.weight.data.shape[0] == 1024
          and out.data.shape == (1,)
          and abs(count - 16e6) <= 0.2 * 16e6)
    report(8, ok, f"1800x192 -> 2D section {feat.shape[1:]} (225x24x128), embedding "
                  f"1024, scalar out; parameters {count / 1e6:.2f}M (16M +/- 20%)")


def test_criterion_09_end_to_end_fmcw(fmcw_data):
    t0 = time.time()
    cfg = desk_preset("fmcw_full")
    result = train(cfg, fmcw_data["train"], fmcw_data["val"])
    rep = evaluate_dataset(result.model, fmcw_data["test"], replicates=200)
    baseline = np.abs(fmcw_data["test"].labels - fmcw_data["train"].labels.mean()).mean()
    elapsed = fmcw_data["build_seconds"] + (time.time() - t0)
    ok = (rep.mae < 3.0 and rep.mae < baseline and elapsed < 900.0
          and len(fmcw_data["train"]) == 2000 and len(fmcw_data["test"]) == 400)
    report(9, ok, f"2000 train / 400 test segments; test MAE {rep.mae:.2f} bpm "
                  f"(< 3, baseline {baseline:.2f}); recall {fmcw_data['test'].recall:.3f}; "
                  f"{elapsed / 60:.1f} min (< 15 min)")


def test_criterion_10_transfer_direction(uwb_data, base_checkpoint):
    wins = 0
    pairs = []
    for seed in range(5):
        ft_cfg = replace(desk_preset("uwb_finetune"), seed=seed)
        sc_cfg = replace(desk_preset("uwb_scratch"), seed=seed)
        ft = train(ft_cfg, uwb_data["train"], uwb_data["val"],
                   base_checkpoint=base_checkpoint["dir"])
        sc = train(sc_cfg, uwb_data["train"], uwb_data["val"])
        mae_ft = np.abs(ft.model.predict(uwb_data["test"].normalized_inputs())
                        - uwb_data["test"].labels).mean()
        mae_sc = np.abs(sc.model.predict(uwb_data["test"].normalized_inputs())
                        - uwb_data["test"].labels).mean()
        wins += mae_ft <= mae_sc
        pairs.append(f"s{seed}: {mae_ft:.2f} vs {mae_sc:.2f}")
    ok = wins >= 4
    report(10, ok, f"fine-tuned vs from-scratch UWB test MAE (bpm): "
                   f"{'; '.join(pairs)} -> {wins}/5 seeds (need >= 4)")


def test_criterion_11_metrics_oracles():
    # fixed fixtures vs independent brute force, 1e-9
    rng = np.random.default_rng(11)
    pred = rng.uniform(40, 120, 100)
    truth = rng.uniform(40, 120, 100)
    ba = bland_altman(pred, truth)
    d = pred - truth
    bias = sum(d) / len(d)
    sd = np.sqrt(sum((v - bias) ** 2 for v in d) / (len(d) - 1))
    ba_err = max(abs(ba.bias - bias), abs(ba.loa_low - (bias - 1.96 * sd)),
                 abs(ba.loa_high - (bias + 1.96 * sd)))

    errors = rng.exponential(1.0, 80)
    lo, hi = bootstrap_ci(errors, replicates=400, seed=5)
    stream = np.random.default_rng(5)
    idx = stream.integers(0, 80, size=(400, 80))
    means = errors[idx].mean(axis=1)
    boot_err = max(abs(lo - np.percentile(means, 2.5)),
                   abs(hi - np.percentile(means, 97.5)))

    covered = 0
    for t in range(200):
        sample = rng.exponential(1.0, 1000)
        clo, chi = bootstrap_ci(sample, replicates=1000, seed=3000 + t)
        covered += clo <= 1.0 <= chi
    coverage = covered / 200
    ok = ba_err <= 1e-9 and boot_err <= 1e-9 and 0.91 <= coverage <= 0.99
    report(11, ok, f"Bland-Altman oracle gap {ba_err:.1e}, bootstrap oracle gap "
                   f"{boot_err:.1e} (<= 1e-9); coverage {coverage:.3f} (91-99%)")


def test_criterion_12_augmentation_suite():
    rng = np.random.default_rng(12)
    # feature-swap involution, exact
    x = rng.random((4, 32, 6, 1)).astype(np.float32)
    involution = np.array_equal(rv.augment_feature_swap(rv.augment_feature_swap(x)), x)

    # Gaussian application frequency at the published probabilities
    freq_ok = True
    freq_detail = []
    for p in (0.6, 0.7):
        applied = 0
        for _ in range(10_000):
            out = rv.augment_gaussian(np.zeros(4), std=1e-3, p=p, rng=rng)
            applied += np.any(out != 0.0)
        sigma = np.sqrt(10_000 * p * (1 - p))
        freq_ok &= abs(applied - 10_000 * p) <= 4 * sigma
        freq_detail.append(f"p={p}: {applied}/10000")

    # HR acceleration: spectral peak shift and exact label rescaling
    t = np.arange(1800) / 30.0
    rows = np.sin(2 * np.pi * 1.2 * t)[None, :]
    cfg = rv.HrAccelerateConfig(probability=1.0, min_multiplier=1.2, max_multiplier=1.2)
    out, label, _ = rv.augment_hr_accelerate(rows, 72.0, cfg, rng=np.random.default_rng(1))
    freqs = np.fft.rfftfreq(1800, 1 / 30.0)
    peak = freqs[np.abs(np.fft.rfft(out[0] - out[0].mean())).argmax()]
    accel_ok = abs(peak - 1.44) <= 1 / 60 + 1e-12 and label == pytest.approx(86.4)
    cfg2 = rv.HrAccelerateConfig(probability=1.0, min_multiplier=1.15, max_multiplier=1.15)
    _, label2, weight2 = rv.augment_hr_accelerate(rows, 80.0, cfg2,
                                                  rng=np.random.default_rng(2))
    weight_ok = label2 == pytest.approx(92.0) and weight2 == 1.5

    ok = involution and freq_ok and accel_ok and weight_ok
    report(12, ok, f"swap involution exact: {involution}; noise frequency "
                   f"{', '.join(freq_detail)} (binomial 4-sigma); 1.2x acceleration "
                   f"peak {peak:.3f} Hz (1.44 +/- 1/60), labels 86.4 / 92.0 exact")


def test_criterion_13_train_fraction_sweep(uwb_data, base_checkpoint):
    wins = 0
    pairs = []
    for seed in range(5):
        cfg_small = replace(desk_preset("uwb_finetune"), seed=seed, train_fraction=0.1)
        cfg_full = replace(desk_preset("uwb_finetune"), seed=seed)
        small = train(cfg_small, uwb_data["train"], uwb_data["val"],
                      base_checkpoint=base_checkpoint["dir"])
        full = train(cfg_full, uwb_data["train"], uwb_data["val"],
                     base_checkpoint=base_checkpoint["dir"])
        mae_small = np.abs(small.model.predict(uwb_data["test"].normalized_inputs())
                           - uwb_data["test"].labels).mean()
        mae_full = np.abs(full.model.predict(uwb_data["test"].normalized_inputs())
                          - uwb_data["test"].labels).mean()
        wins += mae_full <= mae_small
        pairs.append(f"s{seed}: 100% {mae_full:.2f} vs 10% {mae_small:.2f}")
    ok = wins >= 4
    report(13, ok, f"UWB fine-tune test MAE (bpm): {'; '.join(pairs)} "
                   f"-> {wins}/5 seeds with full set <= 10% subset (need >= 4)")
