"""Synthetic radar scenes: a parametric chest-micromotion model rendered
into FMCW chirp cubes and IR-UWB range-profile cubes with exact HR labels.

The subject is a point target at ``target_range`` whose displacement is

    d(t) = A_r * w(2 pi f_r t) + A_c * sin(2 pi f_c t) + drift(t)

with w either a pure sinusoid or a raised-cosine pulse train (harmonics at
2 f_r, like a real chest). The radar return carries the displacement in its
carrier phase, 4 pi (r0 + d(t)) / lambda, which is the quantity the whole
downstream pipeline recovers.

FMCW chirps are synthesized as beat-signal cosines whose frequency is
quantized to the FFT bin grid, so the range FFT concentrates the target at
round(r / dr) with the carrier phase reproduced exactly at that bin.
Target energy is spread over +/-2 neighbouring bins with a sinc-shaped
taper to mimic point-target leakage. Static clutter occupies a few random
bins away from the target and a slow-time-constant return, so the clutter
filter has real work to do.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .dsp import ChirpCube, RangeProfileCube, segment_stream
from .radar import RadarSpec

# sinc-shaped energy spread over +/-2 bins around the target
_SPREAD_OFFSETS = np.array([-2, -1, 0, 1, 2])
_SPREAD_WEIGHTS = np.sinc(0.4 * _SPREAD_OFFSETS)

DRIFT_KNOT_SPACING_S = 20.0  # keeps drift energy below 0.05 Hz


@dataclass
class SceneSpec:
    """One synthetic subject session in front of one radar."""

    target_range: float = 1.0  # m
    respiration_rate: float = 0.25  # Hz
    heart_rate: float = 72.0  # bpm
    respiration_amplitude: float = 4e-3  # m
    cardiac_amplitude: float | None = None  # m; default respiration/20
    drift_amplitude: float = 0.0  # m
    respiration_waveform: str = "raised_cosine"  # or "sinusoid"
    noise_std: float = 0.0  # per-sample (FMCW) / per-component (UWB) std
    rng_seed: int = 0
    duration: float = 60.0  # s
    antenna_gains: tuple | None = None
    amplitude_modulation: float = 0.2  # relative return-strength swing with motion
    clutter_bins: int = 3
    clutter_amplitude: float = 2.0
    subject_id: str | None = None
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cardiac_amplitude is None:
            self.cardiac_amplitude = self.respiration_amplitude / 20.0
        if self.respiration_amplitude < 0 or self.cardiac_amplitude < 0 or self.drift_amplitude < 0:
            raise ValueError("displacement amplitudes must be non-negative")
        if self.respiration_rate <= 0:
            raise ValueError(f"respiration_rate must be positive, got {self.respiration_rate}")
        if not 30.0 <= self.heart_rate <= 220.0:
            raise ValueError(f"heart_rate {self.heart_rate} bpm outside [30, 220]")
        if self.respiration_waveform not in ("raised_cosine", "sinusoid"):
            raise ValueError(f"unknown respiration waveform {self.respiration_waveform!r}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not 0.0 <= self.amplitude_modulation < 1.0:
            raise ValueError("amplitude_modulation must be in [0, 1)")

    @property
    def cardiac_rate(self) -> float:
        return self.heart_rate / 60.0


def _motion_rng(scene: SceneSpec) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(scene.rng_seed), 0]))


def _noise_rng(scene: SceneSpec) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(scene.rng_seed), 1]))


def _clutter_rng(scene: SceneSpec) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(scene.rng_seed), 2]))


def _raised_cosine(theta: np.ndarray) -> np.ndarray:
    # ((1+cos)/2)^2 has mean 3/8 and peak 1; rescale to zero mean, peak +1.
    pulse = ((1.0 + np.cos(theta)) / 2.0) ** 2
    return (pulse - 0.375) / 0.625


def _drift(scene: SceneSpec, t: np.ndarray) -> np.ndarray:
    if scene.drift_amplitude == 0.0:
        return np.zeros_like(t)
    rng = _motion_rng(scene)
    n_knots = max(int(np.ceil(scene.duration / DRIFT_KNOT_SPACING_S)) + 2, 4)
    knots_t = np.linspace(0.0, max(scene.duration, t[-1] if t.size else 0.0), n_knots)
    walk = np.cumsum(rng.standard_normal(n_knots))
    walk -= walk[0]
    peak = np.max(np.abs(walk))
    if peak > 0:
        walk *= scene.drift_amplitude / peak
    return CubicSpline(knots_t, walk)(t)


def _motion_components(scene: SceneSpec, rate: float, n: int):
    """Normalized respiratory/cardiac waveforms plus the drift, in metres."""
    if n < 1:
        raise ValueError("need at least one sample")
    if rate <= 0:
        raise ValueError("sampling rate must be positive")
    t = np.arange(n) / rate
    if scene.respiration_waveform == "sinusoid":
        resp = np.sin(2.0 * np.pi * scene.respiration_rate * t)
    else:
        resp = _raised_cosine(2.0 * np.pi * scene.respiration_rate * t)
    cardiac = np.sin(2.0 * np.pi * scene.cardiac_rate * t)
    return resp, cardiac, _drift(scene, t)


def displacement_series(scene: SceneSpec, rate: float, n: int) -> np.ndarray:
    """Chest displacement in metres sampled at ``rate`` Hz for ``n`` samples."""
    resp, cardiac, drift = _motion_components(scene, rate, n)
    return (scene.respiration_amplitude * resp
            + scene.cardiac_amplitude * cardiac + drift)


def _target_bins_and_phase(scene: SceneSpec, spec: RadarSpec, rate: float, n: int):
    """Per-timestep occupied bin, carrier phase, and return amplitude.

    The return strength pulses with the normalized cardiac waveform
    (pulse-wave reflectivity modulation, depth ``amplitude_modulation``),
    so the magnitude feature carries heart-rate information the way real
    hardware does; the carrier phase is pure 4 pi r / lambda either way.
    """
    resp, cardiac, drift = _motion_components(scene, rate, n)
    d = scene.respiration_amplitude * resp + scene.cardiac_amplitude * cardiac + drift
    r = scene.target_range + d
    bins = np.rint(r / spec.range_resolution).astype(int)
    phase = 4.0 * np.pi * r / spec.wavelength
    am = 1.0 + scene.amplitude_modulation * (
        cardiac if scene.cardiac_amplitude > 0 else 0.0)
    return bins, phase, am


def _clutter_bin_choices(scene: SceneSpec, spec: RadarSpec, target_bin: int) -> np.ndarray:
    """Random static-clutter bins, kept off the target's +/-2 bin cluster."""
    rng = _clutter_rng(scene)
    lo, hi = 1, spec.range_bins - 2 if spec.kind == "fmcw" else spec.range_bins - 1
    allowed = [b for b in range(lo, hi + 1) if abs(b - target_bin) > 2]
    k = min(scene.clutter_bins, len(allowed))
    if k == 0:
        return np.array([], dtype=int)
    return rng.choice(np.asarray(allowed), size=k, replace=False)


def _check_range(scene: SceneSpec, spec: RadarSpec) -> None:
    if not 0 < scene.target_range < spec.max_range:
        raise ValueError(
            f"target_range {scene.target_range} m outside (0, {spec.max_range:.2f}) m "
            f"for the {spec.kind} preset"
        )


def simulate_fmcw(scene: SceneSpec, spec: RadarSpec) -> ChirpCube:
    """Render a scene into burst-averaged real chirps [256 x ant x slow_time].

    Beat frequencies sit exactly on FFT bins, so the range FFT places the
    target at round(r/dr) with phase 4 pi r / lambda and no leakage beyond
    the configured sinc spread. ``noise_std`` is the std of the additive
    fast-time noise after burst averaging.
    """
    if spec.kind != "fmcw":
        raise ValueError(f"simulate_fmcw needs an FMCW spec, got {spec.kind!r}")
    _check_range(scene, spec)
    n_fast = spec.fast_time_samples
    n_slow = int(round(scene.duration * spec.slow_time_rate))
    bins, phase, am = _target_bins_and_phase(scene, spec, spec.slow_time_rate, n_slow)
    if np.any(bins - 2 < 0) or np.any(bins + 2 > n_fast // 2):
        raise ValueError("target bin cluster falls outside the unambiguous range")

    gains = np.ones(spec.num_antennas) if scene.antenna_gains is None \
        else np.asarray(scene.antenna_gains, dtype=float)
    if gains.shape != (spec.num_antennas,):
        raise ValueError(f"antenna_gains must have length {spec.num_antennas}")

    fast_idx = np.arange(n_fast)
    rotor = np.exp(2j * np.pi * fast_idx / n_fast)  # one cycle across the chirp
    carrier = am * np.exp(1j * phase)  # [slow]

    values = np.zeros((n_fast, spec.num_antennas, n_slow))
    unique_bins = np.unique(bins)
    for j, w in zip(_SPREAD_OFFSETS, _SPREAD_WEIGHTS):
        if unique_bins.size == 1:
            col = rotor ** (unique_bins[0] + j)  # [fast]
            comp = np.real(np.outer(col, w * carrier))  # [fast x slow]
        else:
            cols = rotor[:, None] ** (bins[None, :] + j)  # [fast x slow]
            comp = np.real(cols * (w * carrier)[None, :])
        values += comp[:, None, :] * gains[None, :, None]

    clutter_bins = _clutter_bin_choices(scene, spec, int(np.rint(scene.target_range / spec.range_resolution)))
    if clutter_bins.size and scene.clutter_amplitude > 0:
        rng = _clutter_rng(scene)
        psi = rng.uniform(0, 2 * np.pi, size=(clutter_bins.size, spec.num_antennas))
        amp = scene.clutter_amplitude * rng.uniform(0.5, 1.0, size=psi.shape)
        for i, b in enumerate(clutter_bins):
            static = amp[i][None, :] * np.cos(2 * np.pi * b * fast_idx[:, None] / n_fast + psi[i][None, :])
            values += static[:, :, None]

    if scene.noise_std > 0:
        rng = _noise_rng(scene)
        values = values + scene.noise_std * rng.standard_normal(
            values.shape, dtype=np.float32).astype(values.dtype)

    truth = np.full(n_slow, scene.heart_rate)
    return ChirpCube(values=values, spec=spec, truth_hr=truth,
                     subject_id=scene.subject_id, tags=dict(scene.tags))


def simulate_fmcw_bursts(scene: SceneSpec, spec: RadarSpec, chirps_per_burst: int = 20,
                         chirp_noise_std: float = 0.0) -> np.ndarray:
    """Raw repeated chirps [fast x ant x slow x chirp] before burst averaging.

    The deterministic return repeats within a burst; per-chirp noise is
    i.i.d., so averaging the burst reduces its variance by 1/chirps.
    """
    cube = simulate_fmcw(replace(scene, noise_std=0.0), spec)
    rng = _noise_rng(scene)
    bursts = np.repeat(cube.values[:, :, :, None], chirps_per_burst, axis=3)
    if chirp_noise_std > 0:
        bursts = bursts + chirp_noise_std * rng.standard_normal(bursts.shape)
    return bursts


def simulate_uwb(scene: SceneSpec, spec: RadarSpec) -> RangeProfileCube:
    """Render a scene into a complex range-profile cube at the raw 200 Hz rate.

    Target energy lands in bin round(r/0.3) (sinc spread over +/-2 bins) with
    phase 4 pi r / lambda; static complex clutter and i.i.d. complex Gaussian
    noise (``noise_std`` per component) are added on top.
    """
    if spec.kind != "uwb":
        raise ValueError(f"simulate_uwb needs a UWB spec, got {spec.kind!r}")
    _check_range(scene, spec)
    rate = spec.raw_rate
    n_t = int(round(scene.duration * rate))
    bins, phase, am = _target_bins_and_phase(scene, spec, rate, n_t)
    if np.any(bins < 0) or np.any(bins >= spec.range_bins):
        raise ValueError("target bin falls outside the range profile")

    gains = np.ones(spec.num_antennas) if scene.antenna_gains is None \
        else np.asarray(scene.antenna_gains, dtype=float)
    if gains.shape != (spec.num_antennas,):
        raise ValueError(f"antenna_gains must have length {spec.num_antennas}")

    carrier = am * np.exp(1j * phase)  # [time]
    values = np.zeros((spec.range_bins, spec.num_antennas, n_t), dtype=complex)
    unique_bins = np.unique(bins)
    for j, w in zip(_SPREAD_OFFSETS, _SPREAD_WEIGHTS):
        contrib = (w * carrier)[None, :] * gains[:, None]  # [ant x time]
        if unique_bins.size == 1:
            b = unique_bins[0] + j
            if 0 <= b < spec.range_bins:
                values[b] += contrib
        else:
            kv = bins + j
            for b in np.unique(kv):
                if 0 <= b < spec.range_bins:
                    mask = kv == b
                    values[b][:, mask] += contrib[:, mask]

    clutter_bins = _clutter_bin_choices(scene, spec, int(np.rint(scene.target_range / spec.range_resolution)))
    if clutter_bins.size and scene.clutter_amplitude > 0:
        rng = _clutter_rng(scene)
        static = scene.clutter_amplitude * (
            rng.uniform(0.5, 1.0, size=(clutter_bins.size, spec.num_antennas))
            * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(clutter_bins.size, spec.num_antennas)))
        )
        values[clutter_bins] += static[:, :, None]

    if scene.noise_std > 0:
        rng = _noise_rng(scene)
        noise = rng.standard_normal((spec.range_bins, spec.num_antennas, n_t, 2), dtype=np.float32)
        values = values + scene.noise_std * (noise[..., 0] + 1j * noise[..., 1])

    truth = np.full(n_t, scene.heart_rate)
    return RangeProfileCube(values=values, slow_time_rate=rate, spec=spec,
                            truth_hr=truth, subject_id=scene.subject_id,
                            tags=dict(scene.tags))


def simulate_scene(scene: SceneSpec, spec: RadarSpec):
    """Dispatch to the right simulator for the radar kind."""
    if spec.kind == "fmcw":
        return simulate_fmcw(scene, spec)
    return simulate_uwb(scene, spec)


def split_subjects(subject_ids: list[str], ratios: tuple[float, float, float],
                   seed: int = 0) -> dict[str, list[str]]:
    """Assign unique subject ids to train/val/test by largest-remainder counts."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    uniq = sorted(set(subject_ids))
    n = len(uniq)
    shuffled = list(uniq)
    np.random.default_rng(np.random.SeedSequence([seed, 97])).shuffle(shuffled)
    exact = [n * r for r in ratios]
    counts = [int(np.floor(e + 1e-9)) for e in exact]
    leftover = n - sum(counts)
    by_frac = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in range(leftover):
        counts[by_frac[i % len(ratios)]] += 1
    names = ["train", "val", "test"]
    out, pos = {}, 0
    for name, k in zip(names, counts):
        out[name] = sorted(shuffled[pos:pos + k])
        pos += k
    if n == 1:
        warnings.warn("single subject: all segments land in one split", stacklevel=2)
    return out


def make_dataset(scenes: list[SceneSpec], spec: RadarSpec,
                 split_ratios: tuple[float, float, float],
                 out_dir, seed: int = 0):
    """Simulate every scene, write raw 60 s segment tensors + a JSON manifest.

    Splits are by subject id, never by segment. FMCW segments are stored as
    float32 chirp cubes [256 x ant x 1800]; UWB segments as complex64 raw
    range profiles [52 x ant x 12000] (still at 200 Hz).
    """
    from . import storage  # local import: storage depends on dsp types only

    subject_ids = []
    for i, scene in enumerate(scenes):
        if scene.subject_id is None:
            scene.subject_id = f"subj{i:04d}"
        subject_ids.append(scene.subject_id)
    splits = split_subjects(subject_ids, split_ratios, seed=seed)
    split_of = {}
    for name, ids in splits.items():
        for sid in ids:
            if sid in split_of:
                raise ValueError(f"subject id {sid!r} assigned to more than one split")
            split_of[sid] = name

    records = []
    for scene in scenes:
        cube = simulate_scene(scene, spec)
        stream = cube if isinstance(cube, RangeProfileCube) else RangeProfileCube(
            values=cube.values, slow_time_rate=spec.slow_time_rate, spec=spec,
            truth_hr=cube.truth_hr, subject_id=cube.subject_id, tags=cube.tags)
        is_fmcw = spec.kind == "fmcw"
        segs = segment_stream(stream)
        split = split_of[scene.subject_id]
        for k, seg in enumerate(segs):
            rel = f"{split}/{scene.subject_id}_seg{k:03d}.rvds"
            data = seg.cube.values.astype(np.float32 if is_fmcw else np.complex64)
            storage.write_segment(out_dir, rel, data)
            tags = dict(scene.tags)
            tags.setdefault("distance_m", scene.target_range)
            records.append({
                "file": rel,
                "subject_id": scene.subject_id,
                "split": split,
                "label_hr": seg.label_hr,
                "start_time": seg.cube.start_time,
                "valid": True,
                "tags": tags,
            })
    manifest = storage.DatasetManifest(
        kind=spec.kind, stage="raw", radar=spec.to_dict(),
        splits=splits, segments=records)
    storage.save_manifest(manifest, out_dir)
    return manifest
