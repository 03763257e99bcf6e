"""Simulate one FMCW and one IR-UWB scene and look at what the radars see.

Walks through the chest-micromotion model, renders both radar cubes, and
plots the range profile, the occupied bin's phase, and its spectrum.
Figures land in demos/output/.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

import radar_vitals as rv

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

scene = rv.SceneSpec(
    target_range=1.0,
    respiration_rate=0.25,        # 15 breaths/min
    heart_rate=72.0,              # 1.2 Hz
    respiration_amplitude=4e-3,   # 4 mm chest excursion
    noise_std=0.3,
    rng_seed=7,
    duration=60.0,
)
print(f"subject at {scene.target_range} m, HR {scene.heart_rate} bpm, "
      f"cardiac amplitude {scene.cardiac_amplitude * 1e3:.2f} mm "
      f"(1/20th of respiration)")

# the displacement the radar must resolve
t = np.arange(1800) / 30.0
d = rv.displacement_series(scene, rate=30.0, n=1800)

fmcw = rv.fmcw_preset()
cube = rv.simulate_fmcw(scene, fmcw)
print(f"FMCW chirp cube: {cube.values.shape} (fast x antennas x slow)")

profile = rv.range_fft(cube.values)
power = np.mean(np.abs(profile) ** 2, axis=(1, 2))
target_bin = int(np.rint(scene.target_range / fmcw.range_resolution))
print(f"range FFT -> {profile.shape}; strongest bin {power.argmax()} "
      f"(expected {target_bin}, {fmcw.range_resolution * 100:.1f} cm bins)")

phase = rv.unwrap_phase(profile[target_bin, 0])
expected = 4 * np.pi * d / fmcw.wavelength
print(f"phase excursion {phase.max() - phase.min():.2f} rad; "
      f"4*pi*d/lambda predicts {expected.max() - expected.min():.2f} rad")

uwb = rv.uwb_preset()
scene_u = rv.SceneSpec(target_range=0.9, heart_rate=72.0, noise_std=0.05,
                       rng_seed=8, duration=60.0)
cube_u = rv.simulate_uwb(scene_u, uwb)
print(f"IR-UWB raw profile: {cube_u.values.shape} at {uwb.raw_rate:.0f} Hz")

fig, axes = plt.subplots(2, 2, figsize=(11, 7))
axes[0, 0].plot(t, d * 1e3)
axes[0, 0].set(title="chest displacement", xlabel="time [s]", ylabel="mm")
axes[0, 1].semilogy(np.arange(129) * fmcw.range_resolution, power)
axes[0, 1].set(title="FMCW range power", xlabel="range [m]")
axes[1, 0].plot(t, phase - phase.mean(), label="unwrapped phase")
axes[1, 0].plot(t, expected - expected.mean(), "--", label="4πd/λ")
axes[1, 0].set(title="target-bin phase vs displacement law", xlabel="time [s]",
               ylabel="rad")
axes[1, 0].legend()
freqs = np.fft.rfftfreq(1800, 1 / 30)
axes[1, 1].semilogy(freqs, np.abs(np.fft.rfft(phase - phase.mean())))
axes[1, 1].axvline(1.2, color="r", ls=":", label="HR 1.2 Hz")
axes[1, 1].axvline(0.25, color="g", ls=":", label="resp 0.25 Hz")
axes[1, 1].set(title="phase spectrum", xlabel="Hz", xlim=(0, 4))
axes[1, 1].legend()
fig.tight_layout()
fig.savefig(OUT / "01_scene.png", dpi=110)
print(f"figure -> {OUT / '01_scene.png'}")
