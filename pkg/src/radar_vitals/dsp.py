"""Signal-processing front end: burst averaging, segmentation, clutter
removal, fast-time FFT, and slow-time resampling of the impulse radar.

All transforms are pure and linear; segmentation views never alias the
caller's data once a filter is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .radar import RadarSpec

SEGMENT_SECONDS = 60.0
STEP_SECONDS = 15.0


@dataclass
class RangeProfileCube:
    """Complex range profiles: values[range_bin, antenna, time].

    ``slow_time_rate`` is the sampling rate of the time axis. ``truth_hr``
    (bpm per timestep) and identification metadata ride along when the cube
    came out of the simulator.
    """

    values: np.ndarray
    slow_time_rate: float
    spec: RadarSpec | None = None
    truth_hr: np.ndarray | None = None
    subject_id: str | None = None
    start_time: float = 0.0
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.ndim != 3:
            raise ValueError(f"expected [bins x antennas x time], got shape {self.values.shape}")

    @property
    def num_bins(self) -> int:
        return self.values.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.values.shape[1]

    @property
    def num_samples(self) -> int:
        return self.values.shape[2]


@dataclass
class Segment:
    """One 60 s analysis window (1800 samples at 30 Hz) with its HR label."""

    cube: RangeProfileCube
    label_hr: float
    valid: bool = True

    @property
    def subject_id(self):
        return self.cube.subject_id

    @property
    def tags(self):
        return self.cube.tags


@dataclass
class ChirpCube:
    """Burst-averaged real chirps: values[fast_time, antenna, slow_time]."""

    values: np.ndarray
    spec: RadarSpec
    truth_hr: np.ndarray
    subject_id: str | None = None
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.ndim != 3:
            raise ValueError(f"expected [fast x antennas x slow], got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("chirp cube contains non-finite values")


def average_chirps(burst: np.ndarray) -> np.ndarray:
    """Mean over the chirp axis of one burst, shaped [fast_time, chirps]."""
    burst = np.asarray(burst)
    if burst.ndim != 2 or burst.shape[1] < 1:
        raise ValueError(f"burst must be [fast x chirps] with >= 1 chirp, got {burst.shape}")
    return burst.mean(axis=1)


def segment_stream(cube: RangeProfileCube, window_s: float = SEGMENT_SECONDS,
                   step_s: float = STEP_SECONDS) -> list[Segment]:
    """Split a stream into overlapping windows; trailing partials are dropped.

    Returns an empty list when the stream is shorter than one window.
    The per-segment HR label is the mean of the truth series inside the
    window (exact for constant-rate scenes).
    """
    rate = cube.slow_time_rate
    win = int(round(window_s * rate))
    step = int(round(step_s * rate))
    total = cube.num_samples
    if total < win:
        return []
    segments = []
    for start in range(0, total - win + 1, step):
        sl = cube.values[:, :, start:start + win]
        truth = None
        label = float("nan")
        if cube.truth_hr is not None:
            truth = cube.truth_hr[start:start + win]
            label = float(truth.mean())
        seg_cube = RangeProfileCube(
            values=sl,
            slow_time_rate=rate,
            spec=cube.spec,
            truth_hr=truth,
            subject_id=cube.subject_id,
            start_time=cube.start_time + start / rate,
            tags=dict(cube.tags),
        )
        segments.append(Segment(cube=seg_cube, label_hr=label))
    return segments


def clutter_filter(values: np.ndarray) -> np.ndarray:
    """Remove static returns by subtracting the slow-time mean per (bin, antenna).

    Works on any array whose last axis is time. Idempotent; output mean over
    time is zero to machine precision.
    """
    values = np.asarray(values)
    if values.shape[-1] < 2:
        raise ValueError("need at least 2 time samples for clutter filtering")
    return values - values.mean(axis=-1, keepdims=True)


def range_fft(chirps: np.ndarray, window: str = "rect") -> np.ndarray:
    """One-sided fast-time FFT: real [fast x ant x time] -> complex [bins x ant x time].

    Bin k maps to range k * c/2B. No normalization; ``window`` may be
    "rect" (default, keeps the bin mapping exact) or "hann".
    """
    chirps = np.asarray(chirps)
    if not np.all(np.isfinite(chirps)):
        raise ValueError("non-finite fast-time samples")
    n = chirps.shape[0]
    if n % 2 != 0:
        raise ValueError(f"fast-time length must be even, got {n}")
    if window == "hann":
        chirps = chirps * np.hanning(n)[:, None, None]
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}")
    return np.fft.rfft(chirps, axis=0)


def downsample_uwb(values: np.ndarray, in_rate: float = 200.0, out_rate: float = 30.0) -> np.ndarray:
    """Average the time axis down from ``in_rate`` to ``out_rate``.

    Each output sample is the mean of the input over its output-sample
    window; the non-integer 200/30 ratio is handled by weighting the
    boundary input samples by their fractional overlap.
    """
    values = np.asarray(values)
    n_in = values.shape[-1]
    ratio = in_rate / out_rate
    n_out = int(np.floor(n_in / ratio + 1e-9))
    if n_out == 0:
        return values[..., :0]
    # Integral of the sample-and-hold signal up to fractional index x,
    # via the cumulative sum: F(i + f) = cum[i] + f * values[i].
    cum = np.concatenate(
        [np.zeros(values.shape[:-1] + (1,), dtype=values.dtype),
         np.cumsum(values, axis=-1)], axis=-1)

    def integral(x: np.ndarray) -> np.ndarray:
        idx = np.floor(x).astype(int)
        idx = np.minimum(idx, n_in)  # x == n_in lands on the final cumsum entry
        frac = x - idx
        base = np.take(cum, idx, axis=-1)
        inner = np.take(values, np.minimum(idx, n_in - 1), axis=-1)
        return base + frac * inner

    edges = np.arange(n_out + 1) * ratio
    area = integral(edges[1:]) - integral(edges[:-1])
    return area / ratio
