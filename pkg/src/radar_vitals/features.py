"""Feature extraction: bin selection around the detected user, magnitude and
unwrapped phase, high-pass filtering, respiratory-trend subtraction, and the
flattened [T x S x 1] model input.

Rows are laid out bin-major, antenna-middle, feature-pair innermost, so
physically adjacent signals sit next to each other in the spatial axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import butter, savgol_filter, sosfiltfilt

FEATURE_NAMES = ("unwrapped_angle", "magnitude")


class SegmentRejected(ValueError):
    """Presence detection failed; the segment produces no features."""


@dataclass(frozen=True)
class FeatureConfig:
    """Settings for turning one range-profile segment into model features.

    ``antennas`` is "all", "pca" (principal-component beamforming down to a
    single virtual antenna), or a tuple of antenna indices. The high-pass
    default of 0.3 Hz keeps the cardiac band; the literal 3.0 Hz variant is
    selectable for fidelity experiments.
    """

    num_range_bins: int = 32
    antennas: str | tuple = "all"
    features: tuple = FEATURE_NAMES  # order defines the row order
    highpass_cutoff: float = 0.3  # Hz
    sg_order: int = 3
    sg_window_s: float = 1.5
    sample_rate: float = 30.0

    def __post_init__(self):
        if self.num_range_bins < 1:
            raise ValueError("num_range_bins must be >= 1")
        bad = [f for f in self.features if f not in FEATURE_NAMES]
        if bad or not self.features:
            raise ValueError(f"features must be drawn from {FEATURE_NAMES}, got {self.features}")
        if self.sg_window_samples <= self.sg_order + 1:
            raise ValueError("Savitzky-Golay window too short for the polynomial order")

    @property
    def sg_window_samples(self) -> int:
        n = int(round(self.sg_window_s * self.sample_rate))
        return n if n % 2 == 1 else n + 1

    def swapped(self) -> "FeatureConfig":
        return replace(self, features=tuple(reversed(self.features)))

    def spatial_size(self, num_antennas: int) -> int:
        n_ant = num_antennas if self.antennas == "all" else \
            (1 if self.antennas == "pca" else len(self.antennas))
        return len(self.features) * n_ant * self.num_range_bins


@dataclass
class FeatureTensor:
    """Normalized model input: values[T, S, 1] in [0, 1], plus the HR label."""

    values: np.ndarray
    label_hr: float
    subject_id: str | None = None
    tags: dict = field(default_factory=dict)

    @property
    def spatial_size(self) -> int:
        return self.values.shape[1]


def select_bins(values: np.ndarray, center: int, k: int) -> np.ndarray:
    """Slice ``k`` bins around ``center`` (k//2 below, k//2-1 above for even k).

    The window is shifted to stay inside the array when possible; when fewer
    than ``k`` bins exist, missing positions are zero-filled while the
    available bins keep their closest-to-ideal alignment.
    """
    n = values.shape[0]
    lo_lim = min(0, n - k)
    hi_lim = max(0, n - k)
    start = int(np.clip(center - k // 2, lo_lim, hi_lim))
    out = np.zeros((k,) + values.shape[1:], dtype=values.dtype)
    src_lo = max(start, 0)
    src_hi = min(start + k, n)
    if src_hi > src_lo:
        out[src_lo - start:src_hi - start] = values[src_lo:src_hi]
    return out


def unwrap_phase(series: np.ndarray) -> np.ndarray:
    """Unwrap the phase of a complex time series (time on the last axis).

    Zero-magnitude samples carry the previous sample's phase forward
    (leading zeros take phase 0), then 2 pi jumps are removed so successive
    differences stay within (-pi, pi].
    """
    series = np.asarray(series)
    phase = np.angle(series)
    zero = np.abs(series) == 0
    if np.any(zero):
        n = series.shape[-1]
        idx = np.where(~zero, np.arange(n), -1)
        idx = np.maximum.accumulate(idx, axis=-1)
        phase = np.where(idx >= 0, np.take_along_axis(phase, np.maximum(idx, 0), axis=-1), 0.0)
    return np.unwrap(phase, axis=-1)


def highpass(series: np.ndarray, cutoff: float, sample_rate: float = 30.0) -> np.ndarray:
    """Zero-phase 4th-order Butterworth high-pass along the last axis."""
    if cutoff >= sample_rate / 2:
        raise ValueError(f"cutoff {cutoff} Hz is at or above Nyquist ({sample_rate / 2} Hz)")
    sos = butter(4, cutoff, btype="highpass", fs=sample_rate, output="sos")
    return sosfiltfilt(sos, series, axis=-1)


def adaptive_respiration_filter(series: np.ndarray, order: int = 3,
                                window: int = 45) -> np.ndarray:
    """Subtract the Savitzky-Golay respiratory trend (mirror-padded edges).

    The smoothing removes the respiration fundamental and its first
    harmonic from the trend estimate while barely touching the cardiac
    band, so the subtraction leaves the heartbeat in place.
    """
    series = np.asarray(series)
    if series.shape[-1] < window:
        raise ValueError(f"series length {series.shape[-1]} shorter than the {window}-sample window")
    trend = savgol_filter(series, window_length=window, polyorder=order,
                          axis=-1, mode="mirror")
    return series - trend


def pca_beamform(values: np.ndarray) -> np.ndarray:
    """Combine antennas per range bin along the leading principal component.

    values[bins, ant, time] -> [bins, 1, time]. The projection's global
    phase is rotated so it correlates positively with antenna 0 (falling
    back to the strongest antenna, or to antenna 0 verbatim when the
    covariance is degenerate).
    """
    values = np.asarray(values)
    bins, n_ant, n_t = values.shape
    if n_ant < 2:
        raise ValueError("PCA beamforming needs at least 2 antennas")
    out = np.zeros((bins, 1, n_t), dtype=np.result_type(values.dtype, np.complex64))
    for b in range(bins):
        x = values[b]
        xc = x - x.mean(axis=1, keepdims=True)
        cov = (xc @ xc.conj().T) / n_t
        scale = np.abs(np.trace(cov))
        if not np.isfinite(scale) or scale < 1e-30:
            out[b, 0] = x[0]
            continue
        _, vecs = np.linalg.eigh(cov)
        lead = vecs[:, -1]
        proj = lead.conj() @ x
        ref = next((x[a] for a in range(n_ant) if np.linalg.norm(x[a]) > 0), None)
        if ref is not None:
            inner = proj @ ref.conj()
            if np.abs(inner) > 0:
                proj = proj * (inner.conjugate() / np.abs(inner))
        out[b, 0] = proj
    return out


def normalize_rows(rows: np.ndarray) -> np.ndarray:
    """Min-max scale each row to [0, 1]; constant rows map to all 0.5."""
    lo = rows.min(axis=-1, keepdims=True)
    hi = rows.max(axis=-1, keepdims=True)
    span = hi - lo
    flat = span == 0
    span = np.where(flat, 1.0, span)
    out = (rows - lo) / span
    return np.where(flat, 0.5, out)


def _select_antennas(values: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    if cfg.antennas == "all":
        return values
    if cfg.antennas == "pca":
        return pca_beamform(values)
    return values[:, list(cfg.antennas), :]


def extract_feature_rows(values: np.ndarray, center_bin: int,
                         cfg: FeatureConfig) -> np.ndarray:
    """Pre-normalization feature rows [S x T] from a clutter-filtered cube."""
    sel = _select_antennas(np.asarray(values), cfg)
    sel = select_bins(sel, center_bin, cfg.num_range_bins)
    k, n_ant, n_t = sel.shape
    feats = []
    for name in cfg.features:
        if name == "magnitude":
            feats.append(np.abs(sel))
        else:
            feats.append(unwrap_phase(sel))
    rows = np.stack(feats, axis=2).reshape(k * n_ant * len(cfg.features), n_t)
    rows = highpass(rows, cfg.highpass_cutoff, cfg.sample_rate)
    rows = adaptive_respiration_filter(rows, cfg.sg_order, cfg.sg_window_samples)
    return rows


def assemble_features(segment, presence, cfg: FeatureConfig) -> FeatureTensor:
    """Full per-segment feature pipeline ending in min-max normalized rows.

    ``segment`` is a Segment whose cube is already clutter-filtered;
    ``presence`` the detection result for that cube. Raises SegmentRejected
    when the user was not detected.
    """
    if not presence.detected:
        raise SegmentRejected("no user detected in segment")
    rows = extract_feature_rows(segment.cube.values, presence.bin_index, cfg)
    norm = normalize_rows(rows)
    return FeatureTensor(values=norm.T[:, :, None],
                         label_hr=segment.label_hr,
                         subject_id=segment.subject_id,
                         tags=dict(segment.tags))
