"""Cell-averaging CFAR presence detection on clutter-filtered range profiles.

Per-bin power is the mean of |value|^2 over all antennas and the full
segment. A bin is detected when its power exceeds ``threshold`` times the
mean power of the training cells around it (guard cells excluded); the
detection is the highest-power detected bin. The threshold is applied to
power, not amplitude (the source material does not say which; see
CfarConfig).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CfarConfig:
    """Cell-averaging CFAR settings.

    ``threshold`` is a power ratio against the local noise estimate.
    ``training_cells`` and ``guard_cells`` are per side; bins near the array
    edges fall back to one-sided training windows.
    """

    threshold: float = 1.5
    training_cells: int = 8
    guard_cells: int = 2

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.training_cells < 1:
            raise ValueError("need at least one training cell per side")
        if self.guard_cells < 0:
            raise ValueError("guard_cells must be non-negative")


@dataclass
class PresenceResult:
    detected: bool
    bin_index: int = -1
    peak_power: float = 0.0
    noise_floor: float = 0.0


def bin_power(values: np.ndarray) -> np.ndarray:
    """Mean |v|^2 over antennas and time per range bin."""
    values = np.asarray(values)
    return np.mean(np.abs(values) ** 2, axis=(1, 2))


def cfar_noise_floor(power: np.ndarray, cfg: CfarConfig) -> np.ndarray:
    """Per-bin training-cell mean power (one-sided at the edges)."""
    n = power.shape[0]
    train, guard = cfg.training_cells, cfg.guard_cells
    csum = np.concatenate([[0.0], np.cumsum(power)])

    def window_sum(lo: np.ndarray, hi: np.ndarray):
        lo = np.clip(lo, 0, n)
        hi = np.clip(hi, 0, n)
        return csum[hi] - csum[lo], hi - lo

    idx = np.arange(n)
    left_sum, left_cnt = window_sum(idx - guard - train, idx - guard)
    right_sum, right_cnt = window_sum(idx + guard + 1, idx + guard + train + 1)
    total = left_sum + right_sum
    count = left_cnt + right_cnt
    floor = np.full(n, np.inf)
    ok = count > 0
    floor[ok] = total[ok] / count[ok]
    return floor


def cfar_mask(power: np.ndarray, cfg: CfarConfig = CfarConfig()) -> np.ndarray:
    """Boolean per-bin detection decisions for a power profile."""
    floor = cfar_noise_floor(power, cfg)
    return power > cfg.threshold * floor


def detect(values: np.ndarray, cfg: CfarConfig = CfarConfig()) -> PresenceResult:
    """Run CA-CFAR over a clutter-filtered cube [bins x ant x time].

    Returns the highest-power bin among those whose power strictly exceeds
    threshold * local noise floor; ties break toward the lower bin index.
    """
    power = bin_power(values)
    floor = cfar_noise_floor(power, cfg)
    hits = power > cfg.threshold * floor
    if not np.any(hits):
        return PresenceResult(detected=False)
    hit_idx = np.nonzero(hits)[0]
    best = hit_idx[np.argmax(power[hit_idx])]  # argmax keeps the first (lowest) on ties
    return PresenceResult(detected=True, bin_index=int(best),
                          peak_power=float(power[best]), noise_floor=float(floor[best]))
