"""Radar front-end descriptions and the two hardware presets."""

from __future__ import annotations

from dataclasses import dataclass, field

from scipy.constants import c as SPEED_OF_LIGHT


@dataclass(frozen=True)
class RadarSpec:
    """Static description of one radar front end.

    ``range_resolution`` and ``wavelength`` are derived (c/2B and c/f_carrier)
    and validated against any explicitly passed values.
    """

    kind: str  # "fmcw" | "uwb"
    carrier_frequency: float  # Hz
    bandwidth: float  # Hz
    num_antennas: int
    range_bins: int
    slow_time_rate: float  # Hz, post-processing
    fast_time_samples: int = 0  # FMCW only
    raw_rate: float = 0.0  # Hz, pre-downsampling (UWB)
    range_resolution: float = field(default=0.0)
    wavelength: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in ("fmcw", "uwb"):
            raise ValueError(f"unknown radar kind {self.kind!r}")
        derived_res = SPEED_OF_LIGHT / (2.0 * self.bandwidth)
        derived_wl = SPEED_OF_LIGHT / self.carrier_frequency
        if self.range_resolution:
            if abs(self.range_resolution - derived_res) > 1e-6 * derived_res:
                raise ValueError(
                    f"range_resolution {self.range_resolution} inconsistent with c/2B = {derived_res}"
                )
        else:
            object.__setattr__(self, "range_resolution", derived_res)
        if self.wavelength:
            if abs(self.wavelength - derived_wl) > 1e-6 * derived_wl:
                raise ValueError(
                    f"wavelength {self.wavelength} inconsistent with c/f = {derived_wl}"
                )
        else:
            object.__setattr__(self, "wavelength", derived_wl)

    @property
    def max_range(self) -> float:
        return self.range_bins * self.range_resolution

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "carrier_frequency_hz": self.carrier_frequency,
            "bandwidth_hz": self.bandwidth,
            "range_resolution_m": self.range_resolution,
            "wavelength_m": self.wavelength,
            "num_antennas": self.num_antennas,
            "range_bins": self.range_bins,
            "fast_time_samples": self.fast_time_samples,
            "slow_time_rate_hz": self.slow_time_rate,
            "raw_rate_hz": self.raw_rate,
        }


def fmcw_preset() -> RadarSpec:
    """60 GHz mm-wave chirp radar: 5.5 GHz bandwidth, 3 Rx, 256-sample chirps."""
    return RadarSpec(
        kind="fmcw",
        carrier_frequency=60e9,
        bandwidth=5.5e9,
        num_antennas=3,
        range_bins=129,
        slow_time_rate=30.0,
        fast_time_samples=256,
    )


def uwb_preset() -> RadarSpec:
    """8 GHz impulse radar: 500 MHz bandwidth, 2 Rx, native 200 Hz range profiles."""
    return RadarSpec(
        kind="uwb",
        carrier_frequency=8e9,
        bandwidth=500e6,
        num_antennas=2,
        range_bins=52,
        slow_time_rate=30.0,
        raw_rate=200.0,
    )


def preset(name: str) -> RadarSpec:
    if name == "fmcw":
        return fmcw_preset()
    if name == "uwb":
        return uwb_preset()
    raise ValueError(f"unknown radar preset {name!r} (expected 'fmcw' or 'uwb')")
