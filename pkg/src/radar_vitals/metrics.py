"""Evaluation machinery: MAE/MAPE, percentile-bootstrap confidence
intervals, Bland-Altman agreement, recall bookkeeping, and subgroup
breakdowns (HR bands, distance bands, categorical tags)."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np


def mae_mape(pred, truth) -> tuple[float, float]:
    """Mean absolute error (bpm) and mean absolute percentage error (%).

    Elements with zero truth are excluded from the MAPE with a warning.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.size == 0:
        raise ValueError("pred and truth must be equal-length, non-empty")
    err = np.abs(pred - truth)
    mae = float(err.mean())
    nonzero = truth != 0
    skipped = int(np.sum(~nonzero))
    if skipped:
        warnings.warn(f"{skipped} zero-truth element(s) excluded from MAPE", stacklevel=2)
    if not np.any(nonzero):
        return mae, float("nan")
    mape = float(100.0 * np.mean(err[nonzero] / truth[nonzero]))
    return mae, mape


def bootstrap_ci(errors, replicates: int = 1000, level: float = 95.0,
                 seed: int = 0, groups=None) -> tuple[float, float]:
    """Percentile bootstrap CI of the mean of ``errors``.

    With ``groups`` (e.g. subject ids), whole groups are resampled instead
    of individual segments.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size < 2:
        raise ValueError("need at least 2 errors to bootstrap")
    rng = np.random.default_rng(seed)
    lo_q, hi_q = (100.0 - level) / 2.0, 100.0 - (100.0 - level) / 2.0
    if groups is None:
        idx = rng.integers(0, errors.size, size=(replicates, errors.size))
        means = errors[idx].mean(axis=1)
    else:
        groups = np.asarray(groups)
        uniq = np.unique(groups)
        members = [np.nonzero(groups == g)[0] for g in uniq]
        means = np.empty(replicates)
        for r in range(replicates):
            pick = rng.integers(0, uniq.size, size=uniq.size)
            pooled = np.concatenate([members[p] for p in pick])
            means[r] = errors[pooled].mean()
    return float(np.percentile(means, lo_q)), float(np.percentile(means, hi_q))


@dataclass
class BlandAltman:
    bias: float
    loa_low: float
    loa_high: float
    points: np.ndarray | None = None  # (mean, diff) pairs for plotting


def bland_altman(pred, truth, with_points: bool = False) -> BlandAltman:
    """Agreement stats: bias = mean(pred - truth), limits = bias +/- 1.96 sd."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.size < 2 or pred.shape != truth.shape:
        raise ValueError("need at least 2 paired values")
    diff = pred - truth
    bias = float(diff.mean())
    sd = float(diff.std(ddof=1))
    points = np.column_stack([(pred + truth) / 2.0, diff]) if with_points else None
    return BlandAltman(bias=bias, loa_low=bias - 1.96 * sd, loa_high=bias + 1.96 * sd,
                       points=points)


def _band_label(lo: float, hi: float, unit: str = "") -> str:
    fmt = "{:g}{u}".format
    return f"[{fmt(lo, u=unit)}, {fmt(hi, u=unit)})"


def _group_key(record: dict, key: str):
    if key == "hr_band":
        band = int(np.floor(record["truth"] / 10.0))
        return (band, _band_label(band * 10, band * 10 + 10))
    if key == "distance_band":
        dist = record.get("tags", {}).get("distance_m")
        if dist is None:
            return None
        band = int(np.floor(dist / 0.5))
        return (band, _band_label(band * 0.5, band * 0.5 + 0.5, unit="m"))
    value = record.get("tags", {}).get(key)
    if value is None:
        return None
    return (str(value), str(value))


def subgroup_report(records: list[dict], keys: list[str],
                    replicates: int = 1000, seed: int = 0) -> dict[str, list[dict]]:
    """Per-key grouped MAE rows.

    ``records`` carry {"pred", "truth", "tags"}. HR bands are 10 bpm wide
    and half-open; distance bands 0.5 m; any other key groups by the
    categorical tag value. Empty groups are omitted.
    """
    out: dict[str, list[dict]] = {}
    total = len(records)
    for key in keys:
        groups: dict = {}
        for rec in records:
            gk = _group_key(rec, key)
            if gk is None:
                continue
            groups.setdefault(gk, []).append(rec)
        rows = []
        for (order, label) in sorted(groups):
            members = groups[(order, label)]
            errors = np.array([abs(r["pred"] - r["truth"]) for r in members])
            row = {
                "group": label,
                "n": len(members),
                "share": len(members) / total if total else 0.0,
                "mae": float(errors.mean()),
            }
            if errors.size >= 2:
                row["mae_ci"] = list(bootstrap_ci(errors, replicates=replicates, seed=seed))
            rows.append(row)
        out[key] = rows
    return out


@dataclass
class EvalReport:
    """Headline metrics plus agreement stats and subgroup rows."""

    mae: float
    mape: float
    mae_ci: tuple[float, float]
    recall: float
    bland_altman: dict
    n_segments: int
    subgroups: dict[str, list[dict]] = field(default_factory=dict)

    def to_json(self) -> str:
        doc = asdict(self)
        return json.dumps(doc, indent=1)

    def summary_lines(self) -> list[str]:
        lines = [
            f"segments evaluated: {self.n_segments} (recall {self.recall:.3f})",
            f"MAE  {self.mae:.3f} bpm  [95% CI {self.mae_ci[0]:.3f}, {self.mae_ci[1]:.3f}]",
            f"MAPE {self.mape:.2f} %",
            "Bland-Altman bias {bias:.3f} bpm, limits [{loa_low:.3f}, {loa_high:.3f}]".format(
                **self.bland_altman),
        ]
        for key, rows in self.subgroups.items():
            lines.append(f"by {key}:")
            for row in rows:
                ci = row.get("mae_ci")
                ci_txt = f" [{ci[0]:.2f}, {ci[1]:.2f}]" if ci else ""
                lines.append(
                    f"  {row['group']:<16} MAE {row['mae']:.3f}{ci_txt}  "
                    f"n={row['n']} ({100 * row['share']:.1f}%)")
        return lines


def build_report(pred, truth, tags: list[dict] | None = None, recall: float = 1.0,
                 subgroup_keys: list[str] | None = None, replicates: int = 1000,
                 seed: int = 0, groups=None) -> EvalReport:
    """Assemble the full report from per-segment predictions."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    mae, mape = mae_mape(pred, truth)
    errors = np.abs(pred - truth)
    ci = bootstrap_ci(errors, replicates=replicates, seed=seed, groups=groups) \
        if errors.size >= 2 else (mae, mae)
    ba = bland_altman(pred, truth) if pred.size >= 2 else BlandAltman(0.0, 0.0, 0.0)
    records = [
        {"pred": float(p), "truth": float(t), "tags": tags[i] if tags else {}}
        for i, (p, t) in enumerate(zip(pred, truth))
    ]
    subgroups = subgroup_report(records, subgroup_keys or [], replicates=replicates,
                                seed=seed) if subgroup_keys else {}
    return EvalReport(
        mae=mae, mape=mape, mae_ci=tuple(ci), recall=recall,
        bland_altman={"bias": ba.bias, "loa_low": ba.loa_low, "loa_high": ba.loa_high},
        n_segments=int(pred.size), subgroups=subgroups)
