"""Piecewise-linear HVAC capacity/power model with a turn-off threshold.

A unit is described by one capacity-to-power curve per ambient temperature
level; queries between levels interpolate the two bracketing curves
linearly in ambient temperature. Capacities strictly between zero and the
minimum-load threshold have no operating point: the unit is either off
(0 kW, 0 kW) or running at or above the threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, InfeasibleCapacityError, InfeasiblePowerError


@dataclass(frozen=True)
class PWLCurve:
    """Continuous piecewise-linear capacity -> power map."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 2:
            raise DataError("a curve needs at least two knots")
        knots = tuple((float(q), float(d)) for q, d in self.knots)
        object.__setattr__(self, "knots", knots)
        qs = [q for q, _ in knots]
        ds = [d for _, d in knots]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise DataError("knot capacities must be strictly increasing")
        if any(b < a for a, b in zip(ds, ds[1:])):
            raise DataError("knot powers must be non-decreasing in capacity")

    @property
    def capacities(self) -> np.ndarray:
        return np.array([q for q, _ in self.knots])

    def power_at(self, q) -> np.ndarray | float:
        qs = [k[0] for k in self.knots]
        ds = [k[1] for k in self.knots]
        return np.interp(q, qs, ds)

    def residual(self, points) -> float:
        pts = np.asarray(points, dtype=float)
        return float(np.sum((self.power_at(pts[:, 0]) - pts[:, 1]) ** 2))


def fit_pwl(points, n_segments: int) -> PWLCurve:
    """Least-squares continuous PWL fit with breakpoints at capacity quantiles.

    Candidate fits with 1..n_segments segments are evaluated and the best
    post-repair residual wins (ties to the larger count), which makes the
    residual non-increasing in ``n_segments`` by construction. Monotonicity
    is repaired by clamping knot powers to a running maximum, i.e. negative
    segment slopes flatten to zero.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DataError("points must be (capacity, power) pairs")
    if n_segments < 1:
        raise DataError(f"n_segments must be >= 1, got {n_segments}")
    if pts.shape[0] < n_segments + 1:
        raise DataError(
            f"{pts.shape[0]} points cannot determine {n_segments + 1} knot values")
    q = pts[:, 0]
    d = pts[:, 1]
    if len(np.unique(q)) != len(q):
        raise DataError("point capacities must be distinct")

    best: tuple[float, int, PWLCurve] | None = None
    for k in range(1, n_segments + 1):
        knots_q = np.unique(np.quantile(q, np.linspace(0.0, 1.0, k + 1)))
        if len(knots_q) < 2:
            continue
        basis = np.column_stack([
            np.interp(q, knots_q, np.eye(len(knots_q))[j]) for j in range(len(knots_q))
        ])
        values, *_ = np.linalg.lstsq(basis, d, rcond=None)
        values = np.maximum.accumulate(values)
        curve = PWLCurve(tuple(zip(knots_q.tolist(), values.tolist())))
        res = curve.residual(pts)
        if best is None or res < best[0] - 1e-12 * (1.0 + best[0]) or (
                abs(res - best[0]) <= 1e-12 * (1.0 + best[0]) and k > best[1]):
            best = (res, k, curve)
    if best is None:
        raise DataError("degenerate capacities: no fit possible")
    return best[2]


@dataclass(frozen=True)
class StepLinearization:
    """Affine segments ``q = alpha*d + beta`` for one scheduling step."""

    d_min: float
    d_max: float
    segments: tuple[tuple[float, float, float, float], ...]  # (alpha, beta, d_lo, d_hi)


@dataclass(frozen=True)
class HVACModel:
    """Curve family indexed by ambient level plus threshold constants."""

    levels: tuple[tuple[float, PWLCurve], ...]
    q_min: float = 4.125
    load_min: float = 0.11
    q_max: float = 37.5
    d_max: float | None = None
    mode: str = "heating"

    def __post_init__(self):
        if self.mode not in ("heating", "cooling"):
            raise DataError(f"mode must be heating or cooling, got {self.mode!r}")
        if not self.levels:
            raise DataError("at least one ambient level required")
        temps = [t for t, _ in self.levels]
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise DataError("ambient levels must be strictly increasing")
        if abs(self.q_min - self.load_min * self.q_max) > 1e-6:
            raise DataError(
                f"threshold mismatch: q_min {self.q_min} != load_min*q_max "
                f"{self.load_min * self.q_max}")
        for t, curve in self.levels:
            lo = curve.knots[0][0]
            hi = curve.knots[-1][0]
            if lo > self.q_min + 1e-9 or hi < self.q_max - 1e-9:
                raise DataError(
                    f"curve at {t} degC covers [{lo}, {hi}] kW, needs [{self.q_min}, {self.q_max}]")
        if self.d_max is None:
            rated = max(float(curve.power_at(self.q_max)) for _, curve in self.levels)
            object.__setattr__(self, "d_max", rated)

    def _bracket(self, t_out: float) -> tuple[int, int, float]:
        """Indices of the two bracketing levels and the upper-level weight."""
        temps = [t for t, _ in self.levels]
        if t_out <= temps[0]:
            return 0, 0, 0.0
        if t_out >= temps[-1]:
            n = len(temps) - 1
            return n, n, 0.0
        hi = int(np.searchsorted(temps, t_out, side="right"))
        lo = hi - 1
        w = (t_out - temps[lo]) / (temps[hi] - temps[lo])
        return lo, hi, w

    def effective_knots(self, t_out: float) -> tuple[np.ndarray, np.ndarray]:
        """Blended curve at ``t_out`` on the union of knot capacities,
        restricted to the operating range [q_min, q_max]."""
        lo, hi, w = self._bracket(t_out)
        c_lo = self.levels[lo][1]
        c_hi = self.levels[hi][1]
        qs = np.unique(np.concatenate([
            [k[0] for k in c_lo.knots],
            [k[0] for k in c_hi.knots],
            [self.q_min, self.q_max],
        ]))
        qs = qs[(qs >= self.q_min) & (qs <= self.q_max)]
        ds = (1.0 - w) * np.asarray(c_lo.power_at(qs)) + w * np.asarray(c_hi.power_at(qs))
        return qs, ds


def capacity_to_power(model: HVACModel, q: float, t_out: float) -> float:
    """Electrical power drawn at capacity ``q``; 0 means the unit is off."""
    if q == 0.0:
        return 0.0
    if q < 0.0 or q > model.q_max + 1e-9:
        raise DataError(f"capacity {q} kW outside [0, {model.q_max}] kW")
    if q < model.q_min:
        raise InfeasibleCapacityError(
            f"capacity {q} kW lies in the forbidden gap (0, {model.q_min}) kW")
    lo, hi, w = model._bracket(t_out)
    d_lo = float(model.levels[lo][1].power_at(q))
    d_hi = float(model.levels[hi][1].power_at(q))
    return (1.0 - w) * d_lo + w * d_hi


def power_to_capacity(model: HVACModel, d: float, t_out: float) -> float:
    """Inverse map; on flat stretches returns the least capacity."""
    if d == 0.0:
        return 0.0
    qs, ds = model.effective_knots(t_out)
    if d < 0.0 or d > ds[-1] + 1e-6:
        raise DataError(f"power {d} kW outside [0, {ds[-1]}] kW at {t_out} degC")
    if d < ds[0]:
        raise InfeasiblePowerError(
            f"power {d} kW lies in the forbidden gap (0, {ds[0]}) kW at {t_out} degC")
    if d >= ds[-1]:
        # highest power: least capacity achieving it (relevant when the
        # last stretch is flat)
        idx = int(np.searchsorted(ds, ds[-1], side="left"))
        return float(qs[idx])
    idx = int(np.searchsorted(ds, d, side="left"))
    if ds[idx] == d:
        return float(qs[idx])
    q0, q1 = qs[idx - 1], qs[idx]
    d0, d1 = ds[idx - 1], ds[idx]
    return float(q0 + (d - d0) * (q1 - q0) / (d1 - d0))


def linearize_for_mpc(model: HVACModel, t_out_series) -> list[StepLinearization]:
    """Per-step power bounds and affine capacity segments for the scheduler."""
    out = []
    for t_out in np.asarray(t_out_series, dtype=float):
        qs, ds = model.effective_knots(float(t_out))
        segments = []
        for i in range(len(qs) - 1):
            if ds[i + 1] > ds[i]:
                alpha = (qs[i + 1] - qs[i]) / (ds[i + 1] - ds[i])
                beta = float(qs[i] - alpha * ds[i])
                segments.append((float(alpha), beta, float(ds[i]), float(ds[i + 1])))
        out.append(StepLinearization(float(ds[0]), float(ds[-1]), tuple(segments)))
    return out


#: synthetic per-level efficiency for the default heating family; power is
#: exactly proportional to capacity at each level so window-averaged power
#: and capacity stay consistent under sub-step cycling
_SYNTHETIC_COP = ((-10.0, 2.2), (0.0, 2.8), (10.0, 3.4), (20.0, 4.0))


def synthetic_heating_model(q_max: float = 37.5, load_min: float = 0.11) -> HVACModel:
    """Default curve family: four ambient levels, one segment per level."""
    q_min = load_min * q_max
    levels = tuple(
        (t, PWLCurve(((q_min, q_min / cop), (q_max, q_max / cop))))
        for t, cop in _SYNTHETIC_COP
    )
    return HVACModel(levels=levels, q_min=q_min, load_min=load_min, q_max=q_max)


def save_hvac_model(model: HVACModel, path) -> None:
    doc = {
        "mode": model.mode,
        "rated_capacity_kw": model.q_max,
        "rated_power_kw": model.d_max,
        "load_min": model.load_min,
        "levels": [
            {"t_out_c": t, "knots": [[q, d] for q, d in curve.knots]}
            for t, curve in model.levels
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_hvac_model(path) -> HVACModel:
    try:
        doc = json.loads(Path(path).read_text())
        levels = tuple(
            (float(level["t_out_c"]), PWLCurve(tuple((float(q), float(d)) for q, d in level["knots"])))
            for level in doc["levels"]
        )
        q_max = float(doc["rated_capacity_kw"])
        load_min = float(doc["load_min"])
        return HVACModel(
            levels=levels,
            q_min=load_min * q_max,
            load_min=load_min,
            q_max=q_max,
            d_max=float(doc["rated_power_kw"]),
            mode=doc.get("mode", "heating"),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise DataError(f"malformed HVAC curve file {path}: {exc}") from exc
