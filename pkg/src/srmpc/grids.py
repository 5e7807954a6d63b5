"""Uniform time grids and daily time windows.

All timestamps are stored in UTC. Daily windows (occupancy, peak hours,
thermostat schedules) are evaluated on minutes-of-day after applying a
configurable local-time offset, which is the only timezone arithmetic done
anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import DataError


def _as_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid: ``start + i * step`` for ``i in range(length)``."""

    start: datetime
    step_s: int = 900
    length: int = 1

    def __post_init__(self):
        object.__setattr__(self, "start", _as_utc(self.start))
        if int(self.step_s) != self.step_s or self.step_s <= 0:
            raise DataError(f"grid step must be a positive whole number of seconds, got {self.step_s}")
        object.__setattr__(self, "step_s", int(self.step_s))
        if self.length < 1:
            raise DataError(f"grid length must be >= 1, got {self.length}")

    def timestamp(self, index: int) -> datetime:
        return self.start + timedelta(seconds=index * self.step_s)

    def index_of(self, ts: datetime) -> int:
        """Exact grid index of ``ts``; raises DataError for off-grid times."""
        delta = (_as_utc(ts) - self.start).total_seconds()
        idx, rem = divmod(delta, self.step_s)
        if rem != 0.0:
            raise DataError(f"timestamp {ts.isoformat()} is not on the {self.step_s}s grid")
        idx = int(idx)
        if not 0 <= idx < self.length:
            raise DataError(f"timestamp {ts.isoformat()} outside grid range")
        return idx

    def timestamps(self) -> np.ndarray:
        """All grid timestamps as numpy datetime64[s]."""
        t0 = np.datetime64(self.start.replace(tzinfo=None), "s")
        return t0 + np.arange(self.length) * np.timedelta64(self.step_s, "s")

    def minute_of_day(self, index: int, tz_offset_min: int = 0) -> float:
        """Minutes since local midnight for step ``index``."""
        ts = self.timestamp(index)
        minutes = ts.hour * 60 + ts.minute + ts.second / 60.0 + tz_offset_min
        return minutes % 1440

    def steps_per_day(self) -> int:
        return 86400 // self.step_s

    def subgrid(self, start_index: int, length: int) -> "TimeGrid":
        if start_index < 0 or start_index + length > self.length:
            raise DataError("subgrid out of range")
        return TimeGrid(self.timestamp(start_index), self.step_s, length)

    @property
    def step_hours(self) -> float:
        return self.step_s / 3600.0


@dataclass(frozen=True)
class DailyWindow:
    """Half-open daily interval [start_minute, end_minute) in minutes of day."""

    start_minute: int
    end_minute: int

    def __post_init__(self):
        if not (0 <= self.start_minute < self.end_minute <= 1440):
            raise DataError(
                f"daily window must satisfy 0 <= start < end <= 1440, got "
                f"[{self.start_minute}, {self.end_minute})"
            )

    def contains(self, minute_of_day: float) -> bool:
        return self.start_minute <= minute_of_day < self.end_minute

    @classmethod
    def from_hours(cls, start_hour: float, end_hour: float) -> "DailyWindow":
        return cls(round(start_hour * 60), round(end_hour * 60))

    @classmethod
    def parse(cls, text: str) -> "DailyWindow":
        """Parse 'HH:MM-HH:MM'."""
        try:
            lo, hi = text.split("-")
            h0, m0 = (int(p) for p in lo.split(":"))
            h1, m1 = (int(p) for p in hi.split(":"))
        except ValueError as exc:
            raise DataError(f"cannot parse daily window {text!r}, expected 'HH:MM-HH:MM'") from exc
        return cls(h0 * 60 + m0, h1 * 60 + m1)

    def __str__(self) -> str:
        return f"{self.start_minute // 60:02d}:{self.start_minute % 60:02d}-" \
               f"{self.end_minute // 60:02d}:{self.end_minute % 60:02d}"


@dataclass(frozen=True)
class ComfortSpec:
    """Comfort target, tolerance band, and the daily window where both apply."""

    comfort_temp: float = 20.0
    lower: float = 19.0
    upper: float = 21.0
    occupied_window: DailyWindow = field(default_factory=lambda: DailyWindow(7 * 60, 18 * 60))

    def __post_init__(self):
        if not self.lower <= self.comfort_temp <= self.upper:
            raise DataError(
                f"comfort bounds must satisfy lower <= comfort <= upper, got "
                f"{self.lower} <= {self.comfort_temp} <= {self.upper}"
            )
