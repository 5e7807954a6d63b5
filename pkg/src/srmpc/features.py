"""Lag-feature construction for one-step-ahead temperature prediction.

A LagSpec turns each channel into a family of delayed copies: the current
value, optionally the previous step, and every multiple of the resolution
up to ``resolution * depth`` steps back. Rows containing any masked value
are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .series import CHANNEL_UNITS, SeriesFrame

ColumnKey = tuple[str, int]  # (channel, lag)


def column_name(channel: str, lag: int) -> str:
    return f"{channel}[t]" if lag == 0 else f"{channel}[t-{lag}]"


@dataclass(frozen=True)
class LagSpec:
    """Lag set {0} | {1 if include_minus_one} | {resolution*k, k=1..depth}."""

    resolution: int = 12
    depth: int = 8
    include_minus_one: bool = True

    def __post_init__(self):
        if self.resolution < 1:
            raise DataError(f"lag resolution must be >= 1, got {self.resolution}")
        if self.depth < 1:
            raise DataError(f"lag depth must be >= 1, got {self.depth}")

    def lags(self) -> tuple[int, ...]:
        out = {0}
        if self.include_minus_one:
            out.add(1)
        out.update(self.resolution * k for k in range(1, self.depth + 1))
        return tuple(sorted(out))

    @property
    def max_lag(self) -> int:
        return self.resolution * self.depth


@dataclass(frozen=True)
class FeatureMatrix:
    """Sample matrix over (channel, lag) columns with next-step target."""

    X: np.ndarray
    y: np.ndarray
    columns: tuple[ColumnKey, ...]
    t_index: np.ndarray  # absolute grid index t of each row
    target_channel: str
    units: dict[str, str]

    def __post_init__(self):
        self.X.setflags(write=False)
        self.y.setflags(write=False)
        self.t_index.setflags(write=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(column_name(ch, lag) for ch, lag in self.columns)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_columns(self) -> int:
        return self.X.shape[1]

    def column_index(self, channel: str, lag: int) -> int:
        try:
            return self.columns.index((channel, lag))
        except ValueError:
            raise DataError(f"no feature column {column_name(channel, lag)!r}") from None


def build_lag_features(
    frame: SeriesFrame,
    spec: LagSpec,
    channels: list[str],
    target: str = "T_in",
) -> FeatureMatrix:
    """Build the lagged design matrix and next-step target vector.

    Usable sample times are ``t in [max_lag, length - 2]``: each row holds
    the channel values at every lag of ``spec`` and the target channel at
    ``t + 1``. Column order is channel-major with lags ascending.
    """
    missing = [ch for ch in channels if not frame.has_channel(ch)]
    if missing:
        raise DataError(f"channels not in frame: {missing}; have {list(frame.names)}")
    if not frame.has_channel(target):
        raise DataError(f"target channel {target!r} not in frame")

    lags = spec.lags()
    max_lag = lags[-1]
    min_length = max_lag + 2
    if frame.length < min_length:
        raise DataError(
            f"frame has {frame.length} samples but lag spec needs at least {min_length} "
            f"(max lag {max_lag} plus one target step)"
        )

    usable = frame.length - max_lag - 1
    cols = []
    columns: list[ColumnKey] = []
    for ch in channels:
        values = frame.channel(ch)
        for lag in lags:
            cols.append(values[max_lag - lag : max_lag - lag + usable])
            columns.append((ch, lag))
    X = np.column_stack(cols)
    y = frame.channel(target)[max_lag + 1 : max_lag + 1 + usable].copy()
    t_index = np.arange(max_lag, max_lag + usable)

    keep = ~(np.isnan(X).any(axis=1) | np.isnan(y))
    units = {ch: CHANNEL_UNITS.get(ch, "unknown") for ch in channels}
    return FeatureMatrix(
        X=X[keep].copy(),
        y=y[keep].copy(),
        columns=tuple(columns),
        t_index=t_index[keep].copy(),
        target_channel=target,
        units=units,
    )
