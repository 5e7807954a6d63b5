"""Aligned multi-channel time series on a uniform grid.

Channels are float arrays with NaN marking masked (missing) samples. The
standard channel set mirrors the logger schema: room temperature T_in,
ambient temperature T_out, electrical power D, sensible capacity Q and
occupancy occ; extra channels are carried through untouched.
"""

from __future__ import annotations

import warnings
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError
from .grids import TimeGrid

CHANNEL_UNITS = {
    "T_in": "degC",
    "T_out": "degC",
    "D": "kW",
    "Q": "kW",
    "occ": "binary",
    "setpoint": "degC",
}

#: channels resampled with max() instead of mean()
_MAX_CHANNELS = {"occ"}


class SeriesFrame:
    """Immutable bundle of equally long channel series on one TimeGrid."""

    def __init__(self, grid: TimeGrid, channels: Mapping[str, Iterable[float]]):
        self.grid = grid
        data: dict[str, np.ndarray] = {}
        for name, values in channels.items():
            arr = np.asarray(values, dtype=float).copy()
            if arr.ndim != 1 or arr.shape[0] != grid.length:
                raise DataError(
                    f"channel {name!r} has {arr.shape} entries, grid expects ({grid.length},)"
                )
            arr.setflags(write=False)
            data[name] = arr
        self._channels = data
        occ = data.get("occ")
        if occ is not None:
            finite = occ[np.isfinite(occ)]
            if not np.all(np.isin(finite, (0.0, 1.0))):
                raise DataError("occupancy channel must contain only 0 and 1")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._channels)

    @property
    def length(self) -> int:
        return self.grid.length

    def channel(self, name: str) -> np.ndarray:
        try:
            return self._channels[name]
        except KeyError:
            raise DataError(f"channel {name!r} not present; have {list(self._channels)}") from None

    def has_channel(self, name: str) -> bool:
        return name in self._channels

    def mask(self, name: str) -> np.ndarray:
        """Boolean mask, True where the sample is missing."""
        return np.isnan(self.channel(name))

    def as_dict(self) -> dict[str, np.ndarray]:
        return dict(self._channels)

    def with_channel(self, name: str, values: Iterable[float]) -> "SeriesFrame":
        data = self.as_dict()
        data[name] = np.asarray(values, dtype=float)
        return SeriesFrame(self.grid, data)

    def window(self, start_index: int, length: int) -> "SeriesFrame":
        sub = self.grid.subgrid(start_index, length)
        return SeriesFrame(sub, {n: v[start_index:start_index + length] for n, v in self._channels.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesFrame):
            return NotImplemented
        if self.grid != other.grid or self.names != other.names:
            return False
        return all(
            np.array_equal(self._channels[n], other._channels[n], equal_nan=True)
            for n in self.names
        )


def resample(frame: SeriesFrame, new_step_s: int) -> SeriesFrame:
    """Aggregate ``frame`` onto a coarser grid with the same start.

    Continuous channels average over each window (masked samples excluded,
    fully-masked windows stay masked); occupancy takes the window max so a
    window counts as occupied if any sample in it is. A trailing window with
    fewer than ``new_step_s / step_s`` samples is dropped.
    """
    factor, rem = divmod(int(new_step_s), frame.grid.step_s)
    if rem != 0 or factor < 1:
        raise DataError(
            f"new step {new_step_s}s is not a positive integer multiple of {frame.grid.step_s}s"
        )
    out_len = frame.length // factor
    if out_len < 1:
        raise DataError(f"frame too short to resample: {frame.length} samples into windows of {factor}")

    out: dict[str, np.ndarray] = {}
    with warnings.catch_warnings():
        # all-NaN windows legitimately produce NaN output samples
        warnings.simplefilter("ignore", RuntimeWarning)
        for name in frame.names:
            blocks = frame.channel(name)[: out_len * factor].reshape(out_len, factor)
            if name in _MAX_CHANNELS:
                out[name] = np.nanmax(blocks, axis=1)
            else:
                out[name] = np.nanmean(blocks, axis=1)
    grid = TimeGrid(frame.grid.start, frame.grid.step_s * factor, out_len)
    return SeriesFrame(grid, out)
