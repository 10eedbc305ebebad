"""Counting-process representations: raw event times and binned counts.

The package-wide convention is that the counting function N(t) is the
number of events with timestamp <= t, so N is a right-continuous step
function and N(horizon) is the total event count.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EventTimes",
    "BinnedSeries",
    "BinnedCounting",
    "count_at",
    "cumulative",
    "from_binned",
    "bin_events",
    "load_event_times",
    "save_event_times",
    "load_binned_csv",
    "save_binned_csv",
]


@dataclass(frozen=True)
class EventTimes:
    """A sorted sequence of event timestamps on [0, horizon].

    ``times`` must be non-decreasing (duplicates are allowed: simultaneous
    events are legal) and contained in ``[0, horizon]``.
    """

    times: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "horizon", float(self.horizon))
        if times.ndim != 1:
            raise ValueError("times must be a one-dimensional array")
        if not np.isfinite(self.horizon) or self.horizon < 0:
            raise ValueError(f"horizon must be finite and non-negative, got {self.horizon}")
        if times.size:
            if not np.all(np.isfinite(times)):
                raise ValueError("event times must all be finite")
            if np.any(np.diff(times) < 0):
                raise ValueError("event times must be sorted in non-decreasing order")
            if times[0] < 0.0 or times[-1] > self.horizon:
                raise ValueError(
                    f"event times must lie in [0, {self.horizon}]; "
                    f"got range [{times[0]}, {times[-1]}]"
                )

    def __len__(self) -> int:
        return int(self.times.size)

    def count_at(self, t):
        """N(t): number of events with time <= t.  Vectorized over t."""
        return np.searchsorted(self.times, t, side="right")


@dataclass(frozen=True)
class BinnedSeries:
    """Non-negative integer event counts in contiguous uniform bins.

    Bin i covers ``[start_time + i*bin_width, start_time + (i+1)*bin_width)``.
    """

    bin_width: float
    counts: np.ndarray
    start_time: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.bin_width) and self.bin_width > 0):
            raise ValueError(f"bin_width must be positive and finite, got {self.bin_width}")
        counts = np.asarray(self.counts)
        if counts.ndim != 1:
            raise ValueError("counts must be a one-dimensional array")
        if counts.size and not np.issubdtype(counts.dtype, np.integer):
            rounded = np.rint(counts)
            if not np.allclose(counts, rounded, rtol=0, atol=1e-9):
                raise ValueError("counts must be integers")
            counts = rounded
        counts = counts.astype(np.int64, copy=False)
        if np.any(counts < 0):
            bad = int(np.argmax(counts < 0))
            raise ValueError(f"counts must be non-negative; counts[{bad}] = {counts[bad]}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "bin_width", float(self.bin_width))
        object.__setattr__(self, "start_time", float(self.start_time))

    def __len__(self) -> int:
        return int(self.counts.size)

    @property
    def horizon(self) -> float:
        return self.start_time + len(self) * self.bin_width

    def right_edges(self) -> np.ndarray:
        """The right edge of each bin, ascending."""
        return self.start_time + np.arange(1, len(self) + 1) * self.bin_width


class BinnedCounting:
    """Counting function backed by binned data.

    Events of bin i are attributed to the bin's right edge, so N(t) is the
    sum of counts over all bins whose right edge is <= t.  At a right edge
    the bin's own count is included; between edges N is constant.
    """

    def __init__(self, series: BinnedSeries):
        self.series = series
        self._edges = series.right_edges()
        csum = np.zeros(len(series) + 1, dtype=np.int64)
        np.cumsum(series.counts, out=csum[1:])
        self._csum = csum
        self.horizon = series.horizon

    def count_at(self, t):
        """N(t) under right-edge attribution.  Vectorized over t."""
        return self._csum[np.searchsorted(self._edges, t, side="right")]

    def __len__(self) -> int:
        return int(self._csum[-1])


def count_at(events, t):
    """N(t) for an event-time or binned counting object.  Vectorized over t."""
    out = events.count_at(t)
    if np.ndim(t) == 0:
        return int(out)
    return out


def cumulative(series: BinnedSeries) -> np.ndarray:
    """Prefix sums of the bin counts: entry i is N at bin i's right edge."""
    return np.cumsum(series.counts, dtype=np.int64)


def from_binned(series: BinnedSeries) -> BinnedCounting:
    """Build the counting function for binned counts (right-edge attribution).

    Raises ValueError with the offending index if any count is negative
    (BinnedSeries enforces this too; re-checked here so loaders can pass
    raw arrays through one validation point).
    """
    return BinnedCounting(series)


def bin_events(
    events: EventTimes,
    bin_width: float,
    start_time: float = 0.0,
    n_bins: "int | None" = None,
) -> BinnedSeries:
    """Bin event times: counts[i] = #events in [start+i*w, start+(i+1)*w).

    With no event exactly on a bin edge, ``from_binned(bin_events(e, w))``
    agrees with ``e.count_at`` at every bin right edge.  (An event exactly
    on an edge belongs to the right-hand bin here but to the left-closed
    count under the N(t) convention; measure-zero for continuous samples.)
    """
    if n_bins is None:
        span = events.horizon - start_time
        n_bins = max(int(np.ceil(span / bin_width - 1e-12)), 0)
    edges = start_time + np.arange(n_bins + 1) * bin_width
    idx = np.searchsorted(events.times, edges, side="left")
    return BinnedSeries(bin_width=bin_width, counts=np.diff(idx), start_time=start_time)


# ---------------------------------------------------------------------------
# file formats


def load_event_times(path, horizon: "float | None" = None) -> EventTimes:
    """Read event times from a text file: one timestamp per line.

    Blank lines and lines starting with ``#`` are ignored.  Timestamps are
    sorted on load.  ``horizon`` defaults to the largest timestamp.
    """
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a timestamp: {line!r}") from None
    times = np.sort(np.asarray(values, dtype=np.float64))
    if horizon is None:
        horizon = float(times[-1]) if times.size else 0.0
    return EventTimes(times=times, horizon=horizon)


def save_event_times(events: EventTimes, path) -> None:
    """Write event times as one timestamp per line with a comment header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# event times, horizon={float(events.horizon)!r}\n")
        for t in events.times.tolist():
            fh.write(f"{t!r}\n")


def load_binned_csv(path) -> BinnedSeries:
    """Read a binned series from CSV with header ``bin_start,count``.

    Bins must be contiguous and uniform; counts must be non-negative
    integers.  Errors name the offending row.
    """
    starts = []
    counts = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["bin_start", "count"]:
            raise ValueError(f"{path}: expected header 'bin_start,count', got {header}")
        for rowno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: row {rowno}: expected 2 fields, got {len(row)}")
            try:
                starts.append(float(row[0]))
            except ValueError:
                raise ValueError(f"{path}: row {rowno}: bad bin_start {row[0]!r}") from None
            try:
                count = int(row[1])
            except ValueError:
                raise ValueError(f"{path}: row {rowno}: bad count {row[1]!r}") from None
            if count < 0:
                raise ValueError(f"{path}: row {rowno}: negative count {count}")
            counts.append(count)
    if not starts:
        raise ValueError(f"{path}: no data rows")
    starts_arr = np.asarray(starts, dtype=np.float64)
    if len(starts_arr) > 1:
        widths = np.diff(starts_arr)
        width = widths[0]
        if width <= 0 or not np.allclose(widths, width, rtol=1e-9, atol=1e-12):
            bad = int(np.argmax(~np.isclose(widths, width, rtol=1e-9, atol=1e-12)))
            raise ValueError(
                f"{path}: bins are not contiguous/uniform near row {bad + 3} "
                f"(gap {widths[bad]!r} vs width {width!r})"
            )
    else:
        width = 1.0
    return BinnedSeries(bin_width=float(width), counts=np.asarray(counts), start_time=float(starts_arr[0]))


def save_binned_csv(series: BinnedSeries, path) -> None:
    """Write a binned series as CSV with header ``bin_start,count``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_start", "count"])
        for i, c in enumerate(series.counts):
            writer.writerow([repr(float(series.start_time + i * series.bin_width)), int(c)])
