"""Containers for multivariate time series and interval segmentations.

Time indices are 1-based throughout: a series of length T covers t = 1..T and
an interval [a, b) contains the samples a, a+1, ..., b-1.  This matches the
usual time-series convention and makes segmentation boundaries read naturally.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MultivariateSeries",
    "Segmentation",
    "CsvFormatError",
    "as_series",
    "equal_segmentation",
    "custom_segmentation",
    "read_csv",
    "write_csv",
    "format_float",
]


class CsvFormatError(ValueError):
    """Raised when a CSV file cannot be parsed into a numeric series."""


@dataclass(frozen=True)
class MultivariateSeries:
    """An immutable T x p block of jointly observed time series.

    Parameters
    ----------
    values : array_like, shape (T, p)
        Sample values, one row per time point.  A 1-D array is treated as a
        single channel.  Copied to float64 and frozen.
    channel_names : sequence of str, optional
        One name per channel.  Defaults to ``X1, ..., Xp``.

    Attributes
    ----------
    values : ndarray, shape (T, p)
        Read-only float64, C-contiguous.
    channel_names : tuple of str
    """

    values: np.ndarray
    channel_names: tuple = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ValueError(f"series values must be 2-dimensional, got shape {values.shape}")
        T, p = values.shape
        if T < 2:
            raise ValueError(f"a series needs at least 2 time points, got {T}")
        if p < 1:
            raise ValueError("a series needs at least 1 channel")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(
                f"series contains a non-finite value at row {bad[0] + 1}, channel {bad[1] + 1}"
            )
        if self.channel_names is None:
            names = tuple(f"X{i + 1}" for i in range(p))
        else:
            names = tuple(str(n) for n in self.channel_names)
            if len(names) != p:
                raise ValueError(f"got {len(names)} channel names for {p} channels")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channel_names", names)

    @property
    def n_samples(self):
        return self.values.shape[0]

    @property
    def n_channels(self):
        return self.values.shape[1]


def as_series(data, channel_names=None):
    """Coerce an array or :class:`MultivariateSeries` to a series."""
    if isinstance(data, MultivariateSeries):
        return data
    return MultivariateSeries(data, channel_names)


@dataclass(frozen=True)
class Segmentation:
    """A partition of 1..T into contiguous half-open intervals.

    Intervals are stored as (start, end) pairs with 1-based starts and
    exclusive ends; interval i holds the end - start samples start..end-1.
    The intervals must tile 1..T in ascending order, there must be at least
    two of them, and every interval must hold at least two samples.
    """

    n_samples: int
    intervals: tuple = field(default=())

    def __post_init__(self):
        if self.n_samples < 4:
            raise ValueError("a segmentation needs at least 4 samples")
        intervals = tuple((int(a), int(b)) for a, b in self.intervals)
        if len(intervals) < 2:
            raise ValueError("a segmentation needs at least 2 intervals")
        cursor = 1
        for i, (a, b) in enumerate(intervals):
            if a != cursor:
                raise ValueError(
                    f"interval {i + 1} starts at {a}, expected {cursor}: intervals must tile 1..T"
                )
            if b - a < 2:
                raise ValueError(
                    f"interval {i + 1} = [{a}, {b}) holds {b - a} samples, need at least 2"
                )
            cursor = b
        if cursor != self.n_samples + 1:
            raise ValueError(
                f"intervals end at {cursor - 1} but the series has {self.n_samples} samples"
            )
        object.__setattr__(self, "intervals", intervals)

    @property
    def n_intervals(self):
        return len(self.intervals)

    @property
    def lengths(self):
        return np.array([b - a for a, b in self.intervals])

    @property
    def weights(self):
        """Interval length shares |T_i| / T."""
        return self.lengths / self.n_samples

    @property
    def breakpoints(self):
        """Start indices of intervals 2..K (the custom_segmentation argument)."""
        return tuple(a for a, _ in self.intervals[1:])

    def slices(self):
        """0-based Python slices, one per interval."""
        return [slice(a - 1, b - 1) for a, b in self.intervals]

    def check_lag(self, lag):
        """Raise if some interval is too short for lag-``lag`` autocovariances."""
        shortest = int(self.lengths.min())
        if shortest < lag + 2:
            raise ValueError(
                f"lag {lag} needs intervals of at least {lag + 2} samples, "
                f"shortest interval has {shortest}"
            )


def equal_segmentation(n_samples, n_intervals):
    """Split 1..T into K equal intervals, the last absorbing the remainder.

    Each of the first K-1 intervals has floor(T/K) samples.

    Examples
    --------
    >>> equal_segmentation(12, 3).intervals
    ((1, 5), (5, 9), (9, 13))
    >>> equal_segmentation(13, 3).intervals
    ((1, 5), (5, 9), (9, 14))
    """
    T, K = int(n_samples), int(n_intervals)
    if K < 2:
        raise ValueError(f"need at least 2 intervals, got {K}")
    base = T // K
    if base < 2:
        raise ValueError(f"cannot split {T} samples into {K} intervals of at least 2 samples")
    starts = [1 + i * base for i in range(K)]
    ends = starts[1:] + [T + 1]
    return Segmentation(T, tuple(zip(starts, ends)))


def custom_segmentation(n_samples, breakpoints):
    """Build a segmentation from explicit interval starts.

    ``breakpoints`` are the 1-based start indices of intervals 2..K; the
    first interval always starts at 1 and the last ends at T.
    """
    T = int(n_samples)
    bps = [int(b) for b in breakpoints]
    if not bps:
        raise ValueError("need at least one breakpoint")
    if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
        raise ValueError(f"breakpoints must be strictly increasing, got {bps}")
    starts = [1] + bps
    ends = bps + [T + 1]
    return Segmentation(T, tuple(zip(starts, ends)))


def format_float(value):
    # 17 significant digits round-trip any finite double exactly
    return format(value, ".17g")


def write_csv(series, path):
    """Write a series as UTF-8 CSV: one header row of channel names, then one
    row per time point with 17-significant-digit values."""
    lines = [",".join(series.channel_names)]
    for row in series.values:
        lines.append(",".join(format_float(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Read a numeric CSV into a :class:`MultivariateSeries`.

    Comma separated, ``.`` decimal mark, optional single header row of channel
    names.  Ragged rows, non-numeric cells and empty files are rejected with
    the offending location.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [line for line in text.split("\n") if line.strip() != ""]
    if not lines:
        raise CsvFormatError(f"{path}: file is empty")

    def parse_row(line, row_number):
        cells = line.split(",")
        out = []
        for j, cell in enumerate(cells):
            try:
                out.append(float(cell))
            except ValueError:
                raise CsvFormatError(
                    f"{path}: row {row_number}, column {j + 1}: not a number: {cell.strip()!r}"
                ) from None
        return out

    names = None
    first = lines[0].split(",")
    try:
        rows = [[float(c) for c in first]]
    except ValueError:
        names = [c.strip() for c in first]
        rows = []
    n_columns = len(first)
    for offset, line in enumerate(lines[1:]):
        row_number = offset + 2
        row = parse_row(line, row_number)
        if len(row) != n_columns:
            raise CsvFormatError(
                f"{path}: row {row_number} has {len(row)} cells, expected {n_columns}"
            )
        rows.append(row)
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return MultivariateSeries(np.array(rows), names)
