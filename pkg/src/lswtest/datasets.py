"""Grouped time-series datasets: CSV ingestion, truncation and centring.

Two layouts are read. *Wide*: the first column is time and every other
column is one series, with the header cell naming the series' group.
*Long*: columns ``series_id,group,time,value``, one observation per row.
Exactly two groups are required because every test is two-sample.
"""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError

LONG_COLUMNS = ("series_id", "group", "time", "value")
TRUNCATION_MODES = ("truncate_head", "truncate_tail", "segment")
MIN_LENGTH = 8


@dataclass(frozen=True)
class Series:
    id: str
    group: str
    values: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, Series)
            and (self.id, self.group) == (other.id, other.group)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class Dataset:
    """Equal-length series in two groups.

    ``truncation`` is ``None`` for raw input, else ``(mode, first_row, stop_row)``
    with rows counted from 0 in the original time order.
    """

    series: tuple
    time: np.ndarray
    groups: tuple
    sample_interval: float | None = None
    truncation: tuple | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.series == other.series
            and np.array_equal(self.time, other.time)
            and self.groups == other.groups
            and self.sample_interval == other.sample_interval
            and self.truncation == other.truncation
        )

    @property
    def length(self):
        return self.time.size

    def group_arrays(self):
        """``(X1, X2)`` stacks of shape ``(N_i, T)`` in group order."""
        return tuple(np.array([s.values for s in self.series if s.group == g]) for g in self.groups)

    def group_sizes(self):
        return tuple(sum(s.group == g for s in self.series) for g in self.groups)


def _number(text, row, col):
    cell = text.strip()
    if cell == "":
        raise InputError(f"row {row}, column {col}: missing value")
    try:
        value = float(cell)
    except ValueError:
        raise InputError(f"row {row}, column {col}: non-numeric value {cell!r}") from None
    if not np.isfinite(value):
        raise InputError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def _check_groups(labels, allowed):
    groups = tuple(dict.fromkeys(labels))
    if allowed is not None:
        unknown = [g for g in groups if g not in allowed]
        if unknown:
            raise InputError(f"unknown group label(s) {unknown}; expected {list(allowed)}")
        groups = tuple(g for g in allowed if g in groups)
    if len(groups) != 2:
        raise InputError(f"exactly two groups are required, found {len(groups)}: {list(groups)}")
    return groups


def _check_time(time):
    if time.size > 1 and np.any(np.diff(time) <= 0):
        raise InputError("time values must be strictly increasing")


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh)]
    while rows and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data row")
    return rows


def _read_wide(rows, allowed):
    header = [c.strip() for c in rows[0]]
    if len(header) < 3:
        raise InputError("wide format needs a time column and at least two series columns")
    labels = header[1:]
    if any(lab == "" for lab in labels):
        raise InputError("row 1: empty group label in header")
    groups = _check_groups(labels, allowed)
    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"row {i}: expected {len(header)} cells, found {len(row)}")
        data[i - 2] = [_number(c, i, j + 1) for j, c in enumerate(row)]
    time = data[:, 0].copy()
    _check_time(time)
    series = tuple(Series(str(k + 1), lab, data[:, k + 1].copy()) for k, lab in enumerate(labels))
    return Dataset(series, time, groups)


def _read_long(rows, allowed):
    header = tuple(c.strip() for c in rows[0])
    if header != LONG_COLUMNS:
        raise InputError(f"row 1: long format header must be {','.join(LONG_COLUMNS)}, got {','.join(header)}")
    obs, group_of, order = {}, {}, []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise InputError(f"row {i}: expected 4 cells, found {len(row)}")
        sid, grp = row[0].strip(), row[1].strip()
        if not sid or not grp:
            raise InputError(f"row {i}: missing series_id or group")
        t, v = _number(row[2], i, 3), _number(row[3], i, 4)
        if sid not in obs:
            obs[sid], group_of[sid] = {}, grp
            order.append(sid)
        elif group_of[sid] != grp:
            raise InputError(f"row {i}: series {sid!r} changes group from {group_of[sid]!r} to {grp!r}")
        if t in obs[sid]:
            raise InputError(f"row {i}: duplicate time {t} for series {sid!r}")
        obs[sid][t] = v
    groups = _check_groups([group_of[s] for s in order], allowed)
    time = np.array(sorted(obs[order[0]]))
    for sid in order:
        if sorted(obs[sid]) != time.tolist():
            raise InputError(f"series {sid!r} is ragged: its time points differ from series {order[0]!r}")
    series = tuple(Series(sid, group_of[sid], np.array([obs[sid][t] for t in time])) for sid in order)
    return Dataset(series, time, groups)


def ingest_csv(path, fmt="wide", groups=None, sample_interval=None):
    """Read a grouped dataset; ``groups`` optionally fixes the allowed labels and their order."""
    if fmt not in ("wide", "long"):
        raise InputError(f"format must be 'wide' or 'long', got {fmt!r}")
    rows = _read_rows(path)
    allowed = None if groups is None else tuple(groups)
    d = _read_wide(rows, allowed) if fmt == "wide" else _read_long(rows, allowed)
    return replace(d, sample_interval=sample_interval)


def write_csv(d, path, fmt="wide"):
    """Write a dataset losslessly (floats use ``repr``)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if fmt == "wide":
            w.writerow(["time"] + [s.group for s in d.series])
            for k, t in enumerate(d.time):
                w.writerow([repr(float(t))] + [repr(float(s.values[k])) for s in d.series])
        elif fmt == "long":
            w.writerow(LONG_COLUMNS)
            for s in d.series:
                for t, v in zip(d.time, s.values):
                    w.writerow([s.id, s.group, repr(float(t)), repr(float(v))])
        else:
            raise InputError(f"format must be 'wide' or 'long', got {fmt!r}")


def from_arrays(X1, X2, labels=("1", "2"), time=None):
    """Build a dataset from two ``(N_i, T)`` stacks."""
    X1, X2 = np.atleast_2d(X1), np.atleast_2d(X2)
    T = X1.shape[-1]
    if X2.shape[-1] != T:
        raise InputError("both groups need the same series length")
    series = [Series(str(i + 1), labels[0], np.array(x, dtype=float)) for i, x in enumerate(X1)]
    series += [Series(str(len(X1) + i + 1), labels[1], np.array(x, dtype=float)) for i, x in enumerate(X2)]
    time = np.arange(T, dtype=float) if time is None else np.asarray(time, dtype=float)
    return Dataset(tuple(series), time, tuple(labels))


def dyadic_floor(n):
    return 1 << (int(n).bit_length() - 1)


def preprocess(d, mode="truncate_head", start=0):
    """Cut every series to the largest power of two that fits, then centre it.

    ``truncate_head`` drops the earliest samples, ``truncate_tail`` the latest,
    and ``segment`` keeps the window beginning at row ``start``.
    """
    if mode not in TRUNCATION_MODES:
        raise InputError(f"mode must be one of {TRUNCATION_MODES}, got {mode!r}")
    T = d.length
    if mode == "segment":
        if not 0 <= start < T:
            raise InputError(f"segment start {start} outside 0..{T - 1}")
        n = dyadic_floor(T - start)
        lo = start
    else:
        n = dyadic_floor(T) if T >= 1 else 0
        lo = T - n if mode == "truncate_head" else 0
    if n < MIN_LENGTH:
        raise InputError(f"usable length {n} is below the minimum of {MIN_LENGTH}")
    hi = lo + n
    series = []
    for s in d.series:
        v = s.values[lo:hi].astype(float)
        v = v - v.mean()
        series.append(Series(s.id, s.group, v))
    return replace(d, series=tuple(series), time=d.time[lo:hi].copy(), truncation=(mode, lo, hi))
