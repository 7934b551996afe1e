"""Raw wavelet periodograms and replicate-level group summaries."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientReplicatesError, ShapeMismatchError
from .wavelet import dyadic_levels, ndwt

GRID_KINDS = ("ndwt_detail", "raw_periodogram", "corrected_spectrum", "haar_fisz", "spectrum_model")


def raw_periodogram(series):
    """Squared NDWT coefficients, ``I[j, k] = d[j, k]**2``."""
    x = np.asarray(series, dtype=float)
    dyadic_levels(x.shape[-1])
    return ndwt(x) ** 2


@dataclass(frozen=True)
class GroupSpectralSummary:
    """Cellwise mean and unbiased variance of one group's replicate grids."""

    group_id: int
    n_replicates: int
    mean_grid: np.ndarray
    var_grid: np.ndarray
    kind: str

    @property
    def shape(self):
        return self.mean_grid.shape


def _stack(grids):
    if isinstance(grids, np.ndarray):
        if grids.ndim == 2:
            return grids[None].astype(float)
        if grids.ndim == 3:
            return grids.astype(float)
        raise ShapeMismatchError(f"expected (N, J, T) replicates, got shape {grids.shape}")
    grids = [np.asarray(g, dtype=float) for g in grids]
    if not grids:
        raise InsufficientReplicatesError("at least one replicate grid is required")
    shape = grids[0].shape
    for i, g in enumerate(grids):
        if g.shape != shape or g.ndim != 2:
            raise ShapeMismatchError(f"replicate {i} has shape {g.shape}, expected {shape}")
    return np.stack(grids)


def replicate_variance(stack):
    """Unbiased variance over axis 0, shifted by the first replicate so equal replicates give exactly 0."""
    stack = np.asarray(stack, dtype=float)
    n = stack.shape[0]
    dev = stack - stack[0]
    return np.maximum((dev**2).sum(axis=0) - dev.sum(axis=0) ** 2 / n, 0.0) / (n - 1)


def group_summary(grids, group_id, kind="corrected_spectrum"):
    """Average replicate grids and estimate their cellwise variance.

    ``grids`` is a list of ``(J, T)`` arrays or a stacked ``(N, J, T)`` array.
    The variance uses the ``N - 1`` denominator and is zero when ``N == 1``.
    """
    if kind not in GRID_KINDS:
        raise InputError(f"unknown grid kind {kind!r}")
    stack = _stack(grids)
    n = stack.shape[0]
    if n < 1:
        raise InsufficientReplicatesError("at least one replicate grid is required")
    mean = stack.mean(axis=0)
    var = replicate_variance(stack) if n > 1 else np.zeros_like(mean)
    return GroupSpectralSummary(group_id=int(group_id), n_replicates=n, mean_grid=mean, var_grid=var, kind=kind)


def pooled_variance(s1, s2):
    n1, n2 = s1.n_replicates, s2.n_replicates
    if n1 + n2 <= 2:
        raise InsufficientReplicatesError(f"pooled variance needs N1 + N2 > 2, got {n1} + {n2}")
    if s1.shape != s2.shape:
        raise ShapeMismatchError(f"summary shapes differ: {s1.shape} vs {s2.shape}")
    return ((n1 - 1) * s1.var_grid + (n2 - 1) * s2.var_grid) / (n1 + n2 - 2)


def smooth_time(grid, window):
    """Circular running mean of odd width ``window`` along the time axis."""
    if int(window) != window or window < 1 or window % 2 == 0:
        raise InputError(f"smoothing window must be a positive odd integer, got {window!r}")
    g = np.asarray(grid, dtype=float)
    window = int(window)
    if window == 1:
        return g.copy()
    half = window // 2
    T = g.shape[-1]
    idx = np.arange(-half - 1, T + half) % T
    c = np.cumsum(g[..., idx], axis=-1)
    return (c[..., window:] - c[..., :-window]) / window
