"""From two stacks of series to a test result."""

import numpy as np

from .errors import InputError, ShapeMismatchError
from .haarfisz import hf_periodogram
from .hypothesis_tests import TestConfig, ft, hft, ht, wst
from .spectral import group_summary, raw_periodogram, smooth_time
from .wavelet import correct_periodogram

TEST_ALIASES = {"wst": "WST", "ft": "FT", "hft": "HFT", "ht": "HT"}


def normalise_test(name):
    key = str(name).lower()
    if key not in TEST_ALIASES:
        raise InputError(f"unknown test {name!r}; choose from {sorted(TEST_ALIASES)}")
    return TEST_ALIASES[key]


def corrected_spectra(I, window=1):
    """Corrected spectra of a periodogram stack, optionally smoothed over time."""
    L = correct_periodogram(I)
    return L if window == 1 else smooth_time(L, window)


def group_summaries(I1, I2, test, cfg=TestConfig()):
    """Group summaries of the grid each test consumes."""
    if test == "WST":
        w = cfg.smoothing_window(np.shape(I1)[-1])
        return (
            group_summary(corrected_spectra(I1, w), 1, "corrected_spectrum"),
            group_summary(corrected_spectra(I2, w), 2, "corrected_spectrum"),
        )
    if test == "FT":
        return group_summary(I1, 1, "raw_periodogram"), group_summary(I2, 2, "raw_periodogram")
    if test == "HFT":
        return group_summary(hf_periodogram(I1), 1, "haar_fisz"), group_summary(hf_periodogram(I2), 2, "haar_fisz")
    raise InputError(f"test {test} has no group-summary form")


def run_test_on_periodograms(I1, I2, test, cfg=TestConfig()):
    test = normalise_test(test)
    if test == "HT":
        return ht(I1, I2, cfg)
    g1, g2 = group_summaries(I1, I2, test, cfg)
    return {"WST": wst, "FT": ft, "HFT": hft}[test](g1, g2, cfg)


def run_test_on_series(X1, X2, test, cfg=TestConfig()):
    """Run one test on ``(N1, T)`` and ``(N2, T)`` stacks of mean-centred series."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    if X1.shape[-1] != X2.shape[-1]:
        raise ShapeMismatchError(f"series lengths differ: {X1.shape[-1]} vs {X2.shape[-1]}")
    return run_test_on_periodograms(raw_periodogram(X1), raw_periodogram(X2), test, cfg)


def test_grids(I, test, cfg=TestConfig()):
    """Per-replicate grids a test works on (corrected, raw or Haar-Fisz)."""
    test = normalise_test(test)
    if test == "WST":
        return corrected_spectra(I, cfg.smoothing_window(np.shape(I)[-1]))
    if test == "HFT":
        return hf_periodogram(I)
    return np.asarray(I, dtype=float)
