"""Two-sample tests for wavelet spectra of replicated nonstationary time series.

The package estimates locally stationary wavelet (LSW) spectra with the
periodic non-decimated Haar transform and compares two groups of series
with four cellwise tests: a t-test on corrected spectra (WST), an F-test on
raw periodograms (FT), a t-test on Haar-Fisz transformed periodograms (HFT)
and a t-test on Haar coefficients of the periodogram (HT).
"""

__version__ = "0.1.0"

from .errors import InputError, LSWTestError, NumericError
from .hypothesis_tests import TestConfig, TestResult, bh_fdr, bonferroni, ft, hft, ht, wst
from .pipeline import run_test_on_periodograms, run_test_on_series
from .spectral import group_summary, raw_periodogram
from .wavelet import correct_periodogram, expected_beta, inner_product_matrix, ndwt

__all__ = [
    "InputError",
    "LSWTestError",
    "NumericError",
    "TestConfig",
    "TestResult",
    "bh_fdr",
    "bonferroni",
    "correct_periodogram",
    "expected_beta",
    "ft",
    "group_summary",
    "hft",
    "ht",
    "inner_product_matrix",
    "ndwt",
    "raw_periodogram",
    "run_test_on_periodograms",
    "run_test_on_series",
    "wst",
]
