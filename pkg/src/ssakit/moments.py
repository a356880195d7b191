"""Interval means, interval autocovariances and whitening.

All second moments use the number-of-terms divisor: an interval of n samples
contributes n - lag lagged products and the sum is divided by n - lag (so the
lag-0 statistic divides by n, not n - 1).
"""

from dataclasses import dataclass

import numpy as np

from .series import MultivariateSeries, as_series

__all__ = [
    "WhiteningResult",
    "SingularCovarianceError",
    "interval_mean",
    "interval_autocov",
    "symmetric_inverse_sqrt",
    "whiten",
    "interval_diagnostics",
]

# covariance eigenvalues below this fraction of the largest one make the
# whitener numerically meaningless
DEGENERATE_EIG_RATIO = 1e-12

SYMMETRY_TOL = 1e-10


class SingularCovarianceError(ValueError):
    """Raised when a covariance matrix cannot be inverted to whiten."""


@dataclass(frozen=True)
class WhiteningResult:
    """Centered and decorrelated view of a series.

    Attributes
    ----------
    whitened : MultivariateSeries or None
        y_t = whitener @ (x_t - center).  None when the result was rebuilt
        from a serialized file that stores only the transform.
    center : ndarray, shape (p,)
        Sample mean of the input.
    whitener : ndarray, shape (p, p)
        Symmetric inverse square root of the input's sample covariance.
    covariance_eigs : ndarray, shape (p,)
        Eigenvalues of the sample covariance, descending.
    """

    whitened: MultivariateSeries
    center: np.ndarray
    whitener: np.ndarray
    covariance_eigs: np.ndarray


def _check_interval(series, interval):
    a, b = int(interval[0]), int(interval[1])
    T = series.n_samples
    if not (1 <= a < b <= T + 1):
        raise ValueError(f"interval [{a}, {b}) out of range for a series of length {T}")
    return a, b


def interval_mean(series, interval):
    """Average of the samples with t in [a, b).

    Parameters
    ----------
    series : MultivariateSeries or array_like
    interval : (int, int)
        1-based half-open time range.

    Returns
    -------
    ndarray, shape (p,)
    """
    series = as_series(series)
    a, b = _check_interval(series, interval)
    return series.values[a - 1 : b - 1].mean(axis=0)


def interval_autocov(series, interval, lag=0, center="interval"):
    """Lagged autocovariance matrix of one interval.

    Sums (x_t - m)(x_{t+lag} - m)' over the t with both t and t+lag inside
    [a, b) and divides by the number of terms, n - lag.  With
    ``center="interval"`` m is the interval mean; with ``center="global"`` it
    is the mean of the whole series, so level differences between intervals
    stay visible in the second moments.

    Returns
    -------
    ndarray, shape (p, p)
        Symmetric positive semidefinite for lag 0, general square otherwise.
    """
    series = as_series(series)
    a, b = _check_interval(series, interval)
    lag = int(lag)
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    n = b - a
    if n - lag < 2:
        raise ValueError(f"interval [{a}, {b}) is too short for lag {lag}")
    if center == "interval":
        m = series.values[a - 1 : b - 1].mean(axis=0)
    elif center == "global":
        m = series.values.mean(axis=0)
    else:
        raise ValueError(f"center must be 'interval' or 'global', got {center!r}")
    X = series.values[a - 1 : b - 1] - m
    head = X if lag == 0 else X[:-lag]
    return head.T @ X[lag:] / (n - lag)


def symmetric_inverse_sqrt(M):
    """Inverse square root of a symmetric positive definite matrix.

    Computed through the eigendecomposition U diag(1/sqrt(l)) U', never a
    Cholesky factor, so the result is itself symmetric.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"need a square matrix, got shape {M.shape}")
    asym = np.abs(M - M.T).max()
    if asym > SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric: max |M - M'| = {asym:.3e}")
    evals, evecs = np.linalg.eigh((M + M.T) / 2.0)
    if evals[0] <= 0.0:
        raise SingularCovarianceError(
            f"matrix is not positive definite: smallest eigenvalue {evals[0]:.3e}"
        )
    return (evecs / np.sqrt(evals)) @ evecs.T


def whiten(series):
    """Center a series and rotate/scale it to unit sample covariance.

    y_t = S^{-1/2} (x_t - m) with m the sample mean over the full span and S
    the sample covariance (divisor T).  S^{-1/2} is the symmetric inverse
    square root; the whitened series has exactly zero sample mean and sample
    covariance I_p up to roundoff.

    Raises
    ------
    SingularCovarianceError
        If the smallest covariance eigenvalue does not exceed 1e-12 times the
        largest one.
    """
    series = as_series(series)
    X = series.values
    center = X.mean(axis=0)
    Xc = X - center
    C = Xc.T @ Xc / series.n_samples
    C = (C + C.T) / 2.0
    evals, evecs = np.linalg.eigh(C)
    if evals[0] <= DEGENERATE_EIG_RATIO * evals[-1] or evals[-1] <= 0.0:
        raise SingularCovarianceError(
            "sample covariance is numerically singular: eigenvalue range "
            f"[{evals[0]:.3e}, {evals[-1]:.3e}]"
        )
    whitener = (evecs / np.sqrt(evals)) @ evecs.T
    whitened = MultivariateSeries(Xc @ whitener, series.channel_names)
    return WhiteningResult(
        whitened=whitened,
        center=center,
        whitener=whitener,
        covariance_eigs=evals[::-1].copy(),
    )


def interval_diagnostics(series, segmentation, lag=1):
    """Per-channel, per-interval means, variances and lagged autocovariances.

    Returns
    -------
    list of dict
        One record per (channel, interval) pair, channel-major, with keys
        channel, interval_index, start, end, mean, variance, autocov.
    """
    series = as_series(series)
    if segmentation.n_samples != series.n_samples:
        raise ValueError(
            f"segmentation covers {segmentation.n_samples} samples, "
            f"series has {series.n_samples}"
        )
    segmentation.check_lag(lag)
    stats = []
    for index, (a, b) in enumerate(segmentation.intervals, start=1):
        m = interval_mean(series, (a, b))
        v = np.diag(interval_autocov(series, (a, b), 0))
        g = np.diag(interval_autocov(series, (a, b), lag))
        stats.append((index, a, b, m, v, g))
    records = []
    for c, name in enumerate(series.channel_names):
        for index, a, b, m, v, g in stats:
            records.append(
                {
                    "channel": name,
                    "interval_index": index,
                    "start": a,
                    "end": b,
                    "mean": m[c],
                    "variance": v[c],
                    "autocov": g[c],
                }
            )
    return records
