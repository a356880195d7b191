"""scikit-learn style estimators for stationary subspace separation.

Each class wraps the functional layer with the usual fit/transform contract:
``fit`` stores the unmixing rows in ``components_`` (nonstationary rows by
default, stationary rows with ``nonstationary=False``) and ``transform``
applies them to centered data.  Estimators compose with sklearn pipelines
and ``get_params``/``set_params``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .series import custom_segmentation, equal_segmentation
from .ssa import ssa_comb, ssa_single

__all__ = ["SSAsir", "SSAsave", "SSAcor", "ASSA", "SSAcomb"]


class _BaseSSA(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing; subclasses choose the matrix family."""

    def __init__(self, n_components=1, n_intervals=6, breakpoints=None,
                 nonstationary=True):
        self.n_components = n_components
        self.n_intervals = n_intervals
        self.breakpoints = breakpoints
        self.nonstationary = nonstationary

    def _estimate(self, X, segmentation):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Estimate the unmixing from a (T, p) array."""
        X = check_array(X, dtype=np.float64, ensure_min_features=2)
        if self.breakpoints is not None:
            segmentation = custom_segmentation(X.shape[0], self.breakpoints)
        else:
            segmentation = equal_segmentation(X.shape[0], self.n_intervals)
        result = self._estimate(X, segmentation)
        self.result_ = result
        self.components_ = result.W_n if self.nonstationary else result.W_s
        self.mean_ = result.whitening.center
        self.n_features_in_ = X.shape[1]
        table = result.eigen_table
        if result.method == "comb":
            self.pseudo_eigenvalues_ = table
        else:
            self.eigenvalues_ = table
        return self

    def transform(self, X):
        """Project data onto the selected components."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Y):
        """Map selected components back to data space (least squares when
        only a subset of rows was kept)."""
        check_is_fitted(self, "components_")
        Y = check_array(Y, dtype=np.float64)
        return Y @ np.linalg.pinv(self.components_).T + self.mean_


class SSAsir(_BaseSSA):
    """Separation driven by interval mean differences."""

    def _estimate(self, X, segmentation):
        return ssa_single(X, segmentation, "sir", self.n_components)


class SSAsave(_BaseSSA):
    """Separation driven by interval variance differences."""

    def __init__(self, n_components=1, n_intervals=6, breakpoints=None,
                 nonstationary=True, center="interval"):
        super().__init__(n_components, n_intervals, breakpoints, nonstationary)
        self.center = center

    def _estimate(self, X, segmentation):
        return ssa_single(X, segmentation, "save", self.n_components,
                          center=self.center)


class SSAcor(_BaseSSA):
    """Separation driven by interval autocovariance differences at one lag."""

    def __init__(self, n_components=1, n_intervals=6, breakpoints=None,
                 nonstationary=True, lag=1, center="interval"):
        super().__init__(n_components, n_intervals, breakpoints, nonstationary)
        self.lag = lag
        self.center = center

    def _estimate(self, X, segmentation):
        return ssa_single(X, segmentation, "cor", self.n_components,
                          lag=self.lag, center=self.center)


class ASSA(_BaseSSA):
    """Separation driven by interval means and variances combined in a
    single matrix."""

    def __init__(self, n_components=1, n_intervals=6, breakpoints=None,
                 nonstationary=True, center="interval"):
        super().__init__(n_components, n_intervals, breakpoints, nonstationary)
        self.center = center

    def _estimate(self, X, segmentation):
        return ssa_single(X, segmentation, "assa", self.n_components,
                          center=self.center)


class SSAcomb(_BaseSSA):
    """Separation by joint diagonalization of mean, variance and
    autocovariance nonstationarity matrices."""

    def __init__(self, n_components=1, n_intervals=6, breakpoints=None,
                 nonstationary=True, lags=(1,), center="interval"):
        super().__init__(n_components, n_intervals, breakpoints, nonstationary)
        self.lags = lags
        self.center = center

    def _estimate(self, X, segmentation):
        return ssa_comb(X, segmentation, self.n_components, lags=self.lags,
                        center=self.center)
