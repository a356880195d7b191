"""Scatter-type matrices that quantify nonstationarity of a whitened series.

Each builder averages, over the intervals of a segmentation, a squared
departure of an interval statistic from its stationary target, with interval
weights |T_i| / T.  Directions with large eigenvalues of these matrices carry
the nonstationary behaviour:

* ``m_mean``  -- interval means against the global zero mean,
* ``m_var``   -- interval covariances against the identity,
* ``m_cor``   -- interval lagged autocovariances against the global one,
* ``m_assa``  -- a single matrix combining the mean and covariance statistics.

For a matrix A, the square A^2 always means A A'.
"""

import json
from dataclasses import dataclass

import numpy as np

from .moments import interval_autocov, interval_mean
from .series import Segmentation, as_series

__all__ = ["NonstatMatrix", "KINDS", "m_mean", "m_var", "m_cor", "m_assa"]

KINDS = ("mean", "var", "cor", "assa")

# whitening is the caller's job; this only catches forgetting it entirely
WHITENED_MEAN_TOL = 1e-6


@dataclass(frozen=True)
class NonstatMatrix:
    """A p x p nonstationarity matrix together with how it was built.

    Attributes
    ----------
    kind : str
        One of ``mean``, ``var``, ``cor``, ``assa``.
    lag : int or None
        The autocovariance lag, for ``cor`` matrices only.
    matrix : ndarray, shape (p, p)
        Symmetric; positive semidefinite except possibly for ``assa``.
    segmentation : Segmentation
        The intervals the matrix was computed on.
    """

    kind: str
    lag: int
    matrix: np.ndarray
    segmentation: Segmentation

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        matrix = np.array(self.matrix, dtype=np.float64)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def p(self):
        return self.matrix.shape[0]

    def to_json(self):
        """Serialize to a JSON string (row-major values)."""
        obj = {
            "kind": self.kind,
            "p": self.p,
            "values": [float(v) for v in self.matrix.ravel(order="C")],
            "segmentation": {
                "n_samples": self.segmentation.n_samples,
                "breakpoints": list(self.segmentation.breakpoints),
            },
        }
        if self.kind == "cor":
            obj["tau"] = self.lag
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        p = int(obj["p"])
        seg = obj["segmentation"]
        starts = [1] + [int(b) for b in seg["breakpoints"]]
        ends = starts[1:] + [int(seg["n_samples"]) + 1]
        segmentation = Segmentation(int(seg["n_samples"]), tuple(zip(starts, ends)))
        return cls(
            kind=obj["kind"],
            lag=int(obj["tau"]) if "tau" in obj else None,
            matrix=np.array(obj["values"], dtype=np.float64).reshape(p, p),
            segmentation=segmentation,
        )


def _check_inputs(whitened, segmentation):
    series = as_series(whitened)
    if segmentation.n_samples != series.n_samples:
        raise ValueError(
            f"segmentation covers {segmentation.n_samples} samples, "
            f"series has {series.n_samples}"
        )
    worst = np.abs(series.values.mean(axis=0)).max()
    if worst > WHITENED_MEAN_TOL:
        raise ValueError(
            f"input does not look whitened: largest |channel mean| is {worst:.3e}"
        )
    return series


def m_mean(whitened, segmentation):
    """Weighted outer products of the interval means.

    M = sum_i |T_i|/T * m_i m_i' over the intervals, computed on a whitened
    series whose global mean is zero.
    """
    series = _check_inputs(whitened, segmentation)
    p = series.n_channels
    M = np.zeros((p, p))
    for (a, b), w in zip(segmentation.intervals, segmentation.weights):
        m = interval_mean(series, (a, b))
        M += w * np.outer(m, m)
    return NonstatMatrix("mean", None, M, segmentation)


def m_var(whitened, segmentation, center="interval"):
    """Weighted squared deviations of interval covariances from the identity.

    M = sum_i |T_i|/T * (I - S_i)^2 with S_i the interval covariance.
    """
    series = _check_inputs(whitened, segmentation)
    p = series.n_channels
    eye = np.eye(p)
    M = np.zeros((p, p))
    for (a, b), w in zip(segmentation.intervals, segmentation.weights):
        S = interval_autocov(series, (a, b), 0, center)
        S = (S + S.T) / 2.0
        G = eye - S
        M += w * (G @ G.T)
    return NonstatMatrix("var", None, M, segmentation)


def m_cor(whitened, segmentation, lag=1, center="interval"):
    """Weighted squared deviations of interval lagged autocovariances from the
    full-span one.

    M = sum_i |T_i|/T * (S_lag - S_{lag,i})^2 for a lag of at least 1.
    """
    lag = int(lag)
    if lag < 1:
        raise ValueError(f"lag must be at least 1, got {lag}")
    series = _check_inputs(whitened, segmentation)
    segmentation.check_lag(lag)
    p = series.n_channels
    full = interval_autocov(series, (1, series.n_samples + 1), lag, center)
    M = np.zeros((p, p))
    for (a, b), w in zip(segmentation.intervals, segmentation.weights):
        G = full - interval_autocov(series, (a, b), lag, center)
        M += w * (G @ G.T)
    return NonstatMatrix("cor", lag, M, segmentation)


def m_assa(whitened, segmentation, center="interval"):
    """Single combined mean and covariance nonstationarity matrix.

    M = sum_i |T_i|/T * (m_i m_i' + S_i S_i' / 2) - I/2.  Its eigenvalues may
    be negative.
    """
    series = _check_inputs(whitened, segmentation)
    p = series.n_channels
    M = np.zeros((p, p))
    for (a, b), w in zip(segmentation.intervals, segmentation.weights):
        m = interval_mean(series, (a, b))
        S = interval_autocov(series, (a, b), 0, center)
        S = (S + S.T) / 2.0
        M += w * (np.outer(m, m) + 0.5 * (S @ S.T))
    M -= 0.5 * np.eye(p)
    return NonstatMatrix("assa", None, M, segmentation)
