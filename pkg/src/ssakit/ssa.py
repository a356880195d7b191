"""Stationary subspace estimation from nonstationarity matrices.

``ssa_single`` eigendecomposes one nonstationarity matrix; ``ssa_comb``
jointly diagonalizes several of them.  Either way the rows of the resulting
unmixing matrix split into W_n (nonstationary, largest diagonal values first)
and W_s (stationary), and W @ S @ W' = I for the sample covariance S of the
input, so estimated components always have unit sample covariance.
"""

import json
from dataclasses import dataclass

import numpy as np

from .jointdiag import joint_diagonalize
from .moments import WhiteningResult, whiten
from .nonstat import m_assa, m_cor, m_mean, m_var
from .series import MultivariateSeries, Segmentation, as_series

__all__ = [
    "SsaResult",
    "ssa_single",
    "ssa_comb",
    "single_from_matrix",
    "comb_from_matrices",
    "classify_components",
    "transform",
    "inverse_transform",
    "screeplot_data",
]

METHODS = ("sir", "save", "cor", "assa", "comb")

# single-matrix method -> nonstationarity matrix kind
_METHOD_KIND = {"sir": "mean", "save": "var", "cor": "cor", "assa": "assa"}

# Calibrated so that the classification of a jointly diagonalized
# mean/var/cor table marks a component kind only when its entry clearly
# exceeds the stationary noise floor of the same row; values much above 3
# start missing weak autocovariance nonstationarity at moderate T.
DEFAULT_CLASSIFY_THRESHOLD = 2.5


@dataclass(frozen=True)
class SsaResult:
    """A fitted unmixing, split into nonstationary and stationary rows.

    Attributes
    ----------
    method : str
        One of ``sir``, ``save``, ``cor``, ``assa``, ``comb``.
    k : int
        Number of components treated as nonstationary.
    W_n : ndarray, shape (k, p)
        Unmixing rows of the estimated nonstationary components, in original
        data coordinates (the whitener is folded in).
    W_s : ndarray, shape (p - k, p)
        Unmixing rows of the estimated stationary components.
    eigen_table : ndarray
        For single-matrix methods the descending eigenvalues, shape (p,).
        For ``comb`` the pseudo-eigenvalue table, one row per input matrix,
        columns ordered by descending column sum, shape (n_matrices, p).
    row_labels : tuple of str
        One label per eigen_table row: ``M_m``, ``M_v``, ``M_tau<lag>`` or
        ``M_assa``.
    whitening : WhiteningResult
    segmentation : Segmentation or None
    lags : tuple of int
        Autocovariance lags used, empty when none were.
    warnings : tuple of str
        Non-fatal notes, e.g. joint diagonalization hitting its sweep budget.
    """

    method: str
    k: int
    W_n: np.ndarray
    W_s: np.ndarray
    eigen_table: np.ndarray
    row_labels: tuple
    whitening: WhiteningResult
    segmentation: Segmentation = None
    lags: tuple = ()
    warnings: tuple = ()

    def __post_init__(self):
        for name in ("W_n", "W_s", "eigen_table"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def p(self):
        return self.W_n.shape[1]

    @property
    def unmixing(self):
        """All p unmixing rows, nonstationary first."""
        return np.vstack([self.W_n, self.W_s])

    @property
    def column_sums(self):
        """Per-component total diagonal energy (equals eigen_table for
        single-matrix methods)."""
        table = np.atleast_2d(self.eigen_table)
        return table.sum(axis=0)

    def to_json(self):
        obj = {
            "method": self.method,
            "k": int(self.k),
            "lags": [int(l) for l in self.lags],
            "W_n": self.W_n.tolist(),
            "W_s": self.W_s.tolist(),
            "eigen_table": {
                "labels": list(self.row_labels),
                "values": np.atleast_2d(self.eigen_table).tolist(),
            },
            "whitening": {
                "center": self.whitening.center.tolist(),
                "whitener": self.whitening.whitener.tolist(),
            },
            "warnings": list(self.warnings),
        }
        if self.segmentation is not None:
            obj["segmentation"] = {
                "n_samples": self.segmentation.n_samples,
                "breakpoints": list(self.segmentation.breakpoints),
            }
        return json.dumps(obj, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        table = np.array(obj["eigen_table"]["values"], dtype=np.float64)
        if obj["method"] != "comb":
            table = table[0]
        segmentation = None
        if "segmentation" in obj:
            seg = obj["segmentation"]
            starts = [1] + [int(b) for b in seg["breakpoints"]]
            ends = starts[1:] + [int(seg["n_samples"]) + 1]
            segmentation = Segmentation(int(seg["n_samples"]), tuple(zip(starts, ends)))
        whitening = WhiteningResult(
            whitened=None,
            center=np.array(obj["whitening"]["center"], dtype=np.float64),
            whitener=np.array(obj["whitening"]["whitener"], dtype=np.float64),
            covariance_eigs=None,
        )
        return cls(
            method=obj["method"],
            k=int(obj["k"]),
            W_n=np.array(obj["W_n"], dtype=np.float64),
            W_s=np.array(obj["W_s"], dtype=np.float64),
            eigen_table=table,
            row_labels=tuple(obj["eigen_table"]["labels"]),
            whitening=whitening,
            segmentation=segmentation,
            lags=tuple(int(l) for l in obj["lags"]),
            warnings=tuple(obj["warnings"]),
        )


def _check_k(k, p):
    k = int(k)
    if not 0 < k < p:
        raise ValueError(f"k must satisfy 0 < k < p = {p}, got {k}")
    return k


def _fix_column_signs(vectors):
    vectors = vectors.copy()
    for a in range(vectors.shape[1]):
        i = int(np.argmax(np.abs(vectors[:, a])))
        if vectors[i, a] < 0.0:
            vectors[:, a] = -vectors[:, a]
    return vectors


def single_from_matrix(matrix, whitening, k):
    """Build an :class:`SsaResult` from one precomputed nonstationarity matrix.

    Parameters
    ----------
    matrix : NonstatMatrix
        Computed on ``whitening.whitened``.
    whitening : WhiteningResult
    k : int
        Number of leading eigenvectors labelled nonstationary.
    """
    p = matrix.p
    k = _check_k(k, p)
    M = matrix.matrix
    evals, evecs = np.linalg.eigh((M + M.T) / 2.0)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = _fix_column_signs(evecs[:, order])
    W = evecs.T @ whitening.whitener
    method = {v: m for m, v in _METHOD_KIND.items()}[matrix.kind]
    label = {"mean": "M_m", "var": "M_v", "assa": "M_assa"}.get(
        matrix.kind, f"M_tau{matrix.lag}"
    )
    return SsaResult(
        method=method,
        k=k,
        W_n=W[:k],
        W_s=W[k:],
        eigen_table=evals,
        row_labels=(label,),
        whitening=whitening,
        segmentation=matrix.segmentation,
        lags=(matrix.lag,) if matrix.kind == "cor" else (),
    )


def ssa_single(series, segmentation, kind="sir", k=1, lag=1, center="interval"):
    """Estimate the unmixing from a single nonstationarity matrix.

    Parameters
    ----------
    series : MultivariateSeries or array_like, shape (T, p)
        Observed data; whitened internally.
    segmentation : Segmentation
    kind : str
        ``sir`` (interval means), ``save`` (interval variances), ``cor``
        (interval autocovariances at ``lag``) or ``assa`` (combined
        mean/variance matrix).
    k : int
        Number of nonstationary components to estimate.
    lag : int
        Autocovariance lag, used by ``cor`` only.
    center : str
        Centering of interval second moments: ``"interval"`` (each interval's
        own mean) or ``"global"`` (full-span mean).

    Returns
    -------
    SsaResult
    """
    if kind not in _METHOD_KIND:
        raise ValueError(f"kind must be one of {tuple(_METHOD_KIND)}, got {kind!r}")
    series = as_series(series)
    wr = whiten(series)
    if kind == "sir":
        matrix = m_mean(wr.whitened, segmentation)
    elif kind == "save":
        matrix = m_var(wr.whitened, segmentation, center)
    elif kind == "cor":
        matrix = m_cor(wr.whitened, segmentation, lag, center)
    else:
        matrix = m_assa(wr.whitened, segmentation, center)
    return single_from_matrix(matrix, wr, k)


def comb_from_matrices(matrices, whitening, k, tol=1e-10, max_sweeps=100):
    """Build an :class:`SsaResult` by jointly diagonalizing precomputed
    nonstationarity matrices.

    Components are ordered by descending column sums of the pseudo-eigenvalue
    table diag(U' M_i U); the first ``k`` are labelled nonstationary.
    """
    if not matrices:
        raise ValueError("need at least one nonstationarity matrix")
    p = matrices[0].p
    k = _check_k(k, p)
    labels = []
    for m in matrices:
        labels.append(
            {"mean": "M_m", "var": "M_v", "assa": "M_assa"}.get(m.kind, f"M_tau{m.lag}")
        )
    jd = joint_diagonalize([m.matrix for m in matrices], tol=tol, max_sweeps=max_sweeps)
    order = np.argsort(-jd.diagonals.sum(axis=0), kind="stable")
    rotation = jd.rotation[:, order]
    table = jd.diagonals[:, order]
    W = rotation.T @ whitening.whitener
    warnings = ()
    if not jd.converged:
        warnings = (
            f"joint diagonalization did not converge within {jd.sweeps} sweeps",
        )
    lags = tuple(m.lag for m in matrices if m.kind == "cor")
    return SsaResult(
        method="comb",
        k=k,
        W_n=W[:k],
        W_s=W[k:],
        eigen_table=table,
        row_labels=tuple(labels),
        whitening=whitening,
        segmentation=matrices[0].segmentation,
        lags=lags,
        warnings=warnings,
    )


def ssa_comb(
    series,
    segmentation,
    k=1,
    lags=(1,),
    kinds=("mean", "var", "cor"),
    center="interval",
    tol=1e-10,
    max_sweeps=100,
):
    """Estimate the unmixing by jointly diagonalizing several matrices.

    By default the matrix list is [mean, variance, one autocovariance matrix
    per entry of ``lags``].  ``kinds`` restricts the families, e.g.
    ``kinds=("mean",)`` degenerates to the same span as ``ssa_single("sir")``.

    Returns
    -------
    SsaResult
    """
    unknown = set(kinds) - {"mean", "var", "cor"}
    if unknown:
        raise ValueError(f"unknown matrix kinds: {sorted(unknown)}")
    series = as_series(series)
    wr = whiten(series)
    matrices = []
    if "mean" in kinds:
        matrices.append(m_mean(wr.whitened, segmentation))
    if "var" in kinds:
        matrices.append(m_var(wr.whitened, segmentation, center))
    if "cor" in kinds:
        for lag in lags:
            matrices.append(m_cor(wr.whitened, segmentation, lag, center))
    return comb_from_matrices(matrices, wr, k, tol=tol, max_sweeps=max_sweeps)


def _row_kind_label(label):
    if label == "M_m":
        return "mean"
    if label == "M_v":
        return "var"
    if label == "M_assa":
        return "assa"
    return f"cor({label.removeprefix('M_tau')})"


def classify_components(result, threshold=DEFAULT_CLASSIFY_THRESHOLD):
    """Label each estimated nonstationary component with the kinds of
    nonstationarity it shows.

    A kind is attached to component j when its pseudo-eigenvalue exceeds
    ``threshold`` times the median of the same row's stationary-column
    entries.  Returns one set of labels (``mean``, ``var``, ``cor(<lag>)``)
    per nonstationary component.
    """
    table = np.atleast_2d(result.eigen_table)
    k = result.k
    stationary = table[:, k:]
    labels = []
    for j in range(k):
        kinds = set()
        for i, row_label in enumerate(result.row_labels):
            if table[i, j] > threshold * np.median(stationary[i]):
                kinds.add(_row_kind_label(row_label))
        labels.append(kinds)
    return labels


def transform(result, series):
    """Apply a fitted unmixing to data; nonstationary components come first.

    Returns a series with channels ``N1..Nk`` then ``S1..S(p-k)``.
    """
    series = as_series(series)
    if series.n_channels != result.p:
        raise ValueError(f"series has {series.n_channels} channels, expected {result.p}")
    Z = (series.values - result.whitening.center) @ result.unmixing.T
    names = [f"N{i + 1}" for i in range(result.k)] + [
        f"S{i + 1}" for i in range(result.p - result.k)
    ]
    return MultivariateSeries(Z, names)


def inverse_transform(result, components):
    """Map separated components back to the original data coordinates."""
    components = as_series(components)
    if components.n_channels != result.p:
        raise ValueError(
            f"components have {components.n_channels} channels, expected {result.p}"
        )
    X = components.values @ np.linalg.pinv(result.unmixing).T + result.whitening.center
    return MultivariateSeries(X)


def screeplot_data(result):
    """(component index, diagonal energy) pairs, descending, for elbow hunting.

    For ``comb`` results the energies are the pseudo-eigenvalue column sums,
    otherwise the eigenvalues themselves.
    """
    values = result.column_sums
    return [(i + 1, float(v)) for i, v in enumerate(values)]
