"""Subspace-recovery metric and the Monte Carlo benchmark driver.

Recovery quality is the squared Frobenius distance D2 = ||P - P_hat||^2 / 2
between true and estimated projection matrices, zero for perfect recovery
and at most min(k, p - k).  ``run_experiment`` sweeps scenarios, sample
sizes, interval counts and estimators, reusing each replicate's whitening
and nonstationarity matrices across methods.
"""

from dataclasses import dataclass

import numpy as np

from .moments import SingularCovarianceError, whiten
from .nonstat import m_assa, m_cor, m_mean, m_var
from .series import equal_segmentation, format_float
from .simulation import make_setting
from .ssa import comb_from_matrices, single_from_matrix

__all__ = [
    "SubspaceDistance",
    "projection_matrix",
    "subspace_distance",
    "evaluate_result",
    "run_experiment",
    "aggregate_results",
    "write_results_csv",
    "write_aggregate_csv",
    "RESULT_COLUMNS",
    "AGGREGATE_COLUMNS",
]

RANK_RATIO = 1e-10
PROJECTION_TOL = 1e-6

METHODS = ("sir", "save", "cor", "assa", "comb")

DEFAULT_T_GRID = (1000, 2000, 4000, 8000, 16000)
DEFAULT_K_GRID = (2, 6, 12)

DEFAULT_COR_LAG = 1
DEFAULT_COMB_LAGS = (1,)


@dataclass(frozen=True)
class SubspaceDistance:
    """Squared distances for the nonstationary and stationary subspaces."""

    d2_n: float
    d2_s: float


def projection_matrix(W):
    """Orthogonal projection onto the row space of a full-row-rank matrix."""
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    _, svals, vt = np.linalg.svd(W, full_matrices=False)
    if W.shape[0] > W.shape[1] or svals[-1] <= RANK_RATIO * svals[0]:
        raise ValueError(
            f"matrix of shape {W.shape} is rank-deficient, cannot project"
        )
    return vt.T @ vt


def _check_projection(P, name):
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"{name} must be square, got shape {P.shape}")
    if np.max(np.abs(P - P.T)) > PROJECTION_TOL:
        raise ValueError(f"{name} is not symmetric")
    if np.max(np.abs(P @ P - P)) > PROJECTION_TOL:
        raise ValueError(f"{name} is not idempotent")
    return P


def subspace_distance(P_true, P_est):
    """Half the squared Frobenius norm of the difference of two projections.

    Zero iff the projections agree; at most min(k, p - k) for rank-k
    projections in dimension p.
    """
    P_true = _check_projection(P_true, "P_true")
    P_est = _check_projection(P_est, "P_est")
    if P_true.shape != P_est.shape:
        raise ValueError(
            f"projection shapes differ: {P_true.shape} vs {P_est.shape}"
        )
    diff = P_true - P_est
    return 0.5 * float((diff * diff).sum())


def evaluate_result(result, scenario):
    """Distances between a fitted unmixing's subspaces and a scenario's
    ground truth, both sides as projections in original data coordinates."""
    return SubspaceDistance(
        d2_n=subspace_distance(scenario.true_P_n, projection_matrix(result.W_n)),
        d2_s=subspace_distance(scenario.true_P_s, projection_matrix(result.W_s)),
    )


def _estimate(method, matrices, whitening, k, comb_lags):
    if method == "comb":
        mats = [matrices["mean"], matrices["var"]]
        mats += [matrices["cor", lag] for lag in comb_lags]
        return comb_from_matrices(mats, whitening, k)
    key = {"sir": "mean", "save": "var", "assa": "assa"}.get(method)
    return single_from_matrix(matrices[key or "cor_single"], whitening, k)


def run_experiment(
    settings=(1, 2, 3, 4),
    methods=METHODS,
    T_grid=DEFAULT_T_GRID,
    K_grid=DEFAULT_K_GRID,
    replicates=100,
    seed=1,
    cor_lag=DEFAULT_COR_LAG,
    comb_lags=DEFAULT_COMB_LAGS,
    center="interval",
):
    """Sweep the benchmark grid and score every estimator.

    Replicate r of every cell uses scenario seed ``seed + r``, so the whole
    table is reproducible bit for bit from the master seed.  Replicate
    failures (e.g. singular covariance) are recorded with ``failed=True``
    and NaN distances rather than aborting the sweep.

    Returns
    -------
    list of dict
        One row per (setting, method, T, K, replicate) with keys matching
        ``RESULT_COLUMNS``.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    rows = []

    def emit(setting, method, T, K, replicate, dist=None):
        rows.append({
            "setting": setting, "method": method, "T": T, "K": K,
            "replicate": replicate,
            "d2_n": float("nan") if dist is None else dist.d2_n,
            "d2_s": float("nan") if dist is None else dist.d2_s,
            "failed": dist is None,
        })

    recoverable = (SingularCovarianceError, ValueError, np.linalg.LinAlgError)
    for setting in settings:
        for T in T_grid:
            for r in range(replicates):
                try:
                    scenario = make_setting(setting, T, seed + r)
                    wr = whiten(scenario.observed)
                except recoverable:
                    for K in K_grid:
                        for method in methods:
                            emit(setting, method, T, K, r)
                    continue
                for K in K_grid:
                    try:
                        seg = equal_segmentation(T, K)
                        matrices = _matrices_for(
                            methods, wr.whitened, seg, cor_lag, comb_lags, center
                        )
                    except recoverable:
                        for method in methods:
                            emit(setting, method, T, K, r)
                        continue
                    for method in methods:
                        try:
                            res = _estimate(method, matrices, wr, scenario.k, comb_lags)
                            dist = evaluate_result(res, scenario)
                        except recoverable:
                            emit(setting, method, T, K, r)
                        else:
                            emit(setting, method, T, K, r, dist)
    return rows


def _matrices_for(methods, whitened, segmentation, cor_lag, comb_lags, center):
    matrices = {}
    if "sir" in methods or "comb" in methods:
        matrices["mean"] = m_mean(whitened, segmentation)
    if "save" in methods or "comb" in methods:
        matrices["var"] = m_var(whitened, segmentation, center)
    if "comb" in methods:
        for lag in comb_lags:
            matrices["cor", lag] = m_cor(whitened, segmentation, lag, center)
    if "cor" in methods:
        matrices["cor_single"] = m_cor(whitened, segmentation, cor_lag, center)
    if "assa" in methods:
        matrices["assa"] = m_assa(whitened, segmentation, center)
    return matrices


def aggregate_results(rows):
    """Collapse a result table to per-cell means and standard errors.

    Failed replicates are excluded from the statistics but counted; a cell
    whose failure share exceeds 5 percent is flagged.  Standard errors use
    the ddof=1 standard deviation and are NaN below two successes.
    """
    order = []
    groups = {}
    for row in rows:
        key = (row["setting"], row["method"], row["T"], row["K"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    def stats(values):
        if not values:
            return float("nan"), float("nan")
        arr = np.array(values)
        mean = float(arr.mean())
        se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else float("nan")
        return mean, se

    out = []
    for key in order:
        grp = groups[key]
        ok = [row for row in grp if not row["failed"]]
        failures = len(grp) - len(ok)
        mean_n, se_n = stats([row["d2_n"] for row in ok])
        mean_s, se_s = stats([row["d2_s"] for row in ok])
        out.append({
            "setting": key[0], "method": key[1], "T": key[2], "K": key[3],
            "replicates": len(grp), "failures": failures,
            "mean_d2_n": mean_n, "se_d2_n": se_n,
            "mean_d2_s": mean_s, "se_d2_s": se_s,
            "flagged": failures > 0.05 * len(grp),
        })
    return out


RESULT_COLUMNS = ("setting", "method", "T", "K", "replicate", "d2_n", "d2_s", "failed")
AGGREGATE_COLUMNS = (
    "setting", "method", "T", "K", "replicates", "failures",
    "mean_d2_n", "se_d2_n", "mean_d2_s", "se_d2_s", "flagged",
)


def _cell(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _write_table(rows, columns, path):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_results_csv(rows, path):
    """Write the per-replicate result table as CSV."""
    _write_table(rows, RESULT_COLUMNS, path)


def write_aggregate_csv(rows, path):
    """Write the aggregated table (means, standard errors, flags) as CSV."""
    _write_table(rows, AGGREGATE_COLUMNS, path)
