"""Stationary subspace analysis for multivariate time series.

Estimates an unmixing matrix whose rows split an observed series into
nonstationary and stationary components, driven by differences of interval
means, variances and autocovariances, used one at a time or jointly
diagonalized.  Ships with ground-truth simulation scenarios, a subspace
recovery metric, a Monte Carlo benchmark driver and a CLI.
"""

from .series import (
    CsvFormatError,
    MultivariateSeries,
    Segmentation,
    as_series,
    custom_segmentation,
    equal_segmentation,
    read_csv,
    write_csv,
)
from .moments import (
    SingularCovarianceError,
    WhiteningResult,
    interval_autocov,
    interval_diagnostics,
    interval_mean,
    symmetric_inverse_sqrt,
    whiten,
)
from .nonstat import NonstatMatrix, m_assa, m_cor, m_mean, m_var
from .jointdiag import JointDiagResult, joint_diagonalize
from .ssa import (
    SsaResult,
    classify_components,
    comb_from_matrices,
    inverse_transform,
    screeplot_data,
    single_from_matrix,
    ssa_comb,
    ssa_single,
    transform,
)
from .simulation import (
    ArmaSpec,
    LevelShiftSpec,
    SimScenario,
    gen_arma,
    gen_blockwise,
    gen_level_shift,
    gen_tvar1,
    gen_tvvar,
    make_setting,
)
from .evaluation import (
    SubspaceDistance,
    aggregate_results,
    evaluate_result,
    projection_matrix,
    run_experiment,
    subspace_distance,
)
from .estimators import ASSA, SSAcomb, SSAcor, SSAsave, SSAsir

__version__ = "0.1.0"

__all__ = [
    "MultivariateSeries", "Segmentation", "CsvFormatError", "as_series",
    "equal_segmentation", "custom_segmentation", "read_csv", "write_csv",
    "WhiteningResult", "SingularCovarianceError", "interval_mean",
    "interval_autocov", "interval_diagnostics", "symmetric_inverse_sqrt",
    "whiten",
    "NonstatMatrix", "m_mean", "m_var", "m_cor", "m_assa",
    "JointDiagResult", "joint_diagonalize",
    "SsaResult", "ssa_single", "ssa_comb", "single_from_matrix",
    "comb_from_matrices", "classify_components", "transform",
    "inverse_transform", "screeplot_data",
    "ArmaSpec", "LevelShiftSpec", "SimScenario", "gen_arma", "gen_tvvar",
    "gen_tvar1", "gen_blockwise", "gen_level_shift", "make_setting",
    "SubspaceDistance", "projection_matrix", "subspace_distance",
    "evaluate_result", "run_experiment", "aggregate_results",
    "SSAsir", "SSAsave", "SSAcor", "ASSA", "SSAcomb",
    "__version__",
]
