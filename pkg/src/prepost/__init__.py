"""Finite-dimensional pre/post-selection toolkit.

Computes weak values with their sharp/unsharp/strange classification,
history-family consistency functionals, ABL probabilities, Lüders
conditional weights, and exact or Monte Carlo Gaussian-pointer
measurement statistics, plus a text scenario format and CLI.
"""

from .errors import (
    BasisMismatch,
    DimensionError,
    NormalizationError,
    NotHermitian,
    ParseError,
    PostSelectionImpossible,
    PrepostError,
    ScenarioFixtureError,
    UndefinedABL,
    UndefinedWeakValue,
    UndefinedWeight,
    UnknownEigenvalue,
)
from .linalg import CMat, CVec, adjoint, apply, inner, matmul, outer, tensor, trace
from .quantum import (
    Observable,
    Projector,
    State,
    WeakValueClass,
    WeakValueReport,
    as_observable,
    classify,
    spectral_decompose,
    weak_value,
    weak_value_sum,
)
from .histories import (
    ConsistencyReport,
    FailureMode,
    Family,
    History,
    abl_from_weak_values,
    abl_probability,
    abl_weight_agreement,
    conditional_weight,
    consistency,
    history_weight,
    rank_one_vector,
)
from .pointer import (
    Branch,
    BranchState,
    Density,
    PointerConfig,
    PointerEnsemble,
    entangle,
    exact_mean,
    exact_rate,
    gaussian_amplitude,
    pointer_density,
    postselect,
    sample,
    simulate,
    weak_value_estimate,
    write_density_csv,
    write_samples_csv,
)
from .scenarios import CheckResult, Expectation, Scenario, builtin, hardy, three_box
from .scenfile import ScenarioDoc, doc_from_scenario, parse, serialize, to_scenario

__version__ = "0.1.0"

__all__ = [
    "BasisMismatch",
    "Branch",
    "BranchState",
    "CheckResult",
    "CMat",
    "ConsistencyReport",
    "CVec",
    "Density",
    "DimensionError",
    "Expectation",
    "FailureMode",
    "Family",
    "History",
    "NormalizationError",
    "NotHermitian",
    "Observable",
    "ParseError",
    "PointerConfig",
    "PointerEnsemble",
    "PostSelectionImpossible",
    "PrepostError",
    "Projector",
    "Scenario",
    "ScenarioDoc",
    "ScenarioFixtureError",
    "State",
    "UndefinedABL",
    "UndefinedWeakValue",
    "UndefinedWeight",
    "UnknownEigenvalue",
    "WeakValueClass",
    "WeakValueReport",
    "abl_from_weak_values",
    "abl_probability",
    "abl_weight_agreement",
    "adjoint",
    "apply",
    "as_observable",
    "builtin",
    "classify",
    "conditional_weight",
    "consistency",
    "doc_from_scenario",
    "entangle",
    "exact_mean",
    "exact_rate",
    "gaussian_amplitude",
    "hardy",
    "history_weight",
    "inner",
    "matmul",
    "outer",
    "parse",
    "pointer_density",
    "postselect",
    "rank_one_vector",
    "sample",
    "serialize",
    "simulate",
    "spectral_decompose",
    "tensor",
    "three_box",
    "to_scenario",
    "trace",
    "weak_value",
    "weak_value_estimate",
    "weak_value_sum",
    "write_density_csv",
    "write_samples_csv",
]
