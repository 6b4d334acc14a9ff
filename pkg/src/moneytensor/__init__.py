"""Tensor-based macroeconomic modeling toolkit.

Money flows live in a sector x agent x time third-order tensor;
amplifier-style momentum equations turn productivity and resistance
grids into growth readings; policy operators and scenario shocks steer
a deterministic discrete-time simulation that reports six indicator
series, batch (CLI) or interactively (HTTP sessions).
"""

from .errors import CsvFormatError, SchemaError, UnknownLabelError, ValidationError
from .ledger import (
    CellIncrement,
    IndicatorSeries,
    Taxonomy,
    Transaction,
    build_tensor,
    classify,
    ingest_worldbank_csv,
    parse_transactions_csv,
)
from .momentum import (
    AmplifierParams,
    MomentumInputs,
    MomentumMatrix,
    aggregate_resistance,
    gdp_amplifier,
    momentum_matrix_from_flows,
    momentum_slice,
    momentum_tensor,
)
from .policy import (
    FeedbackPlan,
    PolicyAction,
    RegulatoryPlan,
    StimulusPlan,
    action_to_plans,
    adjust_resistance,
    apply_feedback,
    apply_stimulus,
)
from .sim import (
    EconomyState,
    IndicatorFrame,
    IndicatorParams,
    Shock,
    SimConfig,
    apply_shock,
    derive_indicators,
    init_state,
    run,
    step,
    uniform_feedback,
)
from .tensor_core import (
    AlsConfig,
    FactorTriple,
    Tensor3,
    contract_time,
    frobenius_norm,
    mode_unfold,
    outer_product3,
    rank1_approx,
    rank1_history,
    reconstruct,
)

__version__ = "0.1.0"

__all__ = [
    "AlsConfig",
    "AmplifierParams",
    "CellIncrement",
    "CsvFormatError",
    "EconomyState",
    "FactorTriple",
    "FeedbackPlan",
    "IndicatorFrame",
    "IndicatorParams",
    "IndicatorSeries",
    "MomentumInputs",
    "MomentumMatrix",
    "PolicyAction",
    "RegulatoryPlan",
    "SchemaError",
    "Shock",
    "SimConfig",
    "StimulusPlan",
    "Taxonomy",
    "Tensor3",
    "Transaction",
    "UnknownLabelError",
    "ValidationError",
    "action_to_plans",
    "adjust_resistance",
    "aggregate_resistance",
    "apply_feedback",
    "apply_shock",
    "apply_stimulus",
    "build_tensor",
    "classify",
    "contract_time",
    "derive_indicators",
    "frobenius_norm",
    "gdp_amplifier",
    "ingest_worldbank_csv",
    "init_state",
    "mode_unfold",
    "momentum_matrix_from_flows",
    "momentum_slice",
    "momentum_tensor",
    "outer_product3",
    "parse_transactions_csv",
    "rank1_approx",
    "rank1_history",
    "reconstruct",
    "run",
    "step",
    "uniform_feedback",
]
