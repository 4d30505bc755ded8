"""Accuracy and efficiency scoring for gridded hotspot forecasts.

The library evaluates spatio-temporal prediction models on a discretized
region: contingency-based rates, hit rate / coverage / PAI / PPAI / SER,
the average logarithmic score, a grid search for the PPAI penalty
exponent, expected-utility and weighted-sum combination of measures, and
Wilcoxon signed-rank comparison across test periods. A batch CLI
(``gridscore``) wraps everything for file-based use.
"""

__version__ = "0.1.0"

from .alpha_search import (
    AlphaSearchResult,
    CumulativeLevel,
    cumulative_levels,
    optimal_alpha,
    order_units,
)
from .combine import (
    LabelConditionalRates,
    UtilitySpec,
    WeightVector,
    conditional_rates,
    expected_utility,
    hit_rate_from_conditionals,
    rank_models,
    standardize,
    weighted_aggregate,
)
from .domain import (
    Cell,
    ContingencyTable,
    Event,
    EventSet,
    GridSpec,
    HotspotSelection,
    ProbabilitySurface,
    assign_events,
    contingency,
)
from .errors import (
    AlphaSearchError,
    DegenerateScoresError,
    GridscoreError,
    IngestError,
    PeriodMismatchError,
    ValidationError,
    ZeroMassError,
)
from .metrics import (
    HotspotUnit,
    RateSet,
    als,
    coverage,
    coverage_from_cells,
    hit_rate,
    hit_rate_from_events,
    pai,
    ppai,
    rates_from_contingency,
    ser,
)
from .stats import (
    PeriodSeries,
    WsrResult,
    bonferroni,
    summarize,
    wilcoxon_signed_rank,
)
from .synth import (
    GeneratorSpec,
    empirical_surface,
    generate_events,
    make_grid,
    top_k_baseline,
    uniform_surface,
)

__all__ = [
    "__version__",
    "AlphaSearchError",
    "AlphaSearchResult",
    "Cell",
    "ContingencyTable",
    "CumulativeLevel",
    "DegenerateScoresError",
    "Event",
    "EventSet",
    "GeneratorSpec",
    "GridSpec",
    "GridscoreError",
    "HotspotSelection",
    "HotspotUnit",
    "IngestError",
    "LabelConditionalRates",
    "PeriodMismatchError",
    "PeriodSeries",
    "ProbabilitySurface",
    "RateSet",
    "UtilitySpec",
    "ValidationError",
    "WeightVector",
    "WsrResult",
    "ZeroMassError",
    "als",
    "assign_events",
    "bonferroni",
    "conditional_rates",
    "contingency",
    "coverage",
    "coverage_from_cells",
    "cumulative_levels",
    "empirical_surface",
    "expected_utility",
    "generate_events",
    "hit_rate",
    "hit_rate_from_conditionals",
    "hit_rate_from_events",
    "make_grid",
    "optimal_alpha",
    "order_units",
    "pai",
    "ppai",
    "rank_models",
    "rates_from_contingency",
    "ser",
    "standardize",
    "summarize",
    "top_k_baseline",
    "uniform_surface",
    "weighted_aggregate",
    "wilcoxon_signed_rank",
]
