"""Fuzzy-random stochastic volatility toolkit.

Simulation of BN-S-type volatility models driven by Levy subordinators,
with triangular-fuzzy uncertainty on prices and jumps; OHLC fuzzy-price
preprocessing; threshold jump labeling; and a small neural classifier that
estimates the jump-regime mixing parameter from labeled windows.
"""

from .fuzzy import (
    AlphaCut,
    FuzzyEnsemble,
    RiskAttitude,
    TriangularFuzzyNumber,
    add,
    alpha_cut,
    crisp,
    expectation,
    frv_correlation,
    frv_covariance,
    frv_expectation,
    frv_variance,
    membership,
    reciprocal_scale,
    scale,
    sub,
)
from .levy import (
    JumpPath,
    RngStream,
    SubordinatorSpec,
    convex_combine,
    levy_moments,
    simulate_subordinator,
    superpose,
)
from .bns import (
    CorrelationEstimate,
    FuzzySimulatedPath,
    ModelParams,
    SimulatedPath,
    ThetaSchedule,
    corr_formula,
    corr_monte_carlo,
    price_path,
    simulate_classic,
    simulate_fuzzy,
    simulate_generalized,
    variance_exact_step,
)
from .market_data import (
    Bar,
    BarFormat,
    DayBoundary,
    DescriptiveStats,
    FuzzyBarSeries,
    RealizedVolSeries,
    descriptive_stats,
    emit_plot_data,
    parse_bars,
    realized_volatility,
    serialize_bars,
    to_fuzzy_series,
)
from .jumplab import (
    JumpEvent,
    SplitSpec,
    WindowedDataset,
    build_dataset,
    detect_big_jumps,
    jump_count_table,
    split,
)
from .classifier import (
    ClassificationReport,
    NetConfig,
    ThetaEstimate,
    TrainedModel,
    classification_report,
    estimate_theta,
    predict,
    predict_batch,
    train,
)

__version__ = "0.1.0"
