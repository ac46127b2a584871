"""Market efficiency (DFA Hurst exponent, Approximate Entropy) versus
nearest-neighbour predictability of daily returns."""

from .apen import ApEnConfig, ApEnResult, compute_apen
from .dfa import DfaConfig, DfaResult, estimate_hurst
from .nn import EmbeddingConfig, HitRateResult, walk_forward_hit_rate
from .pipeline import (CorrelationReport, MarketSummary, cross_market_correlations, pearson,
                       run_market, run_panel)
from .synthetic import (FgnSpec, SurrogateSpec, fgn_panel, gen_fgn, gen_surrogate, moment_match,
                        surrogate_panel)
from .timeseries import (PriceSeries, ReturnSeries, SubPeriod, WindowPlan, build_window_plan,
                         log_returns)

__version__ = "0.1.0"
