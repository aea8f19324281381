"""Online time-series search with best-price and query-based predictions."""

from .core import (
    PriceBounds,
    PriceSequence,
    TradeOutcome,
    best_price,
    competitive_ratio,
    on_star_reservation,
    run_reservation,
)
from .errors import SearchError
from .predictors import (
    ErrorBounds,
    ErrorSpec,
    Parity,
    ora_bound,
    ora_reservation,
    robust_mix_bound,
    robust_mix_reservation,
)

__version__ = "0.1.0"
