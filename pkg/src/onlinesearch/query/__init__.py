"""Query-based predictions: partitions, lying oracles, RLIS and RBIS."""

from .oracle import ResponseOracle, fixed_oracle, lazy_oracle, make_oracle
from .partition import IntervalPartition, QueryBudget
from .rbis import (
    Action,
    IterationRecord,
    SearchTranscript,
    query_lower_bound,
    rbis_bound,
    rbis_search,
)
from .rlis import (
    format_bits,
    parse_bits,
    rlis,
    rlis_bound,
    rlis_preprocess,
    rlis_reservation,
    rlis_reservation_index,
    rlis_responses,
    rlis_truthful_responses,
)
