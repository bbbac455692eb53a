"""Exact fair division of indivisible goods under arbitrary entitlements.

Share computation (AnyPrice, truncated proportional, maximin and friends)
with checkable certificates, allocation through a sequential bidding game or
greedy envy-cycle placement, and per-agent guarantee certification. All
arithmetic is exact.
"""

from .bidding import (
    AgentView,
    GameTranscript,
    RoundRecord,
    Strategy,
    best_good_z,
    enumerate_win_patterns,
    meta_guarantees,
    meta_strategy,
    replay_transcript,
    run_game,
    strategy_aps35,
    strategy_bid_max_value,
    strategy_lemma34,
    strategy_rank_item,
    strategy_tps,
    strategy_zero,
    test_z_good,
    worst_case_adversary,
)
from .core import (
    Allocation,
    GuardError,
    InputError,
    Instance,
    OrderedReduction,
    Rat,
    Valuation,
    guard_limit,
    is_ordered,
    lift_allocation,
    make_instance,
    ordered_version,
    parse_instance,
    rat_from_str,
    rat_to_str,
    serialize_instance,
)
from .greedy_efx import greedy_efx, greedy_efx_full, resolve_envy_cycles
from .shares import (
    ApsResult,
    BundleWitness,
    PriceCertificate,
    aps_exact,
    check_bundle_witness,
    check_price_certificate,
    l_out_of_d_share_exact,
    mms_exact,
    pessimistic_share_exact,
    proportional_share,
    tps,
    two_agent_aps_allocation,
    unit_demand_aps,
    wmms_exact,
)
from .verify import (
    BOUND_SETS,
    AgentGuarantee,
    GuaranteeReport,
    check_allocation,
    check_ce,
    check_share_chain,
)

__version__ = "0.1.0"

__all__ = [
    "AgentGuarantee",
    "AgentView",
    "Allocation",
    "ApsResult",
    "BOUND_SETS",
    "BundleWitness",
    "GameTranscript",
    "GuardError",
    "GuaranteeReport",
    "InputError",
    "Instance",
    "OrderedReduction",
    "PriceCertificate",
    "Rat",
    "RoundRecord",
    "Strategy",
    "Valuation",
    "aps_exact",
    "best_good_z",
    "check_allocation",
    "check_bundle_witness",
    "check_ce",
    "check_price_certificate",
    "check_share_chain",
    "enumerate_win_patterns",
    "greedy_efx",
    "greedy_efx_full",
    "guard_limit",
    "is_ordered",
    "l_out_of_d_share_exact",
    "lift_allocation",
    "make_instance",
    "meta_guarantees",
    "meta_strategy",
    "mms_exact",
    "ordered_version",
    "parse_instance",
    "pessimistic_share_exact",
    "proportional_share",
    "rat_from_str",
    "rat_to_str",
    "replay_transcript",
    "resolve_envy_cycles",
    "run_game",
    "serialize_instance",
    "strategy_aps35",
    "strategy_bid_max_value",
    "strategy_lemma34",
    "strategy_rank_item",
    "strategy_tps",
    "strategy_zero",
    "test_z_good",
    "tps",
    "two_agent_aps_allocation",
    "unit_demand_aps",
    "wmms_exact",
    "worst_case_adversary",
]
