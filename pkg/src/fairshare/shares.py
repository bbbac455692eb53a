"""Share notions for a single agent with an arbitrary entitlement.

Every solver takes a `Valuation` and, where relevant, an entitlement
`0 < b <= 1`, independent of any other agent. Integer-valued shares (APS,
MMS, l-out-of-d, pessimistic) return ints; the scale-dependent ones
(proportional, TPS, WMMS) return exact rationals.

`aps_exact` returns the share value together with two independently
checkable certificates: a price vector proving the upper bound and a
weighted bundle collection proving the lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .core import (
    Allocation,
    GuardError,
    InputError,
    Rat,
    Valuation,
    guard_limit,
    rat_from_str,
    rat_to_str,
)
from .lp import simplex_max


def _check_budget(b: Rat) -> Rat:
    if not isinstance(b, Rat):
        b = Rat(b)
    if not (0 < b <= 1):
        raise InputError(f"entitlement: must satisfy 0 < b <= 1, got {rat_to_str(Rat(b))}")
    return b


class _NodeCounter:
    """Work guard for the enumerative solvers; raises once the limit is hit."""

    __slots__ = ("guard", "limit", "used")

    def __init__(self, guard: str, limit: int | None = None) -> None:
        self.guard = guard
        self.limit = guard_limit() if limit is None else limit
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise GuardError(self.guard, self.limit, self.used)


# ---------------------------------------------------------------------------
# Scale-dependent shares.


def proportional_share(valuation: Valuation, b: Rat) -> Rat:
    b = _check_budget(b)
    return b * valuation.total


def tps(valuation: Valuation, b: Rat) -> Rat:
    """Truncated proportional share.

    Peels the highest-value item while it exceeds the proportional share of
    what is left, inflating the entitlement to b/(1-b) at each peel; once the
    entitlement reaches 1/2 the remainder is priced in one step.
    """
    b = _check_budget(b)
    vals = sorted(valuation.item_values, reverse=True)
    while True:
        total = sum(vals)
        ps = b * total
        if not vals or vals[0] <= ps:
            return ps
        if b >= Rat(1, 2):
            # b = 1 cannot reach here: ps = total >= vals[0] returns above.
            return (b / (1 - b)) * (total - vals[0])
        vals.pop(0)
        b = b / (1 - b)


def unit_demand_aps(item_values: Sequence[int], b: Rat) -> int:
    """APS under unit demand: the ceil(1/b)-th largest item value, 0 if absent."""
    b = _check_budget(b)
    rank = math.ceil(1 / b)
    ordered = sorted(item_values, reverse=True)
    if rank <= len(ordered):
        return ordered[rank - 1]
    return 0


# ---------------------------------------------------------------------------
# Knapsack primitives shared by the APS machinery and the certificate checks.


def _knapsack_table(values: Sequence[int], prices: Sequence[Rat]) -> tuple[list[Rat | None], list[int], int]:
    """cost[w] = min price of a subset of positive-value items of total value
    exactly w; mask[w] recovers one minimizer. Table size is guarded."""
    pos = [(j, values[j]) for j in range(len(values)) if values[j] > 0]
    total = sum(v for _, v in pos)
    limit = guard_limit()
    if total > limit:
        raise GuardError("knapsack-value", limit, total)
    cost: list[Rat | None] = [None] * (total + 1)
    mask = [0] * (total + 1)
    cost[0] = Rat(0)
    for j, v in pos:
        p = prices[j]
        for w in range(total, v - 1, -1):
            base = cost[w - v]
            if base is None:
                continue
            cand = base + p
            if cost[w] is None or cand < cost[w]:
                cost[w] = cand
                mask[w] = mask[w - v] | (1 << j)
    return cost, mask, total


def _min_price_reaching(
    values: Sequence[int], prices: Sequence[Rat], target: int
) -> tuple[Rat, frozenset[int]] | None:
    """Cheapest subset with value >= target, or None if no subset reaches it."""
    if target <= 0:
        return Rat(0), frozenset()
    cost, mask, total = _knapsack_table(values, prices)
    best_w = -1
    best: Rat | None = None
    for w in range(target, total + 1):
        c = cost[w]
        if c is not None and (best is None or c < best):
            best = c
            best_w = w
    if best is None:
        return None
    chosen = frozenset(j for j in range(len(values)) if mask[best_w] >> j & 1)
    return best, chosen


def _max_affordable_value(values: Sequence[int], prices: Sequence[Rat], budget: Rat) -> int:
    """Highest subset value purchasable within the budget."""
    cost, _, total = _knapsack_table(values, prices)
    best = 0
    for w in range(total + 1):
        c = cost[w]
        if c is not None and c <= budget and w > best:
            best = w
    return best


# ---------------------------------------------------------------------------
# Partition-based shares.


def mms_exact(valuation: Valuation, n_parts: int) -> int:
    """Maximin share over partitions into n_parts bundles, by branch and bound.

    Items are placed in descending value order; equal-sum bundles are only
    tried once per item, and a fractional water-filling bound prunes branches
    that cannot beat the incumbent. Node count is guarded.
    """
    if n_parts < 1:
        raise InputError(f"n_parts: must be >= 1, got {n_parts}")
    items = sorted((x for x in valuation.item_values if x > 0), reverse=True)
    if n_parts == 1:
        return sum(items)
    if n_parts > len(items):
        return 0
    counter = _NodeCounter("mms-nodes")
    k = n_parts
    suffix = [0] * (len(items) + 1)
    for idx in range(len(items) - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + items[idx]
    best = 0
    seen: set[tuple[int, tuple[int, ...]]] = set()

    def water_level(sums: list[int], pool: int) -> int:
        # Largest L with sum(max(L - s, 0)) <= pool, ignoring indivisibility.
        asc = sorted(sums)
        level = asc[0]
        t = 1
        while t < k:
            gap = (asc[t] - level) * t
            if gap > pool:
                break
            pool -= gap
            level = asc[t]
            t += 1
        return level + pool // t

    def dfs(idx: int, sums: list[int]) -> None:
        nonlocal best
        counter.tick()
        if idx == len(items):
            low = min(sums)
            if low > best:
                best = low
            return
        if water_level(sums, suffix[idx]) <= best:
            return
        key = (idx, tuple(sorted(sums)))
        if key in seen:
            return
        seen.add(key)
        x = items[idx]
        tried: set[int] = set()
        for i in range(k):
            if sums[i] in tried:
                continue
            tried.add(sums[i])
            sums[i] += x
            dfs(idx + 1, sums)
            sums[i] -= x
    dfs(0, [0] * k)
    return best


def _l_out_of_d_counted(values: list[int], l: int, d: int, counter: _NodeCounter) -> int:
    """Max over partitions into d bundles of the sum of the l smallest bundle
    values. Zero-value items are dropped; forced-empty bundles count as zeros."""
    vals = sorted((x for x in values if x > 0), reverse=True)
    cnt = len(vals)
    cap = min(d, cnt)
    forced_zeros = d - cap
    if l <= forced_zeros:
        return 0
    take = l - forced_zeros
    if cap == 0:
        return 0
    best = 0

    def objective(sums: list[int]) -> int:
        return sum(sorted(sums)[:take])

    def dfs(idx: int, sums: list[int], used: int) -> None:
        nonlocal best
        counter.tick()
        if idx == cnt:
            score = objective(sums)
            if score > best:
                best = score
            return
        x = vals[idx]
        # Canonical assignments: an item may open at most one new bundle.
        top = min(used + 1, cap)
        for i in range(top):
            sums[i] += x
            dfs(idx + 1, sums, max(used, i + 1))
            sums[i] -= x

    dfs(0, [0] * cap, 0)
    return best


def l_out_of_d_share_exact(valuation: Valuation, l: int, d: int) -> int:
    """Worst l bundles out of a best partition into d bundles."""
    if not (1 <= l <= d):
        raise InputError(f"l-out-of-d: need 1 <= l <= d, got l={l}, d={d}")
    if l == d:
        return valuation.total
    counter = _NodeCounter("partition-nodes")
    return _l_out_of_d_counted(list(valuation.item_values), l, d, counter)


def pessimistic_share_exact(valuation: Valuation, b: Rat) -> int:
    """Best l-out-of-d guarantee with l/d <= b.

    Unit-fraction entitlements reduce to MMS with 1/b parts. Otherwise d
    ranges over 1..m (larger denominators cannot help for integer values),
    and for each d only l = floor(b*d) matters since the objective is
    non-decreasing in l. One node guard spans the whole sweep.
    """
    b = _check_budget(b)
    if b.numerator == 1:
        return mms_exact(valuation, b.denominator)
    counter = _NodeCounter("partition-nodes")
    best = 0
    values = list(valuation.item_values)
    for d in range(1, valuation.m + 1):
        l = math.floor(b * d)
        if l < 1:
            continue
        if l == d:
            cand = valuation.total
        else:
            cand = _l_out_of_d_counted(values, l, d, counter)
        if cand > best:
            best = cand
    return best


def wmms_exact(entitlements: Sequence[Rat], i: int, valuation: Valuation) -> Rat:
    """Weighted maximin share of agent i under the given entitlement profile.

    Maximizes, over full allocations judged with agent i's valuation, the
    minimum of (b_i/b_k) * v_i(A_k). Zero whenever fewer items carry positive
    value than there are agents, since some bundle then values to nothing.
    """
    ents = [(_check_budget(e)) for e in entitlements]
    if sum(ents, Rat(0)) != 1:
        raise InputError(f"entitlements: sum {rat_to_str(sum(ents, Rat(0)))} != 1")
    if not (0 <= i < len(ents)):
        raise InputError(f"agent index {i} out of range")
    n = len(ents)
    vals = [x for x in valuation.item_values if x > 0]
    if len(vals) < n:
        return Rat(0)
    vals.sort(reverse=True)
    counter = _NodeCounter("assignment-nodes")
    ratios = [ents[i] / ents[k] for k in range(n)]
    remaining = [0] * (len(vals) + 1)
    for idx in range(len(vals) - 1, -1, -1):
        remaining[idx] = remaining[idx + 1] + vals[idx]
    best = Rat(0)

    def dfs(idx: int, sums: list[int]) -> None:
        nonlocal best
        counter.tick()
        if idx == len(vals):
            score = min(ratios[k] * sums[k] for k in range(n))
            if score > best:
                best = score
            return
        ceiling = min(ratios[k] * (sums[k] + remaining[idx]) for k in range(n))
        if ceiling <= best:
            return
        seen: set[tuple[Rat, int]] = set()
        for k in range(n):
            key = (ratios[k], sums[k])
            if key in seen:
                continue
            seen.add(key)
            sums[k] += vals[idx]
            dfs(idx + 1, sums)
            sums[k] -= vals[idx]

    dfs(0, [0] * n)
    return best


# ---------------------------------------------------------------------------
# AnyPrice share with certificates.


@dataclass(frozen=True)
class PriceCertificate:
    """Upper-bound certificate: non-negative prices summing to at most 1 under
    which no bundle of value above `value_bound` is affordable at `budget`."""

    prices: tuple[Rat, ...]
    budget: Rat
    value_bound: int

    def to_json_dict(self) -> dict:
        return {
            "prices": [rat_to_str(p) for p in self.prices],
            "budget": rat_to_str(self.budget),
            "value_bound": self.value_bound,
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "PriceCertificate":
        prices = tuple(rat_from_str(s, f"prices[{j}]") for j, s in enumerate(doc["prices"]))
        return PriceCertificate(prices, rat_from_str(doc["budget"], "budget"), int(doc["value_bound"]))


@dataclass(frozen=True)
class BundleWitness:
    """Lower-bound certificate: bundles with weights summing to 1, each of
    value at least `value_floor`, covering every item with weight at most b."""

    sets: tuple[tuple[int, ...], ...]
    weights: tuple[Rat, ...]
    value_floor: int

    def to_json_dict(self) -> dict:
        return {
            "sets": [list(s) for s in self.sets],
            "weights": [rat_to_str(w) for w in self.weights],
            "value_floor": self.value_floor,
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "BundleWitness":
        sets = tuple(tuple(sorted(int(j) for j in s)) for s in doc["sets"])
        weights = tuple(rat_from_str(s, f"weights[{j}]") for j, s in enumerate(doc["weights"]))
        return BundleWitness(sets, weights, int(doc["value_floor"]))


class ApsResult(NamedTuple):
    value: int
    certificate: PriceCertificate
    witness: BundleWitness


def check_price_certificate(cert: PriceCertificate, valuation: Valuation) -> bool:
    if len(cert.prices) != valuation.m:
        return False
    if any(p < 0 for p in cert.prices):
        return False
    if sum(cert.prices, Rat(0)) > 1:
        return False
    best = _max_affordable_value(valuation.item_values, cert.prices, cert.budget)
    return best <= cert.value_bound


def check_bundle_witness(wit: BundleWitness, valuation: Valuation, b: Rat) -> bool:
    b = _check_budget(b)
    if not wit.sets or len(wit.sets) != len(wit.weights):
        return False
    if any(w <= 0 for w in wit.weights):
        return False
    if sum(wit.weights, Rat(0)) != 1:
        return False
    coverage = [Rat(0)] * valuation.m
    for s, w in zip(wit.sets, wit.weights):
        if len(set(s)) != len(s):
            return False
        if any(not (0 <= j < valuation.m) for j in s):
            return False
        if valuation.value(s) < wit.value_floor:
            return False
        for j in s:
            coverage[j] += w
    return all(c <= b for c in coverage)


def _threshold_price_lp(values: Sequence[int], b: Rat, t: int) -> tuple[Rat, list[Rat]]:
    """min sum(p) s.t. p(S) >= b for every S with v(S) >= t, p >= 0.

    Solved by cutting planes: the dual (a fractional covering problem over the
    current cut family) is solved exactly, and the knapsack separation oracle
    either finds a violated bundle or proves feasibility of the dual prices.
    """
    assert t >= 1, "threshold LP is only queried at positive thresholds"
    m = len(values)
    prices: list[Rat] = [Rat(0)] * m
    opt = Rat(0)
    cuts: list[frozenset[int]] = []
    while True:
        sep = _min_price_reaching(values, prices, t)
        if sep is None:
            break
        sep_price, bundle = sep
        if sep_price >= b:
            break
        cuts.append(bundle)
        c = [b] * len(cuts)
        rows = [[Rat(1) if j in s else Rat(0) for s in cuts] for j in range(m)]
        rhs = [Rat(1)] * m
        opt, _, duals = simplex_max(c, rows, rhs)
        prices = duals
    return opt, prices


def aps_exact(valuation: Valuation, b: Rat) -> ApsResult:
    """AnyPrice share with a matching price certificate and bundle witness.

    The share value is found by binary search on the integer threshold t,
    deciding "APS < t" through the exact threshold price LP. The returned
    certificate re-proves the upper bound (prices padded to sum exactly 1,
    leaving every bundle above the share strictly unaffordable); the witness
    re-proves the lower bound (weighted bundles at the share value with
    per-item coverage at most b), found by column generation.
    """
    b = _check_budget(b)
    m = valuation.m
    values = valuation.item_values
    total = valuation.total
    if m == 0 or total == 0:
        cert = PriceCertificate(tuple(Rat(1, m) for _ in range(m)) if m else (), b, 0)
        wit = BundleWitness(((),), (Rat(1),), 0)
        return ApsResult(0, cert, wit)

    cache: dict[int, tuple[Rat, list[Rat]]] = {}

    def below(t: int) -> bool:
        if t not in cache:
            cache[t] = _threshold_price_lp(values, b, t)
        return cache[t][0] < 1

    lo, hi = 0, total + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            hi = mid
        else:
            lo = mid
    aps = lo

    if (aps + 1) not in cache:
        cache[aps + 1] = _threshold_price_lp(values, b, aps + 1)
    opt, raw_prices = cache[aps + 1]
    pad = (1 - opt) / m
    cert = PriceCertificate(tuple(p + pad for p in raw_prices), b, aps)

    if aps == 0:
        wit = BundleWitness(((),), (Rat(1),), 0)
        return ApsResult(0, cert, wit)

    uniform = [Rat(1)] * m
    first = _min_price_reaching(values, uniform, aps)
    assert first is not None
    cols: list[frozenset[int]] = [first[1]]
    while True:
        c = [Rat(1)] * len(cols)
        rows = [[Rat(1) if j in s else Rat(0) for s in cols] for j in range(m)]
        rhs = [b] * m
        mass, lam, duals = simplex_max(c, rows, rhs)
        found = _min_price_reaching(values, duals, aps)
        assert found is not None
        reduced_price, bundle = found
        if reduced_price >= 1:
            break
        cols.append(bundle)
    assert mass >= 1
    sets = []
    weights = []
    for s, w in zip(cols, lam):
        if w > 0:
            sets.append(tuple(sorted(s)))
            weights.append(w / mass)
    assert len(sets) <= m
    wit = BundleWitness(tuple(sets), tuple(weights), aps)
    return ApsResult(aps, cert, wit)


def two_agent_aps_allocation(v1: Valuation, v2: Valuation, b1: Rat, b2: Rat) -> Allocation:
    """Split the items between two agents so each gets at least her APS.

    Scans agent 1's bundle witness: its coverage bound forces some support
    bundle whose complement is worth at least the proportional share, and
    hence the APS, to agent 2.
    """
    b1 = _check_budget(b1)
    b2 = _check_budget(b2)
    if b1 + b2 != 1:
        raise InputError(f"entitlements: sum {rat_to_str(b1 + b2)} != 1")
    if v1.m != v2.m:
        raise InputError("valuations: item counts differ")
    res1 = aps_exact(v1, b1)
    aps2 = aps_exact(v2, b2).value
    everything = set(range(v1.m))
    for s in res1.witness.sets:
        comp = tuple(sorted(everything - set(s)))
        if v2.value(comp) >= aps2:
            return Allocation((tuple(s), comp))
    raise AssertionError("no witness bundle left the other agent whole")
