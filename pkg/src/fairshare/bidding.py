"""Sequential bidding game: engine, strategies, and worst-case adversaries.

Each round every agent submits a bid at most her remaining budget; the
highest bidder wins, picks a non-empty set of remaining items, and pays her
bid per item taken. A strategy is a stateful object driven through
`bid`/`select` on read-only views; the engine never trusts it, substituting
a safe fallback and flagging the transcript on any illegal move.

The strategies here carry worst-case guarantees against arbitrary opponent
coalitions, expressed against the bidder's own share values. `meta_strategy`
picks the best of them per agent using only game simulations, never a share
solver.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, replace
from typing import Sequence

from .core import (
    Allocation,
    InputError,
    Instance,
    Rat,
    Valuation,
    rat_from_str,
    rat_to_str,
)
from .shares import tps


@dataclass(frozen=True)
class AgentView:
    """What one agent observes when asked to act in a round."""

    round_no: int
    remaining: tuple[int, ...]
    budget: Rat
    total_budget: Rat
    bundle: tuple[int, ...]
    winning_bid: Rat | None = None


class Strategy:
    """Interface for bidding-game players.

    `bid` is called once per round; `select` only on the round's winner, with
    `winning_bid` filled in. Implementations are deterministic and keep any
    state they need on plain attributes so they can be cloned for tree
    search.
    """

    def bid(self, view: AgentView) -> Rat:
        raise NotImplementedError

    def select(self, view: AgentView) -> tuple[int, ...]:
        raise NotImplementedError

    def clone(self) -> "Strategy":
        return copy.deepcopy(self)


def _top_by(scores, remaining: Sequence[int], count: int = 1) -> tuple[int, ...]:
    """Highest-scoring items, ties to the lowest index."""
    ordered = sorted(remaining, key=lambda j: (-scores(j), j))
    return tuple(ordered[:count])


@dataclass(frozen=True)
class RoundRecord:
    bids: tuple[Rat, ...]
    winner: int
    taken: tuple[int, ...]
    payment: Rat


@dataclass(frozen=True)
class GameTranscript:
    rounds: tuple[RoundRecord, ...]
    allocation: Allocation
    flags: tuple[str, ...]

    @property
    def infeasible(self) -> bool:
        return any(f.startswith("infeasible") for f in self.flags)

    def to_json_dict(self) -> dict:
        return {
            "rounds": [
                {
                    "bids": [rat_to_str(x) for x in r.bids],
                    "winner": r.winner,
                    "taken": list(r.taken),
                    "payment": rat_to_str(r.payment),
                }
                for r in self.rounds
            ],
            "allocation": [list(bundle) for bundle in self.allocation.bundles],
            "flags": list(self.flags),
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "GameTranscript":
        try:
            rounds = tuple(
                RoundRecord(
                    bids=tuple(rat_from_str(x, f"rounds[{t}].bids[{i}]") for i, x in enumerate(r["bids"])),
                    winner=int(r["winner"]),
                    taken=tuple(sorted(int(j) for j in r["taken"])),
                    payment=rat_from_str(r["payment"], f"rounds[{t}].payment"),
                )
                for t, r in enumerate(doc["rounds"])
            )
            alloc = Allocation(tuple(tuple(int(j) for j in b) for b in doc["allocation"]))
            flags = tuple(str(f) for f in doc.get("flags", []))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"transcript: malformed: {exc}") from None
        return GameTranscript(rounds, alloc, flags)


def _pick_winner(bids: list[Rat], tie_break) -> int:
    best = max(bids)
    cands = [i for i, x in enumerate(bids) if x == best]
    if tie_break == "lowest":
        return cands[0]
    if isinstance(tie_break, tuple) and len(tie_break) == 2 and tie_break[0] == "avoid":
        focal = tie_break[1]
        others = [i for i in cands if i != focal]
        return others[0] if others else focal
    raise InputError(f"tie_break: expected 'lowest' or ('avoid', agent), got {tie_break!r}")


def _fallback_take(valuation: Valuation, remaining: Sequence[int]) -> tuple[int, ...]:
    vals = valuation.item_values
    return _top_by(lambda j: vals[j], remaining, 1)


def _coerce_bid(raw, budget: Rat) -> tuple[Rat, bool]:
    """Clamp an illegal bid to 0; second result reports whether it was legal."""
    if isinstance(raw, bool) or not isinstance(raw, (int, Rat)):
        return Rat(0), False
    bid = Rat(raw)
    if not (0 <= bid <= budget):
        return Rat(0), False
    return bid, True


def _legal_selection(taken, remaining: set[int], bid: Rat, budget: Rat) -> tuple[int, ...] | None:
    if not isinstance(taken, (tuple, list)) or not taken:
        return None
    items = tuple(taken)
    if len(set(items)) != len(items):
        return None
    if not set(items) <= remaining:
        return None
    if not all(isinstance(j, int) and not isinstance(j, bool) for j in items):
        return None
    if bid * len(items) > budget:
        return None
    return tuple(sorted(items))


def run_game(
    inst: Instance,
    strategies: Sequence[Strategy],
    tie_break="lowest",
) -> GameTranscript:
    """Play the bidding game to completion and return the full transcript.

    Budgets start at the entitlements (which sum to 1); every round consumes
    at least one item, so the game ends within m rounds. Strategy faults are
    flagged, never fatal: an illegal bid becomes 0 and an illegal selection
    becomes the winner's single highest-value item.
    """
    if len(strategies) != inst.n:
        raise InputError(f"strategies: expected {inst.n}, got {len(strategies)}")
    budgets = list(inst.entitlements)
    paid = Rat(0)
    remaining = list(range(inst.m))
    bundles: list[list[int]] = [[] for _ in range(inst.n)]
    rounds: list[RoundRecord] = []
    flags: list[str] = []
    round_no = 0
    while remaining:
        round_no += 1
        total_budget = sum(budgets, Rat(0))
        views = [
            AgentView(round_no, tuple(remaining), budgets[i], total_budget, tuple(bundles[i]))
            for i in range(inst.n)
        ]
        bids = []
        for i in range(inst.n):
            bid, legal = _coerce_bid(strategies[i].bid(views[i]), budgets[i])
            if not legal:
                flags.append(f"round {round_no}: agent {i} bid fault")
            bids.append(bid)
        winner = _pick_winner(bids, tie_break)
        wview = replace(views[winner], winning_bid=bids[winner])
        taken = _legal_selection(
            strategies[winner].select(wview), set(remaining), bids[winner], budgets[winner]
        )
        if taken is None:
            flags.append(f"round {round_no}: agent {winner} selection fault")
            taken = _fallback_take(inst.valuations[winner], remaining)
        payment = bids[winner] * len(taken)
        budgets[winner] -= payment
        paid += payment
        bundles[winner].extend(taken)
        remaining = [j for j in remaining if j not in set(taken)]
        rounds.append(RoundRecord(tuple(bids), winner, taken, payment))
        assert sum(budgets, Rat(0)) + paid == 1, "budget conservation violated"
    allocation = Allocation(tuple(tuple(b) for b in bundles))
    return GameTranscript(tuple(rounds), allocation, tuple(flags))


def replay_transcript(inst: Instance, transcript: GameTranscript) -> Allocation:
    """Re-run a transcript, checking every round for mechanical legality.

    Raises InputError on the first violation: a bid above budget, a winner
    who was not a highest bidder, an illegal selection, or a payment that
    does not equal bid times items taken. Returns the verified allocation.
    """
    budgets = list(inst.entitlements)
    remaining = set(range(inst.m))
    bundles: list[list[int]] = [[] for _ in range(inst.n)]
    for t, r in enumerate(transcript.rounds):
        where = f"transcript.rounds[{t}]"
        if len(r.bids) != inst.n:
            raise InputError(f"{where}: expected {inst.n} bids, got {len(r.bids)}")
        for i, bid in enumerate(r.bids):
            if not (0 <= bid <= budgets[i]):
                raise InputError(f"{where}.bids[{i}]: {rat_to_str(bid)} outside [0, budget]")
        if not (0 <= r.winner < inst.n):
            raise InputError(f"{where}.winner: agent {r.winner} out of range")
        if r.bids[r.winner] != max(r.bids):
            raise InputError(f"{where}.winner: agent {r.winner} did not submit a highest bid")
        if not r.taken:
            raise InputError(f"{where}.taken: empty selection")
        if len(set(r.taken)) != len(r.taken) or not set(r.taken) <= remaining:
            raise InputError(f"{where}.taken: not a set of remaining items")
        expect = r.bids[r.winner] * len(r.taken)
        if r.payment != expect:
            raise InputError(f"{where}.payment: {rat_to_str(r.payment)} != {rat_to_str(expect)}")
        if expect > budgets[r.winner]:
            raise InputError(f"{where}.payment: exceeds winner budget")
        budgets[r.winner] -= expect
        remaining -= set(r.taken)
        bundles[r.winner].extend(r.taken)
    if remaining:
        raise InputError(f"transcript: items {sorted(remaining)} never allocated")
    final = Allocation(tuple(tuple(b) for b in bundles))
    if final != transcript.allocation:
        raise InputError("transcript: allocation does not match the replayed rounds")
    return final


# ---------------------------------------------------------------------------
# Strategies.


class _ZeroStrategy(Strategy):
    """Always bids 0; on a forced win takes the single highest-value item."""

    def __init__(self, valuation: Valuation) -> None:
        self.vals = valuation.item_values

    def bid(self, view: AgentView) -> Rat:
        return Rat(0)

    def select(self, view: AgentView) -> tuple[int, ...]:
        return _top_by(lambda j: self.vals[j], view.remaining, 1)


def strategy_zero(valuation: Valuation, b: Rat | None = None) -> Strategy:
    return _ZeroStrategy(valuation)


class _BidMaxValue(Strategy):
    """Bid the top remaining (capped) value over the fixed total, capped by
    budget; on a win take that top item.

    `scale` re-expresses bids and budgets when the strategy plays inside a
    sub-game whose budgets sum to `scale` instead of 1; `universe` restricts
    the value mass to a sub-game's item set.
    """

    def __init__(self, valuation, b, cap=None, scale=Rat(1), universe=None) -> None:
        items = range(valuation.m) if universe is None else universe
        vals = valuation.item_values
        self.capped = {j: vals[j] if cap is None else min(vals[j], cap) for j in items}
        self.total = sum(self.capped.values())
        self.b = Rat(b)
        self.scale = Rat(scale)

    def _top(self, remaining) -> tuple[int, ...]:
        return _top_by(lambda j: self.capped.get(j, 0), remaining, 1)

    def bid(self, view: AgentView) -> Rat:
        if self.total <= 0:
            return Rat(0)
        x = self.capped.get(self._top(view.remaining)[0], 0)
        if x <= 0:
            return Rat(0)
        return min(Rat(x) / self.total * self.scale, view.budget)

    def select(self, view: AgentView) -> tuple[int, ...]:
        return self._top(view.remaining)


def strategy_bid_max_value(valuation: Valuation, b: Rat, cap=None) -> Strategy:
    """Guarantees, when no k items of capped value exceed b times the capped
    total, a final bundle worth at least k/(k+1) of that proportional slice;
    with the truncated proportional share as cap this yields at least half
    the TPS."""
    return _BidMaxValue(valuation, b, cap=cap)


class _RankItemStrategy(Strategy):
    """Bid the full entitlement every round; wins at latest once the floor(1/b)
    cheaper-or-equal bidders ahead are exhausted, so the top-ranked reachable
    item is secured."""

    def __init__(self, valuation: Valuation, b: Rat) -> None:
        self.vals = valuation.item_values
        self.b = Rat(b)

    def bid(self, view: AgentView) -> Rat:
        return min(self.b, view.budget)

    def select(self, view: AgentView) -> tuple[int, ...]:
        return _top_by(lambda j: self.vals[j], view.remaining, 1)


def strategy_rank_item(valuation: Valuation, b: Rat) -> Strategy:
    return _RankItemStrategy(valuation, b)


class _TpsStrategy(Strategy):
    """Adaptive proportional bidding with a two-item rescue; guarantees a
    bundle worth at least TPS/(2-b) and retires after one satisfying win."""

    def __init__(self, valuation: Valuation, b: Rat) -> None:
        self.vals = valuation.item_values
        self.dropped = False
        self.prev_bundle = 0
        self.last_rule = 0

    def bid(self, view: AgentView) -> Rat:
        won = len(view.bundle) > self.prev_bundle
        self.prev_bundle = len(view.bundle)
        if won and self.last_rule in (1, 2):
            self.dropped = True
        self.last_rule = 0
        if self.dropped:
            return Rat(0)
        rem = sorted(view.remaining, key=lambda j: (-self.vals[j], j))
        s = sum(self.vals[j] for j in rem)
        bt, total = view.budget, view.total_budget
        if s == 0 or total == 0:
            return Rat(0)
        x = self.vals[rem[0]]
        y = self.vals[rem[1]] if len(rem) > 1 else 0
        if x * total >= bt * s:
            self.last_rule = 1
            return bt
        if x * (2 * total - bt) < bt * s and (x + y) * total >= bt * s:
            self.last_rule = 2
            return bt / 2
        self.last_rule = 3
        # Below budget exactly because rule 1 failed: x/s * total < bt.
        return Rat(x) * total / s

    def select(self, view: AgentView) -> tuple[int, ...]:
        count = 2 if self.last_rule == 2 else 1
        picked = _top_by(lambda j: self.vals[j], view.remaining, count)
        if view.winning_bid is not None and view.winning_bid * len(picked) > view.budget:
            picked = picked[:1]
        return picked


def strategy_tps(valuation: Valuation, b: Rat) -> Strategy:
    return _TpsStrategy(valuation, b)


class _Lemma34Strategy(Strategy):
    """Two-stage capped-value bidder targeting one and a half times z.

    Stage 1 bids the top capped value over the fixed capped total, or the
    whole budget when one more top item would reach the target. Stage 2
    starts the first time a full-budget round is followed by a proportional
    one: values are re-truncated against the entry budget and bid over the
    original capped total. Retires as soon as the accumulated capped value
    reaches the target.
    """

    def __init__(self, valuation, b, z, scale=Rat(1), universe=None) -> None:
        items = list(range(valuation.m)) if universe is None else list(universe)
        vals = valuation.item_values
        self.capped = {j: min(Rat(vals[j]), Rat(z)) for j in items}
        self.s = sum(self.capped.values(), Rat(0))
        self.b0 = Rat(b)
        self.z = Rat(z)
        self.scale = Rat(scale)
        self.stage = 1
        self.prev_full_bid = False
        self.vhat: dict[int, Rat] | None = None
        self.done = False
        self.last_sel: tuple[int, ...] = ()

    def _accumulated(self, bundle) -> Rat:
        return sum((self.capped.get(j, Rat(0)) for j in bundle), Rat(0))

    def bid(self, view: AgentView) -> Rat:
        if self.done:
            return Rat(0)
        target = Rat(3, 2) * self.z
        if self.z <= 0 or self.s == 0 or self._accumulated(view.bundle) >= target:
            self.done = True
            return Rat(0)
        rem = [j for j in view.remaining if j in self.capped]
        if not rem:
            return Rat(0)
        if self.stage == 1:
            top = _top_by(lambda j: self.capped[j], rem, 1)[0]
            x = self.capped[top]
            u = self._accumulated(view.bundle)
            reach = x + u >= target
            if self.prev_full_bid and not reach:
                self.stage = 2
                entry = view.budget / self.scale
                if entry <= 0:
                    self.done = True
                    return Rat(0)
                ratio = (self.b0 - 2 * entry) / entry
                self.vhat = {
                    j: max(Rat(0), min(entry * self.s, ratio * self.capped[j])) for j in rem
                }
            elif reach:
                self.prev_full_bid = True
                self.last_sel = (top,)
                return view.budget
            else:
                self.prev_full_bid = False
                self.last_sel = (top,)
                return min(x / self.s * self.scale, view.budget)
        assert self.vhat is not None
        top = _top_by(lambda j: self.vhat.get(j, Rat(0)), rem, 1)[0]
        self.last_sel = (top,)
        xh = self.vhat.get(top, Rat(0))
        if xh <= 0:
            return Rat(0)
        return min(xh / self.s * self.scale, view.budget)

    def select(self, view: AgentView) -> tuple[int, ...]:
        if self.last_sel and set(self.last_sel) <= set(view.remaining):
            return self.last_sel
        return (min(view.remaining),)


def strategy_lemma34(valuation: Valuation, b: Rat, z) -> Strategy:
    """Guarantees a bundle of value at least 3z/2 whenever no price vector
    summing to 1 prices every bundle of value z above b/2."""
    return _Lemma34Strategy(valuation, b, z)


class _Aps35Strategy(Strategy):
    """Three-step bidder targeting three fifths of z.

    Steps 1 and 2 grab a single item, or a rescue pair, that already meets
    the target, retiring on success. The first round where no pair suffices
    the strategy restarts inside the residual sub-game: by default with the
    two-stage capped bidder at two fifths of z, or a plain proportional
    bidder when `eight_fifteenths` is set.
    """

    def __init__(self, valuation: Valuation, b: Rat, z, eight_fifteenths: bool = False) -> None:
        self.valuation = valuation
        self.vals = valuation.item_values
        self.b = Rat(b)
        self.z = Rat(z)
        self.eight = eight_fifteenths
        self.delegate: Strategy | None = None
        self.done = False
        self.prev_bundle = 0
        self.last_step = 0

    def _start_subgame(self, view: AgentView) -> Rat:
        pool = view.total_budget
        if pool <= 0:
            self.done = True
            return Rat(0)
        inner_b = view.budget / pool
        if self.eight:
            self.delegate = _BidMaxValue(
                self.valuation, inner_b, cap=None, scale=pool, universe=view.remaining
            )
        else:
            self.delegate = _Lemma34Strategy(
                self.valuation, inner_b, Rat(2, 5) * self.z, scale=pool, universe=view.remaining
            )
        return self.delegate.bid(view)

    def bid(self, view: AgentView) -> Rat:
        if self.delegate is not None:
            return self.delegate.bid(view)
        won = len(view.bundle) > self.prev_bundle
        self.prev_bundle = len(view.bundle)
        if won and self.last_step in (1, 2):
            self.done = True
        self.last_step = 0
        if self.done:
            return Rat(0)
        if self.z <= 0:
            return self._start_subgame(view)
        target = Rat(3, 5) * self.z
        rem = sorted(view.remaining, key=lambda j: (-self.vals[j], j))
        x = self.vals[rem[0]] if rem else 0
        y = self.vals[rem[1]] if len(rem) > 1 else 0
        if x >= target:
            self.last_step = 1
            return view.budget
        if x + y >= target:
            self.last_step = 2
            return min(self.b / 2, view.budget)
        return self._start_subgame(view)

    def select(self, view: AgentView) -> tuple[int, ...]:
        if self.delegate is not None:
            return self.delegate.select(view)
        count = 2 if self.last_step == 2 else 1
        picked = _top_by(lambda j: self.vals[j], view.remaining, count)
        if view.winning_bid is not None and view.winning_bid * len(picked) > view.budget:
            picked = picked[:1]
        return picked


def strategy_aps35(valuation: Valuation, b: Rat, z, eight_fifteenths: bool = False) -> Strategy:
    """Guarantees a bundle of value at least 3z/5 whenever z is at most the
    AnyPrice share at entitlement b (8z/15 under the simpler sub-game
    bidder)."""
    return _Aps35Strategy(valuation, b, z, eight_fifteenths)


# ---------------------------------------------------------------------------
# Worst-case adversary and the simulation-driven meta choice.


def enumerate_win_patterns(m: int) -> list[tuple[int, ...]]:
    """All concession patterns with at most two agent wins in m rounds."""
    pats: list[tuple[int, ...]] = [()]
    pats.extend((k,) for k in range(1, m + 1))
    pats.extend((k, l) for k in range(1, m + 1) for l in range(k + 1, m + 1))
    return pats


def worst_case_adversary(
    valuation: Valuation, b: Rat, strategy: Strategy, wins: Sequence[int]
) -> GameTranscript:
    """Play one focal agent against a clairvoyant adversarial coalition.

    The coalition holds budget 1-b and concedes exactly the rounds listed in
    `wins` (1-based), bidding 0 there; in every other round it outbids the
    agent at her own bid and removes her top-value remaining item. Ties at 0
    also go to the coalition. When the coalition cannot afford an outbid it
    is forced to concede that round too: the transcript is flagged infeasible
    but still played to completion, so its final value is the real outcome of
    the exhausted-coalition line.
    """
    if any(isinstance(k, bool) or not isinstance(k, int) or k < 1 for k in wins):
        raise InputError(f"wins: expected 1-based round indices, got {wins!r}")
    winset = set(wins)
    vals = valuation.item_values
    budget_a = Rat(b)
    budget_adv = 1 - budget_a
    if not (0 < budget_a <= 1):
        raise InputError(f"entitlement: must satisfy 0 < b <= 1, got {rat_to_str(Rat(b))}")
    remaining = list(range(valuation.m))
    bundles: list[list[int]] = [[], []]
    rounds: list[RoundRecord] = []
    flags: list[str] = []
    round_no = 0
    while remaining:
        round_no += 1
        total = budget_a + budget_adv
        view = AgentView(round_no, tuple(remaining), budget_a, total, tuple(bundles[0]))
        bid, legal = _coerce_bid(strategy.bid(view), budget_a)
        if not legal:
            flags.append(f"round {round_no}: agent 0 bid fault")
        top = _top_by(lambda j: vals[j], remaining, 1)
        conceded = round_no in winset
        if not conceded and budget_adv < bid:
            flags.append(f"infeasible: coalition cannot outbid {rat_to_str(bid)} at round {round_no}")
            conceded = True
        if conceded and bid > 0:
            wview = replace(view, winning_bid=bid)
            taken = _legal_selection(strategy.select(wview), set(remaining), bid, budget_a)
            if taken is None:
                flags.append(f"round {round_no}: agent 0 selection fault")
                taken = top
            payment = bid * len(taken)
            budget_a -= payment
            bundles[0].extend(taken)
            rounds.append(RoundRecord((bid, Rat(0)), 0, taken, payment))
        else:
            # reached with bid <= budget_adv, or with bid == 0 on a
            # conceded round, where the outbid is free
            budget_adv -= bid
            bundles[1].extend(top)
            rounds.append(RoundRecord((bid, bid), 1, top, bid))
            taken = top
        remaining = [j for j in remaining if j not in set(taken)]
    allocation = Allocation((tuple(bundles[0]), tuple(bundles[1])))
    return GameTranscript(tuple(rounds), allocation, tuple(flags))


def test_z_good(valuation: Valuation, b: Rat, z: int) -> bool:
    """True when the three-step strategy at target z secures 3z/5 against
    every concession pattern, including the lines where the coalition goes
    broke and concedes the remaining rounds by force."""
    if z <= 0:
        return True
    target = Rat(3, 5) * z
    for wins in enumerate_win_patterns(valuation.m):
        strat = strategy_aps35(valuation, b, z)
        t = worst_case_adversary(valuation, b, strat, wins)
        if valuation.value(t.allocation.bundles[0]) < target:
            return False
    return True


def best_good_z(valuation: Valuation, b: Rat) -> int:
    """Largest z surviving `test_z_good`, by binary search.

    Every z up to the AnyPrice share is good, so the result is at least the
    APS while never touching a share solver.
    """
    total = valuation.total
    if test_z_good(valuation, b, total):
        return total
    lo, hi = 0, total
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if test_z_good(valuation, b, mid):
            lo = mid
        else:
            hi = mid
    return lo


def meta_guarantees(valuation: Valuation, b: Rat) -> tuple[int, dict[str, Rat]]:
    """Simulation-backed guarantee of each candidate strategy, plus the z the
    three-step strategy would target."""
    z = best_good_z(valuation, b)
    rank = math.floor(1 / Rat(b))
    ordered = sorted(valuation.item_values, reverse=True)
    rank_value = ordered[rank - 1] if rank <= len(ordered) else 0
    return z, {
        "aps35": Rat(3, 5) * z,
        "tps": tps(valuation, b) / (2 - Rat(b)),
        "rank": Rat(rank_value),
    }


def meta_strategy(valuation: Valuation, b: Rat) -> Strategy:
    """Best-of-three chooser: three-step at the best simulated z, the TPS
    bidder, or the rank bidder, whichever guarantee is largest (ties in that
    order). Uses only game simulations to pick, no share computations."""
    z, g = meta_guarantees(valuation, b)
    best = max(g.values())
    if g["aps35"] == best:
        return strategy_aps35(valuation, b, z)
    if g["tps"] == best:
        return strategy_tps(valuation, b)
    return strategy_rank_item(valuation, b)
